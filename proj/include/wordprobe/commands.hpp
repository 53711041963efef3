#pragma once

// Subcommand drivers shared by the CLI and the tests. Each returns the JSON
// report and, when `output` is set, writes it plus its CSV companions.

#include "wordprobe/embedding_store.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wordprobe {

struct RunConfig {
  std::string command;

  std::filesystem::path embeddings;
  EmbeddingFormat format = EmbeddingFormat::glove_text;
  std::optional<LookupMode> lookup;
  std::optional<CasePolicy> case_policy;
  std::filesystem::path dataset;
  std::filesystem::path transforms;  // sidecar; empty = auto
  std::filesystem::path subset;      // entity list; empty = all
  std::vector<std::string> targets;  // empty = every target in the table

  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  std::size_t folds = 5;
  double lambda_lo = 1e-2;
  double lambda_hi = 1e3;
  std::size_t lambda_count = 8;

  std::filesystem::path output;  // JSON report; empty = stdout only

  // probe
  std::size_t seeds = 0;  // > 0 adds a stability sweep
  // scan
  std::size_t top_k = 15;
  std::size_t vocab_size = 20000;
  std::size_t min_length = 4;
  bool alphabetic_only = false;
  std::filesystem::path exclusions;
  // composite
  std::string pos_word;
  std::string neg_word;
  // ablate
  std::vector<std::string> categories;
  std::filesystem::path categories_dir;
  std::size_t n_random = 100;
  std::uint64_t master_seed = 0;
  double var_threshold = 0.9;
  std::size_t max_dims = 20;
  bool combined = true;

  LookupStrategy strategy() const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& config);
};

nlohmann::json cmd_probe(const RunConfig& config);
nlohmann::json cmd_scan(const RunConfig& config);
nlohmann::json cmd_composite(const RunConfig& config);
nlohmann::json cmd_ablate(const RunConfig& config);

// Dispatch on config.command.
nlohmann::json run_command(const RunConfig& config);

// Removes wall-clock fields so two reports can be compared.
nlohmann::json strip_timing(nlohmann::json report);

// Largest absolute difference between numbers at matching paths; structural
// mismatches count as infinity.
double max_metric_difference(const nlohmann::json& a, const nlohmann::json& b);

}  // namespace wordprobe
