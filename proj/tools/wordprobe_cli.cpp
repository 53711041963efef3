#include "wordprobe/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (const char c : text) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (c != ' ') {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

struct Flags {
  std::string format = "glove-text";
  std::string lookup;
  std::string case_policy;
  std::string targets;
  std::string lambda_grid = "0.01,1000,8";
  std::string categories;
  std::string replay;
};

void add_shared(CLI::App& cmd, wordprobe::RunConfig& c, Flags& f) {
  cmd.add_option("--embeddings", c.embeddings, "Embedding file");
  cmd.add_option("--format", f.format, "glove-text | word2vec-bin")
      ->check(CLI::IsMember({"glove-text", "word2vec-bin"}));
  cmd.add_option("--lookup", f.lookup, "exact | phrase-then-average | average-only")
      ->check(CLI::IsMember({"exact", "phrase-then-average", "average-only"}));
  cmd.add_option("--case", f.case_policy, "lowercase | preserve")
      ->check(CLI::IsMember({"lowercase", "preserve"}));
  cmd.add_option("--dataset", c.dataset, "Entity CSV");
  cmd.add_option("--transforms", c.transforms, "Sidecar transform config (target=log10 lines)");
  cmd.add_option("--subset", c.subset, "File listing the entities to keep, one per line");
  cmd.add_option("--targets", f.targets, "Comma-separated targets (default: all)");
  cmd.add_option("--seed", c.seed, "Split and CV seed");
  cmd.add_option("--test-fraction", c.test_fraction, "Held-out fraction")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--folds", c.folds, "Cross-validation folds");
  cmd.add_option("--lambda-grid", f.lambda_grid, "lo,hi,count (log-uniform)");
  cmd.add_option("--output", c.output, "JSON report path; CSVs are written alongside");
  cmd.add_option("--replay", f.replay, "Re-run the config echoed in an earlier report");
}

void finish(wordprobe::RunConfig& c, const Flags& f, const std::string& command) {
  if (!f.replay.empty()) {
    std::ifstream in(f.replay);
    if (!in) throw wordprobe::Error("cannot open report " + f.replay);
    const auto report = nlohmann::json::parse(in);
    auto output = c.output;
    c = wordprobe::RunConfig::from_json(report.at("config"));
    if (c.command != command)
      throw wordprobe::Error("report was produced by '" + c.command + "', not '" + command + "'");
    c.output = output;
    return;
  }
  c.command = command;
  c.format = wordprobe::parse_format(f.format);
  if (!f.lookup.empty()) c.lookup = wordprobe::parse_lookup_mode(f.lookup);
  if (!f.case_policy.empty()) c.case_policy = wordprobe::parse_case_policy(f.case_policy);
  c.targets = split_list(f.targets);
  c.categories = split_list(f.categories);
  const auto grid = split_list(f.lambda_grid);
  if (grid.size() != 3) throw wordprobe::Error("--lambda-grid expects lo,hi,count");
  c.lambda_lo = std::stod(grid[0]);
  c.lambda_hi = std::stod(grid[1]);
  c.lambda_count = std::stoul(grid[2]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ridge probes, semantic scans and subspace ablations on static word embeddings"};
  app.require_subcommand(1);

  wordprobe::RunConfig config;
  Flags flags;

  auto* probe = app.add_subcommand("probe", "Held-out ridge probe per target");
  add_shared(*probe, config, flags);
  probe->add_option("--seeds", config.seeds, "Add a stability sweep over N consecutive seeds");

  auto* scan = app.add_subcommand("scan", "Correlate every vocabulary word's similarity profile with a target");
  add_shared(*scan, config, flags);
  scan->add_option("--top-k", config.top_k, "Words reported per direction");
  scan->add_option("--vocab-size", config.vocab_size, "Most frequent tokens considered");
  scan->add_option("--min-length", config.min_length, "Shortest word kept");
  scan->add_option("--exclusions", config.exclusions, "Directory of exclusion word lists");
  scan->add_flag("--alphabetic-only", config.alphabetic_only, "Drop tokens with digits or punctuation");

  auto* comp = app.add_subcommand("composite", "Antonym-pair composite score vs target");
  add_shared(*comp, config, flags);
  comp->add_option("--pos", config.pos_word, "Positive pole word")->required();
  comp->add_option("--neg", config.neg_word, "Negative pole word")->required();

  auto* abl = app.add_subcommand("ablate", "Semantic subspace ablation with random controls");
  add_shared(*abl, config, flags);
  abl->add_option("--categories", flags.categories, "Comma-separated category names or files");
  abl->add_option("--categories-dir", config.categories_dir, "Directory holding <name>.txt lists");
  abl->add_option("--n-random", config.n_random, "Random control repeats");
  abl->add_option("--master-seed", config.master_seed, "Seed of random repeat 0");
  abl->add_option("--var-threshold", config.var_threshold, "PCA explained-variance target");
  abl->add_option("--max-dims", config.max_dims, "PCA dimension cap");
  abl->add_flag("!--no-combined", config.combined, "Skip the all-categories ablation");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto* chosen = app.get_subcommands().front();
    finish(config, flags, chosen->get_name());
    const auto report = wordprobe::run_command(config);
    for (const auto& w : report.at("warnings")) std::cerr << "warning: " << w.get<std::string>() << "\n";
    if (config.output.empty()) std::cout << report.dump(2) << "\n";
    else std::cerr << "wrote " << config.output.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
