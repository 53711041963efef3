#pragma once

#include "wordprobe/common.hpp"
#include "wordprobe/embedding_store.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wordprobe {

enum class Transform { none, log10 };

struct TargetMeta {
  std::string name;
  std::string units;
  Transform transform = Transform::none;  // pending, not yet applied
  Transform applied = Transform::none;    // already applied to the values
};

using Column = std::vector<std::optional<double>>;

/// Named entities with numeric targets; a missing cell is nullopt.
struct EntityTable {
  std::vector<std::string> names;
  std::vector<TargetMeta> targets;
  std::vector<Column> columns;  // columns[t][entity]

  std::size_t size() const { return names.size(); }
  std::size_t target_index(std::string_view target) const;
  const Column& column(std::string_view target) const {
    return columns[target_index(target)];
  }
};

/// Reads a CSV whose first column is `name` and whose other columns are
/// numeric targets. Header cells take the form `target[units]:log10`, with
/// both the unit and the transform suffix optional. When `sidecar` is given
/// (or `<csv>.transforms` exists next to the file) its `target=log10` lines
/// override the header.
EntityTable load_entity_table(const std::filesystem::path& path,
                              std::optional<std::filesystem::path> sidecar = {});

// Replaces log10-flagged columns by their log10 and moves the flag to
// `applied`. Re-applying a log10 column is refused.
EntityTable apply_transforms(const EntityTable& table);

// Keeps only the named entities (in table order). Unknown names throw.
EntityTable restrict_entities(const EntityTable& table,
                              const std::vector<std::string>& keep);

std::vector<std::string> read_word_list(const std::filesystem::path& path);

struct DroppedEntity {
  std::string name;
  std::string reason;
};

/// Embedding rows joined to targets. Row i of `features` is the embedding of
/// names[i]; target columns may still hold missing values, which are
/// excluded per target at probe time.
struct JoinedDesign {
  Matrix features;
  std::vector<std::string> names;
  std::vector<TargetMeta> targets;
  std::vector<Column> columns;
  std::vector<DroppedEntity> dropped;

  std::size_t rows() const { return names.size(); }
  std::size_t target_index(std::string_view target) const;
  const Column& column(std::string_view target) const {
    return columns[target_index(target)];
  }
  // Row indices with a value for `target`, ascending.
  std::vector<std::size_t> rows_with(std::string_view target) const;

  JoinedDesign with_features(Matrix replacement) const;
};

JoinedDesign join_embeddings(const EntityTable& table,
                             const EmbeddingStore& store,
                             const LookupStrategy& strategy);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// |test| = round(n * test_fraction), drawn from a seeded permutation.
// Requires n >= 5.
Split train_test_split(std::size_t n, const SplitSpec& spec);

}  // namespace wordprobe
