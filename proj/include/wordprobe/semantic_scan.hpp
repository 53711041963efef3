#pragma once

#include "wordprobe/dataset.hpp"
#include "wordprobe/embedding_store.hpp"
#include "wordprobe/stats.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace wordprobe {

// Requires both vectors nonzero.
double cosine(const Vector& u, const Vector& v);

struct VocabFilter {
  std::size_t top_k = 20000;
  std::size_t min_length = 4;  // in UTF-8 code points
  bool alphabetic_only = false;
  std::map<std::string, std::set<std::string>> exclusion_lists;

  // Every *.txt in `dir` becomes a list named after its stem. Entries are
  // lowercased.
  void load_exclusions(const std::filesystem::path& dir);
  bool excluded(std::string_view word) const;
};

// Surviving words of the top-k slice, in store order. Throws if none survive.
std::vector<std::string> filter_vocabulary(const EmbeddingStore& store,
                                           const VocabFilter& filter);

struct WordCorrelation {
  std::string word;
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Correlate each surviving word's cosine profile across the design's
/// entities (rows with `target` present) with that target. Sorted by r
/// descending, then word. Words with a constant profile are omitted.
std::vector<WordCorrelation> scan(const EmbeddingStore& store,
                                  const JoinedDesign& design,
                                  std::string_view target,
                                  const VocabFilter& filter,
                                  Execution exec = Execution::parallel);

enum class Direction { positive, negative };

// k most extreme entries in `direction`; ties ordered by word.
std::vector<WordCorrelation> top_k(const std::vector<WordCorrelation>& all,
                                   std::size_t k, Direction direction);

struct CompositeScore {
  std::string pos_word;
  std::string neg_word;
  std::vector<std::string> names;
  std::vector<double> scores;   // cos(e, pos) - cos(e, neg)
  std::vector<double> targets;
  Correlation correlation;
};

// Both words are looked up verbatim (then lowercased).
CompositeScore composite(const EmbeddingStore& store, const JoinedDesign& design,
                         std::string_view pos_word, std::string_view neg_word,
                         std::string_view target);

}  // namespace wordprobe
