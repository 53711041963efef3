#include "wordprobe/semantic_scan.hpp"

#include "wordprobe/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace wordprobe {

namespace {

std::size_t utf8_length(std::string_view s) {
  std::size_t count = 0;
  for (const char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
  return count;
}

bool is_alphabetic(std::string_view s) {
  for (const char c : s) {
    const auto u = static_cast<unsigned char>(c);
    // Bytes >= 0x80 belong to non-ASCII letters in practice.
    if (!(std::isalpha(u) || u >= 0x80)) return false;
  }
  return true;
}

Vector column_values(const JoinedDesign& design, std::string_view target,
                     const std::vector<std::size_t>& rows) {
  const auto& col = design.column(target);
  Vector v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) v[static_cast<Eigen::Index>(i)] = *col[rows[i]];
  return v;
}

Vector resolve_word(const EmbeddingStore& store, std::string_view word) {
  auto hit = store.find(word);
  if (!hit) hit = store.find(ascii_lower(word));
  if (!hit) throw Error("word '" + std::string(word) + "' is not in the embedding store");
  return store.vector(*hit);
}

}  // namespace

double cosine(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw Error("cosine of vectors with different dimensions");
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) throw Error("cosine of a zero vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

void VocabFilter::load_exclusions(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw Error("exclusion directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    auto& list = exclusion_lists[file.stem().string()];
    for (const auto& word : read_word_list(file)) list.insert(ascii_lower(word));
  }
}

bool VocabFilter::excluded(std::string_view word) const {
  const auto lowered = ascii_lower(word);
  for (const auto& [name, words] : exclusion_lists)
    if (words.count(lowered)) return true;
  return false;
}

std::vector<std::string> filter_vocabulary(const EmbeddingStore& store,
                                           const VocabFilter& filter) {
  const auto slice = frequency_slice(store, std::min(filter.top_k, store.size()));
  std::vector<std::string> out;
  for (const auto& word : slice) {
    if (utf8_length(word) < filter.min_length) continue;
    if (filter.alphabetic_only && !is_alphabetic(word)) continue;
    if (filter.excluded(word)) continue;
    out.push_back(word);
  }
  if (out.empty()) throw Error("vocabulary filter removed every word");
  return out;
}

std::vector<WordCorrelation> scan(const EmbeddingStore& store, const JoinedDesign& design,
                                  std::string_view target, const VocabFilter& filter,
                                  Execution exec) {
  const auto rows = design.rows_with(target);
  if (rows.size() < 10)
    throw Error("scan needs at least 10 entities with '" + std::string(target) + "'");
  if (static_cast<std::size_t>(design.features.cols()) != store.dimension())
    throw Error("design and store dimensions differ");

  const auto vocabulary = filter_vocabulary(store, filter);
  Matrix entities(static_cast<Eigen::Index>(rows.size()), design.features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    entities.row(static_cast<Eigen::Index>(i)) =
        design.features.row(static_cast<Eigen::Index>(rows[i]));
  Matrix words(static_cast<Eigen::Index>(vocabulary.size()),
               static_cast<Eigen::Index>(store.dimension()));
  for (std::size_t j = 0; j < vocabulary.size(); ++j)
    words.row(static_cast<Eigen::Index>(j)) = store.vector(*store.find(vocabulary[j])).transpose();
  const Vector values = column_values(design, target, rows);

  const auto rs = exec == Execution::parallel
                      ? kernels::similarity_correlations(entities, words, values)
                      : kernels::reference::similarity_correlations(entities, words, values);

  std::vector<WordCorrelation> out;
  out.reserve(vocabulary.size());
  for (std::size_t j = 0; j < vocabulary.size(); ++j) {
    if (std::isnan(rs[j])) continue;
    out.push_back({vocabulary[j], rs[j], pearson_p_value(rs[j], rows.size()), rows.size()});
  }
  std::sort(out.begin(), out.end(), [](const WordCorrelation& a, const WordCorrelation& b) {
    if (a.r != b.r) return a.r > b.r;
    return a.word < b.word;
  });
  return out;
}

std::vector<WordCorrelation> top_k(const std::vector<WordCorrelation>& all, std::size_t k,
                                   Direction direction) {
  if (k > all.size())
    throw Error("requested top " + std::to_string(k) + " of only " +
                std::to_string(all.size()) + " correlations");
  std::vector<WordCorrelation> sorted = all;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [direction](const WordCorrelation& a, const WordCorrelation& b) {
                     if (a.r != b.r) return direction == Direction::positive ? a.r > b.r
                                                                             : a.r < b.r;
                     return a.word < b.word;
                   });
  sorted.resize(k);
  return sorted;
}

CompositeScore composite(const EmbeddingStore& store, const JoinedDesign& design,
                         std::string_view pos_word, std::string_view neg_word,
                         std::string_view target) {
  const Vector pos = resolve_word(store, pos_word);
  const Vector neg = resolve_word(store, neg_word);
  const auto rows = design.rows_with(target);
  if (rows.size() < 4)
    throw Error("composite needs at least 4 entities with '" + std::string(target) + "'");

  CompositeScore out;
  out.pos_word = std::string(pos_word);
  out.neg_word = std::string(neg_word);
  const auto& col = design.column(target);
  for (const auto i : rows) {
    const Vector e = design.features.row(static_cast<Eigen::Index>(i)).transpose();
    out.names.push_back(design.names[i]);
    out.scores.push_back(cosine(e, pos) - cosine(e, neg));
    out.targets.push_back(*col[i]);
  }
  try {
    out.correlation = pearson(out.scores, out.targets);
  } catch (const Error& e) {
    throw Error("composite " + out.pos_word + "-" + out.neg_word +
                " has no defined correlation: " + e.what());
  }
  return out;
}

}  // namespace wordprobe
