#include "wordprobe/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace wordprobe {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_words(std::string_view name) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < name.size()) {
    const auto start = name.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = name.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = name.size();
    words.emplace_back(name.substr(start, end - start));
    pos = end;
  }
  return words;
}

}  // namespace

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

LookupStrategy LookupStrategy::defaults_for(EmbeddingFormat format) {
  if (format == EmbeddingFormat::word2vec_binary)
    return {LookupMode::phrase_then_average, CasePolicy::preserve};
  return {LookupMode::phrase_then_average, CasePolicy::lowercase};
}

EmbeddingStore::EmbeddingStore(std::size_t dimension,
                               std::vector<std::string> tokens,
                               std::vector<float> values)
    : dimension_(dimension), tokens_(std::move(tokens)), values_(std::move(values)) {
  if (dimension_ == 0) throw Error("embedding dimension must be positive");
  if (values_.size() != tokens_.size() * dimension_)
    throw Error("embedding buffer holds " + std::to_string(values_.size()) +
                " values, expected " +
                std::to_string(tokens_.size() * dimension_));
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second)
      throw ParseError("duplicate token '" + tokens_[i] + "' at entry " +
                           std::to_string(i + 1),
                       i + 1);
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw ParseError("non-finite component in entry " +
                           std::to_string(i / dimension_ + 1),
                       i / dimension_ + 1);
  }
}

std::optional<std::size_t> EmbeddingStore::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> EmbeddingStore::row(std::size_t i) const {
  if (i >= tokens_.size()) throw Error("embedding row out of range");
  return {values_.data() + i * dimension_, dimension_};
}

Vector EmbeddingStore::vector(std::size_t i) const {
  const auto r = row(i);
  Vector v(static_cast<Eigen::Index>(dimension_));
  for (std::size_t j = 0; j < dimension_; ++j) v[static_cast<Eigen::Index>(j)] = r[j];
  return v;
}

EmbeddingStore load_glove_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings file " + path.string());

  std::vector<std::string> tokens;
  std::vector<float> values;
  std::size_t dimension = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    while (!view.empty() && (view.back() == '\r' || view.back() == ' '))
      view.remove_suffix(1);
    if (view.empty()) continue;

    const auto space = view.find(' ');
    if (space == 0 || space == std::string_view::npos)
      throw ParseError("line " + std::to_string(line_no) + ": no vector values",
                       line_no);
    tokens.emplace_back(view.substr(0, space));

    std::size_t count = 0;
    const char* p = view.data() + space;
    const char* end = view.data() + view.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      float value = 0.0f;
      const auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc() || (next < end && *next != ' '))
        throw ParseError("line " + std::to_string(line_no) +
                             ": unparsable value in vector of '" +
                             tokens.back() + "'",
                         line_no);
      values.push_back(value);
      ++count;
      p = next;
    }
    if (dimension == 0) {
      dimension = count;
    } else if (count != dimension) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(dimension) + " values, found " +
                           std::to_string(count),
                       line_no);
    }
  }
  if (tokens.empty()) throw Error("embeddings file " + path.string() + " is empty");

  try {
    return EmbeddingStore(dimension, std::move(tokens), std::move(values));
  } catch (const ParseError& e) {
    // Entry numbers equal line numbers only when there are no blank lines,
    // which holds for every real release.
    throw ParseError(std::string(e.what()) + " in " + path.string(), e.location());
  }
}

EmbeddingStore load_word2vec_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embeddings file " + path.string());

  std::string header;
  if (!std::getline(in, header)) throw ParseError("missing word2vec header", 0);
  std::istringstream fields{std::string(trim(header))};
  long long count = -1;
  long long dimension = -1;
  std::string extra;
  if (!(fields >> count >> dimension) || (fields >> extra) || count < 0 ||
      dimension <= 0)
    throw ParseError("word2vec header must be '<vocab_count> <dimension>', got '" +
                         header + "'",
                     0);

  const auto n = static_cast<std::size_t>(count);
  const auto d = static_cast<std::size_t>(dimension);
  std::vector<std::string> tokens;
  tokens.reserve(n);
  std::vector<float> values(n * d);
  std::vector<char> raw(d * sizeof(float));

  for (std::size_t record = 0; record < n; ++record) {
    const auto truncated = [&] {
      return ParseError("word2vec file truncated at record " +
                            std::to_string(record + 1) + " of " + std::to_string(n),
                        record + 1);
    };
    std::string token;
    for (;;) {
      const int c = in.get();
      if (c == std::char_traits<char>::eof()) throw truncated();
      if (c == ' ') break;
      if (c == '\n' && token.empty()) continue;  // separator after a record
      token.push_back(static_cast<char>(c));
    }
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
      throw truncated();
    float* out = values.data() + record * d;
    for (std::size_t j = 0; j < d; ++j) {
      std::uint32_t bits = 0;
      std::memcpy(&bits, raw.data() + j * sizeof(float), sizeof bits);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
      std::memcpy(out + j, &bits, sizeof bits);
    }
    if (in.peek() == '\n') in.get();
    tokens.push_back(std::move(token));
  }
  return EmbeddingStore(d, std::move(tokens), std::move(values));
}

EmbeddingStore load_embeddings(const std::filesystem::path& path,
                               EmbeddingFormat format) {
  return format == EmbeddingFormat::glove_text ? load_glove_text(path)
                                               : load_word2vec_binary(path);
}

void save_glove_text(const EmbeddingStore& store,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[64];
  for (std::size_t i = 0; i < store.size(); ++i) {
    out << store.token(i);
    for (const float v : store.row(i)) {
      const auto res = std::to_chars(buf, buf + sizeof buf, static_cast<double>(v),
                                     std::chars_format::general, 12);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

void save_word2vec_binary(const EmbeddingStore& store,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << store.size() << ' ' << store.dimension() << '\n';
  for (std::size_t i = 0; i < store.size(); ++i) {
    out << store.token(i) << ' ';
    for (const float v : store.row(i)) {
      std::uint32_t bits = 0;
      std::memcpy(&bits, &v, sizeof bits);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    out << '\n';
  }
}

EmbeddingFormat parse_format(std::string_view name) {
  if (name == "glove-text") return EmbeddingFormat::glove_text;
  if (name == "word2vec-bin") return EmbeddingFormat::word2vec_binary;
  throw Error("unknown embedding format '" + std::string(name) +
              "' (expected glove-text or word2vec-bin)");
}

std::string_view format_name(EmbeddingFormat format) {
  return format == EmbeddingFormat::glove_text ? "glove-text" : "word2vec-bin";
}

LookupMode parse_lookup_mode(std::string_view name) {
  if (name == "exact") return LookupMode::exact;
  if (name == "phrase-then-average") return LookupMode::phrase_then_average;
  if (name == "average-only") return LookupMode::average_only;
  throw Error("unknown lookup mode '" + std::string(name) + "'");
}

std::string_view lookup_mode_name(LookupMode mode) {
  switch (mode) {
    case LookupMode::exact: return "exact";
    case LookupMode::phrase_then_average: return "phrase-then-average";
    case LookupMode::average_only: return "average-only";
  }
  return "";
}

CasePolicy parse_case_policy(std::string_view name) {
  if (name == "lowercase") return CasePolicy::lowercase;
  if (name == "preserve") return CasePolicy::preserve;
  throw Error("unknown case policy '" + std::string(name) + "'");
}

std::string_view case_policy_name(CasePolicy policy) {
  return policy == CasePolicy::lowercase ? "lowercase" : "preserve";
}

namespace {

std::optional<std::size_t> resolve_token(const EmbeddingStore& store,
                                         const std::string& token,
                                         CasePolicy policy) {
  if (policy == CasePolicy::preserve) {
    if (auto hit = store.find(token)) return hit;
  }
  return store.find(ascii_lower(token));
}

std::optional<Vector> average_of(const EmbeddingStore& store,
                                 const std::vector<std::string>& words,
                                 CasePolicy policy) {
  std::vector<std::size_t> rows;
  rows.reserve(words.size());
  for (const auto& w : words) {
    const auto hit = resolve_token(store, w, policy);
    if (!hit) return std::nullopt;
    rows.push_back(*hit);
  }
  std::sort(rows.begin(), rows.end());
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(store.dimension()));
  for (const auto r : rows) sum += store.vector(r);
  return sum / static_cast<double>(rows.size());
}

}  // namespace

std::optional<Vector> lookup_entity(const EmbeddingStore& store,
                                    std::string_view name,
                                    const LookupStrategy& strategy) {
  const auto words = split_words(name);
  if (words.empty()) throw Error("entity name is empty");

  switch (strategy.mode) {
    case LookupMode::exact: {
      std::string joined = words.front();
      for (std::size_t i = 1; i < words.size(); ++i) joined += ' ' + words[i];
      const auto hit = resolve_token(store, joined, strategy.case_policy);
      if (!hit) return std::nullopt;
      return store.vector(*hit);
    }
    case LookupMode::phrase_then_average: {
      std::string phrase = words.front();
      for (std::size_t i = 1; i < words.size(); ++i) phrase += '_' + words[i];
      if (const auto hit = resolve_token(store, phrase, strategy.case_policy))
        return store.vector(*hit);
      if (words.size() == 1) return std::nullopt;
      return average_of(store, words, strategy.case_policy);
    }
    case LookupMode::average_only:
      return average_of(store, words, strategy.case_policy);
  }
  return std::nullopt;
}

std::vector<std::string> frequency_slice(const EmbeddingStore& store,
                                         std::size_t k) {
  if (k == 0 || k > store.size())
    throw Error("frequency slice of " + std::to_string(k) + " tokens from a store of " +
                std::to_string(store.size()));
  return {store.tokens().begin(), store.tokens().begin() + static_cast<std::ptrdiff_t>(k)};
}

}  // namespace wordprobe
