#pragma once

#include "wordprobe/common.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wordprobe {

enum class EmbeddingFormat { glove_text, word2vec_binary };

enum class LookupMode { exact, phrase_then_average, average_only };

// lowercase: every token is lowercased before lookup.
// preserve: tokens are tried verbatim first, then lowercased.
enum class CasePolicy { lowercase, preserve };

struct LookupStrategy {
  LookupMode mode = LookupMode::phrase_then_average;
  CasePolicy case_policy = CasePolicy::lowercase;

  static LookupStrategy defaults_for(EmbeddingFormat format);
};

/// Immutable token -> vector table. Entry order is file order, which for the
/// common pretrained releases is descending corpus frequency.
///
/// Vectors are kept as float (the precision of both file formats) in one
/// contiguous row-major buffer.
class EmbeddingStore {
 public:
  /// Throws Error on a dimension mismatch, a duplicate token or a non-finite
  /// component.
  EmbeddingStore(std::size_t dimension, std::vector<std::string> tokens,
                 std::vector<float> values);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return tokens_.size(); }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }

  std::optional<std::size_t> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  std::span<const float> row(std::size_t i) const;
  Vector vector(std::size_t i) const;

 private:
  std::size_t dimension_;
  std::vector<std::string> tokens_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// `token v1 v2 ... vD` per line.
EmbeddingStore load_glove_text(const std::filesystem::path& path);

// Header `<count> <dim>\n`, then per record the token, a space, and `dim`
// little-endian float32 values, optionally followed by one newline.
EmbeddingStore load_word2vec_binary(const std::filesystem::path& path);

EmbeddingStore load_embeddings(const std::filesystem::path& path,
                               EmbeddingFormat format);

// Components are written with 12 significant digits.
void save_glove_text(const EmbeddingStore& store,
                     const std::filesystem::path& path);
void save_word2vec_binary(const EmbeddingStore& store,
                          const std::filesystem::path& path);

EmbeddingFormat parse_format(std::string_view name);
std::string_view format_name(EmbeddingFormat format);
LookupMode parse_lookup_mode(std::string_view name);
std::string_view lookup_mode_name(LookupMode mode);
CasePolicy parse_case_policy(std::string_view name);
std::string_view case_policy_name(CasePolicy policy);

/// Resolve an entity name (possibly several words) to a vector.
///
/// Words are split on whitespace. Averages are accumulated in store order of
/// the constituent tokens, so "a b" and "b a" give bitwise-identical results.
/// Returns nullopt when the token (exact) or any constituent (averaging
/// modes) is missing.
std::optional<Vector> lookup_entity(const EmbeddingStore& store,
                                    std::string_view name,
                                    const LookupStrategy& strategy);

// First k tokens in store order. Throws when k exceeds the store size.
std::vector<std::string> frequency_slice(const EmbeddingStore& store,
                                         std::size_t k);

std::string ascii_lower(std::string_view text);

}  // namespace wordprobe
