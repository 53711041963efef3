#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace wordprobe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `location` is a 1-based line or record number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}
  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

// Loops that have both an OpenMP and a plain serial path.
enum class Execution { serial, parallel };

// Seeded generator with a portable shuffle. std::shuffle and
// std::uniform_int_distribution are implementation-defined, so index draws go
// through bounded() to keep splits identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t bounded(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(bounded(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// 0, 1, ..., n-1 in a seeded uniformly random order.
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

}  // namespace wordprobe
