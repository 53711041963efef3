#include "wordprobe/stats.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wordprobe {

namespace {

struct Centered {
  std::vector<double> values;
  double sum_squares = 0.0;
};

Centered center(std::span<const double> v) {
  const double m = mean(v);
  Centered c;
  c.values.reserve(v.size());
  for (const double x : v) {
    c.values.push_back(x - m);
    c.sum_squares += (x - m) * (x - m);
  }
  return c;
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("correlation inputs differ in length");
  if (x.size() < 4) throw Error("correlation needs at least 4 observations");
}

double cross(const Centered& a, const Centered& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s;
}

double clamp_r(double r) { return std::clamp(r, -1.0, 1.0); }

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) throw Error("mean of an empty sequence");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (const double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto cx = center(x);
  const auto cy = center(y);
  if (!(cx.sum_squares > 0.0) || !(cy.sum_squares > 0.0))
    throw Error("correlation input has zero variance");
  return clamp_r(cross(cx, cy) / std::sqrt(cx.sum_squares * cy.sum_squares));
}

double pearson_p_value(double r, std::size_t n) {
  if (n < 3) throw Error("p-value needs at least 3 observations");
  const double df = static_cast<double>(n - 2);
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  // P(|T| >= |t|) with t^2 = df r^2 / (1 - r^2) equals I_{df/(df+t^2)}(df/2, 1/2),
  // and df / (df + t^2) simplifies to 1 - r^2.
  return boost::math::ibeta(df / 2.0, 0.5, 1.0 - r2);
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  Correlation c;
  c.r = pearson_r(x, y);
  c.n = x.size();
  c.p_value = pearson_p_value(c.r, c.n);
  return c;
}

double exact_permutation_p_value(std::span<const double> x,
                                 std::span<const double> y) {
  check_pair(x, y);
  if (x.size() > 12) throw Error("exact permutation enumeration is limited to n <= 12");
  const auto cx = center(x);
  const auto cy = center(y);
  if (!(cx.sum_squares > 0.0) || !(cy.sum_squares > 0.0))
    throw Error("correlation input has zero variance");
  const double observed = std::abs(cross(cx, cy));
  const double tolerance = 1e-12 * std::sqrt(cx.sum_squares * cy.sum_squares);

  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) s += cx.values[i] * cy.values[perm[i]];
    if (std::abs(s) >= observed - tolerance) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

double permutation_p_value(std::span<const double> x, std::span<const double> y,
                           std::size_t permutations, std::uint64_t seed) {
  check_pair(x, y);
  if (permutations == 0) throw Error("permutation test needs at least one permutation");
  const auto cx = center(x);
  auto cy = center(y);
  if (!(cx.sum_squares > 0.0) || !(cy.sum_squares > 0.0))
    throw Error("correlation input has zero variance");
  const double observed = std::abs(cross(cx, cy));
  const double tolerance = 1e-12 * std::sqrt(cx.sum_squares * cy.sum_squares);

  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::size_t m = 0; m < permutations; ++m) {
    rng.shuffle(cy.values);
    if (std::abs(cross(cx, cy)) >= observed - tolerance) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(permutations + 1);
}

}  // namespace wordprobe
