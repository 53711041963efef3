#pragma once

#include "wordprobe/common.hpp"

#include <cstdint>
#include <span>

namespace wordprobe {

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;  // two-sided
  std::size_t n = 0;
};

// Requires n >= 4 and nonzero variance in both inputs.
Correlation pearson(std::span<const double> x, std::span<const double> y);

double pearson_r(std::span<const double> x, std::span<const double> y);

// Two-sided p for H0: rho = 0 from the t statistic with n-2 degrees of
// freedom, via the regularized incomplete beta function.
double pearson_p_value(double r, std::size_t n);

// Fraction of all n! pairings with |r| >= |r_observed|. n <= 12.
double exact_permutation_p_value(std::span<const double> x,
                                 std::span<const double> y);

// Monte Carlo version with the +1 correction: (hits + 1) / (m + 1).
double permutation_p_value(std::span<const double> x, std::span<const double> y,
                           std::size_t permutations, std::uint64_t seed);

double mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator).
double sample_stddev(std::span<const double> values);

}  // namespace wordprobe
