#pragma once

#include "wordprobe/common.hpp"
#include "wordprobe/dataset.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wordprobe {

/// Ridge regression with an unpenalized intercept: y ~ w'x + b.
struct RidgeModel {
  Vector weights;
  double intercept = 0.0;
  double lambda = 0.0;
  Vector feature_means;
  double target_mean = 0.0;

  Vector predict(const Matrix& features) const;
};

/// Fits on column-centered data, so the intercept is mean(y) - w'mean(X).
/// The SPD system (Xc'Xc + lambda I) w = Xc'yc is Cholesky-factored directly
/// when n >= d; when n < d the equivalent n x n system
/// (Xc Xc' + lambda I) a = yc is solved and w = Xc'a.
RidgeModel ridge_fit(const Matrix& features, const Vector& targets,
                     double lambda);

// `count` log-uniform values from lo to hi inclusive.
std::vector<double> log_lambda_grid(double lo, double hi, std::size_t count);

struct CvSpec {
  std::size_t folds = 5;
  std::vector<double> lambda_grid = log_lambda_grid(1e-2, 1e3, 8);
  std::uint64_t seed = 0;
};

// Row positions 0..n-1 shuffled by `seed` and cut into `folds` contiguous
// groups; the first n % folds groups get one extra row.
std::vector<std::vector<std::size_t>> cv_folds(std::size_t n, std::size_t folds,
                                               std::uint64_t seed);

struct CvResult {
  double lambda = 0.0;
  std::vector<double> mean_mse;  // aligned with the grid
};

/// Mean validation MSE per grid value over one fixed fold assignment; the
/// smallest lambda wins ties.
CvResult cross_validate_lambda(const Matrix& features, const Vector& targets,
                               const CvSpec& spec);

struct Evaluation {
  std::optional<double> r2;  // nullopt when the test targets have no variance
  double mae = 0.0;
};

// R^2 against the test-set mean; negative means worse than that constant.
Evaluation evaluate(const Vector& actual, const Vector& predicted);
Evaluation evaluate(const RidgeModel& model, const Matrix& features,
                    const Vector& targets);

struct ProbeResult {
  std::string target;
  double lambda = 0.0;
  std::optional<double> r2;
  double mae = 0.0;
  SplitSpec split;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<std::size_t> test_rows;  // design row indices
  std::vector<double> actual;
  std::vector<double> predicted;
  std::vector<double> cv_mean_mse;
};

/// Split the design's rows, choose lambda by CV on the training side, refit
/// on the full training side and score the test side. Rows missing `target`
/// are dropped from both sides of the shared split.
ProbeResult probe_target(const JoinedDesign& design, std::string_view target,
                         const SplitSpec& split, const CvSpec& cv);

struct StabilitySweep {
  std::vector<ProbeResult> runs;
  double mean_r2 = 0.0;
  double min_r2 = 0.0;
};

// Run i uses seed first_seed + i for both the split and the CV folds.
StabilitySweep stability_sweep(const JoinedDesign& design,
                               std::string_view target, std::size_t n_seeds,
                               std::uint64_t first_seed, double test_fraction,
                               const CvSpec& cv,
                               Execution exec = Execution::parallel);

}  // namespace wordprobe
