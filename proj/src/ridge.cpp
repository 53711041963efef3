#include "wordprobe/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wordprobe {

namespace {

void require_finite(const Matrix& features, const Vector& targets) {
  if (!features.allFinite()) throw Error("features contain NaN or Inf");
  if (!targets.allFinite()) throw Error("targets contain NaN or Inf");
}

// Centered data plus the Gram matrix of whichever side is smaller, so that
// one CV fold can be solved for every lambda after a single O(n d min(n,d))
// product.
class RidgeSystem {
 public:
  RidgeSystem(const Matrix& features, const Vector& targets)
      : means_(features.colwise().mean().transpose()),
        target_mean_(targets.mean()),
        centered_(features.rowwise() - means_.transpose()),
        centered_y_(targets.array() - target_mean_),
        primal_(features.rows() >= features.cols()) {
    if (primal_) {
      gram_ = centered_.transpose() * centered_;
      rhs_ = centered_.transpose() * centered_y_;
    } else {
      gram_ = centered_ * centered_.transpose();
      rhs_ = centered_y_;
    }
  }

  RidgeModel solve(double lambda) const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw Error("ridge lambda must be positive and finite");
    Matrix system = gram_;
    system.diagonal().array() += lambda;
    const Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success)
      throw Error("ridge system is not positive definite");
    Vector solution = llt.solve(rhs_);
    // One round of iterative refinement.
    const Vector residual = rhs_ - system * solution;
    solution += llt.solve(residual);

    RidgeModel model;
    model.lambda = lambda;
    model.weights = primal_ ? solution : Vector(centered_.transpose() * solution);
    model.feature_means = means_;
    model.target_mean = target_mean_;
    model.intercept = target_mean_ - model.weights.dot(means_);
    return model;
  }

 private:
  Vector means_;
  double target_mean_;
  Matrix centered_;
  Vector centered_y_;
  bool primal_;
  Matrix gram_;
  Vector rhs_;
};

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Vector take(const Vector& v, const std::vector<std::size_t>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(rows[i])];
  return out;
}

}  // namespace

Vector RidgeModel::predict(const Matrix& features) const {
  if (features.cols() != weights.size())
    throw Error("feature dimension does not match the model");
  return (features * weights).array() + intercept;
}

RidgeModel ridge_fit(const Matrix& features, const Vector& targets, double lambda) {
  if (features.rows() != targets.size())
    throw Error("features and targets disagree on the number of rows");
  if (features.rows() < 2) throw Error("ridge fit needs at least 2 rows");
  require_finite(features, targets);
  return RidgeSystem(features, targets).solve(lambda);
}

std::vector<double> log_lambda_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0)
    throw Error("lambda grid needs 0 < lo <= hi and a positive count");
  if (count == 1) {
    if (lo != hi) throw Error("a one-point lambda grid needs lo == hi");
    return {lo};
  }
  if (lo == hi) throw Error("lambda grid endpoints must differ for count > 1");
  std::vector<double> grid(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) /
                                     static_cast<double>(count - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<std::vector<std::size_t>> cv_folds(std::size_t n, std::size_t folds,
                                               std::uint64_t seed) {
  if (folds < 2) throw Error("cross-validation needs at least 2 folds");
  if (n < folds)
    throw Error("cross-validation with " + std::to_string(folds) + " folds needs at least " +
                std::to_string(folds) + " rows, got " + std::to_string(n));
  const auto order = random_permutation(n, seed);
  std::vector<std::vector<std::size_t>> out(folds);
  const std::size_t base = n / folds;
  const std::size_t extra = n % folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                  order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(out[f].begin(), out[f].end());
    pos += size;
  }
  return out;
}

CvResult cross_validate_lambda(const Matrix& features, const Vector& targets,
                               const CvSpec& spec) {
  if (spec.lambda_grid.empty()) throw Error("lambda grid is empty");
  for (std::size_t i = 0; i < spec.lambda_grid.size(); ++i) {
    if (!(spec.lambda_grid[i] > 0.0)) throw Error("lambda grid values must be positive");
    if (i > 0 && !(spec.lambda_grid[i] > spec.lambda_grid[i - 1]))
      throw Error("lambda grid must be strictly ascending");
  }
  if (features.rows() != targets.size())
    throw Error("features and targets disagree on the number of rows");
  require_finite(features, targets);

  const auto n = static_cast<std::size_t>(features.rows());
  const auto folds = cv_folds(n, spec.folds, spec.seed);
  std::vector<double> total(spec.lambda_grid.size(), 0.0);

  std::vector<char> in_fold(n);
  for (const auto& held_out : folds) {
    std::fill(in_fold.begin(), in_fold.end(), 0);
    for (const auto i : held_out) in_fold[i] = 1;
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < n; ++i)
      if (!in_fold[i]) train.push_back(i);
    if (train.size() < 2) throw Error("a CV training fold has fewer than 2 rows");

    const RidgeSystem system(take_rows(features, train), take(targets, train));
    const Matrix val_x = take_rows(features, held_out);
    const Vector val_y = take(targets, held_out);
    for (std::size_t l = 0; l < spec.lambda_grid.size(); ++l) {
      const auto model = system.solve(spec.lambda_grid[l]);
      total[l] += (val_y - model.predict(val_x)).squaredNorm() /
                  static_cast<double>(held_out.size());
    }
  }

  CvResult result;
  result.mean_mse.resize(total.size());
  std::size_t best = 0;
  for (std::size_t l = 0; l < total.size(); ++l) {
    result.mean_mse[l] = total[l] / static_cast<double>(folds.size());
    if (result.mean_mse[l] < result.mean_mse[best]) best = l;
  }
  result.lambda = spec.lambda_grid[best];
  return result;
}

Evaluation evaluate(const Vector& actual, const Vector& predicted) {
  if (actual.size() == 0) throw Error("cannot evaluate on an empty test set");
  if (actual.size() != predicted.size())
    throw Error("actual and predicted lengths differ");
  const double mean = actual.mean();
  const double ss_tot = (actual.array() - mean).square().sum();
  const double ss_res = (actual - predicted).squaredNorm();
  Evaluation e;
  e.mae = (actual - predicted).cwiseAbs().mean();
  if (ss_tot > 0.0) e.r2 = 1.0 - ss_res / ss_tot;
  return e;
}

Evaluation evaluate(const RidgeModel& model, const Matrix& features,
                    const Vector& targets) {
  return evaluate(targets, model.predict(features));
}

ProbeResult probe_target(const JoinedDesign& design, std::string_view target,
                         const SplitSpec& split_spec, const CvSpec& cv) {
  const auto t = design.target_index(target);
  const auto& column = design.columns[t];
  const auto available = design.rows_with(target);
  if (available.size() < 10)
    throw Error("target '" + std::string(target) + "' has only " +
                std::to_string(available.size()) + " rows with values (need 10)");

  const auto split = train_test_split(design.rows(), split_spec);
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  for (const auto i : split.train)
    if (column[i]) train.push_back(i);
  for (const auto i : split.test)
    if (column[i]) test.push_back(i);
  if (test.empty())
    throw Error("no test rows with a value for '" + std::string(target) + "'");

  const Vector y_all = [&] {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(design.rows()));
    for (const auto i : available) v[static_cast<Eigen::Index>(i)] = *column[i];
    return v;
  }();
  const Matrix x_train = take_rows(design.features, train);
  const Vector y_train = take(y_all, train);
  const Matrix x_test = take_rows(design.features, test);
  const Vector y_test = take(y_all, test);

  const auto cv_result = cross_validate_lambda(x_train, y_train, cv);
  const auto model = ridge_fit(x_train, y_train, cv_result.lambda);
  const Vector predicted = model.predict(x_test);
  const auto eval = evaluate(y_test, predicted);

  ProbeResult result;
  result.target = std::string(target);
  result.lambda = cv_result.lambda;
  result.r2 = eval.r2;
  result.mae = eval.mae;
  result.split = split_spec;
  result.n_train = train.size();
  result.n_test = test.size();
  result.test_rows = test;
  result.actual.assign(y_test.data(), y_test.data() + y_test.size());
  result.predicted.assign(predicted.data(), predicted.data() + predicted.size());
  result.cv_mean_mse = cv_result.mean_mse;
  return result;
}

StabilitySweep stability_sweep(const JoinedDesign& design, std::string_view target,
                               std::size_t n_seeds, std::uint64_t first_seed,
                               double test_fraction, const CvSpec& cv,
                               Execution exec) {
  if (n_seeds == 0) throw Error("stability sweep needs at least one seed");
  StabilitySweep sweep;
  sweep.runs.resize(n_seeds);
  std::vector<std::string> errors(n_seeds);

  const auto run = [&](std::size_t i) {
    try {
      CvSpec run_cv = cv;
      run_cv.seed = first_seed + i;
      sweep.runs[i] = probe_target(design, target, {test_fraction, first_seed + i}, run_cv);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(n_seeds);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) run(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) run(static_cast<std::size_t>(i));
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);

  double sum = 0.0;
  sweep.min_r2 = std::numeric_limits<double>::infinity();
  for (const auto& r : sweep.runs) {
    if (!r.r2) throw Error("stability sweep hit a test split with constant targets");
    sum += *r.r2;
    sweep.min_r2 = std::min(sweep.min_r2, *r.r2);
  }
  sweep.mean_r2 = sum / static_cast<double>(n_seeds);
  return sweep;
}

}  // namespace wordprobe
