#include "wordprobe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>

namespace wordprobe::kernels {

namespace {

constexpr Eigen::Index kWordBlock = 512;

void check_shapes(const Matrix& entities, const Matrix& words, const Vector& target) {
  if (entities.cols() != words.cols())
    throw Error("entity and word vectors differ in dimension");
  if (entities.rows() != target.size())
    throw Error("one target value per entity row is required");
  if (entities.rows() < 3) throw Error("similarity correlation needs at least 3 entities");
}

}  // namespace

Matrix normalize_rows(const Matrix& rows) {
  Matrix out = rows;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (!(norm > 0.0)) throw Error("cannot normalize a zero vector");
    out.row(i) /= norm;
  }
  return out;
}

std::vector<double> similarity_correlations(const Matrix& entities, const Matrix& words,
                                            const Vector& target) {
  check_shapes(entities, words, target);
  const Matrix unit_entities = normalize_rows(entities);
  const Vector centered_target = target.array() - target.mean();
  const double target_ss = centered_target.squaredNorm();
  if (!(target_ss > 0.0)) throw Error("target has zero variance");

  const Eigen::Index m = words.rows();
  std::vector<double> result(static_cast<std::size_t>(m));
  const Eigen::Index blocks = (m + kWordBlock - 1) / kWordBlock;
  std::string failure;

#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index begin = b * kWordBlock;
    const Eigen::Index count = std::min(kWordBlock, m - begin);
    Matrix block = words.middleRows(begin, count);
    bool zero_row = false;
    for (Eigen::Index j = 0; j < count; ++j) {
      const double norm = block.row(j).norm();
      if (!(norm > 0.0)) {
        zero_row = true;
        break;
      }
      block.row(j) /= norm;
    }
    if (zero_row) {
#pragma omp critical
      failure = "cannot normalize a zero vector";
      continue;
    }
    // n x count cosine similarities, centered per word.
    Matrix sims = unit_entities * block.transpose();
    sims.rowwise() -= sims.colwise().mean();
    const Eigen::RowVectorXd cov = centered_target.transpose() * sims;
    const Eigen::RowVectorXd ss = sims.colwise().squaredNorm();
    for (Eigen::Index j = 0; j < count; ++j) {
      const double denom = std::sqrt(ss[j] * target_ss);
      result[static_cast<std::size_t>(begin + j)] =
          denom > 0.0 ? std::clamp(cov[j] / denom, -1.0, 1.0)
                      : std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (!failure.empty()) throw Error(failure);
  return result;
}

Matrix project_out(const Matrix& rows, const Matrix& basis) {
  if (rows.cols() != basis.rows())
    throw Error("subspace dimension does not match the feature dimension");
  const Eigen::Index n = rows.rows();
  Matrix out(n, rows.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd coords = rows.row(i) * basis;
    out.row(i) = rows.row(i) - coords * basis.transpose();
  }
  return out;
}

namespace reference {

std::vector<double> similarity_correlations(const Matrix& entities, const Matrix& words,
                                            const Vector& target) {
  check_shapes(entities, words, target);
  const auto n = static_cast<std::size_t>(entities.rows());
  const auto d = static_cast<std::size_t>(entities.cols());
  const auto at = [](const Matrix& m, std::size_t r, std::size_t c) {
    return m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  };

  double target_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) target_mean += target[static_cast<Eigen::Index>(i)];
  target_mean /= static_cast<double>(n);

  std::vector<double> result;
  result.reserve(static_cast<std::size_t>(words.rows()));
  std::vector<double> sims(n);
  for (std::size_t j = 0; j < static_cast<std::size_t>(words.rows()); ++j) {
    double word_norm = 0.0;
    for (std::size_t k = 0; k < d; ++k) word_norm += at(words, j, k) * at(words, j, k);
    word_norm = std::sqrt(word_norm);
    if (!(word_norm > 0.0)) throw Error("cannot normalize a zero vector");
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      double entity_norm = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        dot += at(entities, i, k) * at(words, j, k);
        entity_norm += at(entities, i, k) * at(entities, i, k);
      }
      if (!(entity_norm > 0.0)) throw Error("cannot normalize a zero vector");
      sims[i] = dot / (std::sqrt(entity_norm) * word_norm);
    }
    double sim_mean = 0.0;
    for (const double s : sims) sim_mean += s;
    sim_mean /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = sims[i] - sim_mean;
      const double b = target[static_cast<Eigen::Index>(i)] - target_mean;
      sxy += a * b;
      sxx += a * a;
      syy += b * b;
    }
    if (!(syy > 0.0)) throw Error("target has zero variance");
    result.push_back(sxx > 0.0 ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0)
                               : std::numeric_limits<double>::quiet_NaN());
  }
  return result;
}

Matrix project_out(const Matrix& rows, const Matrix& basis) {
  if (rows.cols() != basis.rows())
    throw Error("subspace dimension does not match the feature dimension");
  Matrix out = rows;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      double coord = 0.0;
      for (Eigen::Index k = 0; k < rows.cols(); ++k) coord += rows(i, k) * basis(k, c);
      for (Eigen::Index k = 0; k < rows.cols(); ++k) out(i, k) -= coord * basis(k, c);
    }
  }
  return out;
}

}  // namespace reference

}  // namespace wordprobe::kernels
