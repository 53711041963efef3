#include "wordprobe/ablation.hpp"

#include "wordprobe/kernels.hpp"
#include "wordprobe/stats.hpp"

#include <cmath>

namespace wordprobe {

namespace {

std::size_t matrix_rank(const Matrix& columns) {
  if (columns.cols() == 0) return 0;
  const Eigen::BDCSVD<Matrix> svd(columns);
  const auto& s = svd.singularValues();
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > 1e-8 * s[0]) ++rank;
  return rank;
}

double defined_r2(const ProbeResult& result, const std::string& what) {
  if (!result.r2)
    throw Error(what + ": test targets have zero variance, R^2 undefined");
  return *result.r2;
}

struct ProbeSet {
  std::vector<double> r2;
  std::vector<double> lambda;
};

ProbeSet probe_all(const JoinedDesign& design, const std::vector<std::string>& targets,
                   const AblationSettings& settings, const std::string& what) {
  ProbeSet out;
  for (const auto& t : targets) {
    const auto result = probe_target(design, t, settings.split, settings.cv);
    out.r2.push_back(defined_r2(result, what + " (" + t + ")"));
    out.lambda.push_back(result.lambda);
  }
  return out;
}

// Shared tail of the single and combined experiments: baseline, the given
// ablated features, and n_random controls of `random_dims` dimensions.
AblationReport run_experiment(const JoinedDesign& design,
                              const std::vector<std::string>& targets,
                              const Matrix& ablated_features, std::size_t random_dims,
                              const AblationSettings& settings, AblationReport report) {
  if (targets.empty()) throw Error("ablation needs at least one target");
  const auto d = static_cast<std::size_t>(design.features.cols());

  const auto baseline = probe_all(design, targets, settings, "baseline probe");
  const auto ablated = probe_all(design.with_features(ablated_features), targets, settings,
                                 "ablated probe");

  const std::size_t n_random = settings.n_random;
  std::vector<std::vector<double>> random_r2(n_random);
  std::vector<std::string> errors(n_random);
  const auto repeat = [&](std::size_t i) {
    try {
      const auto sub = random_subspace(d, random_dims, settings.master_seed + i);
      const auto probed = probe_all(design.with_features(ablate(design.features, sub)),
                                    targets, settings, "random control");
      random_r2[i] = probed.r2;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(n_random);
  if (settings.exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) repeat(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) repeat(static_cast<std::size_t>(i));
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);

  report.n_random = n_random;
  report.master_seed = settings.master_seed;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    TargetAblation row;
    row.target = targets[t];
    row.baseline_r2 = baseline.r2[t];
    row.ablated_r2 = ablated.r2[t];
    row.delta_r2 = row.baseline_r2 - row.ablated_r2;
    row.lambda_baseline = baseline.lambda[t];
    row.lambda_ablated = ablated.lambda[t];
    for (std::size_t i = 0; i < n_random; ++i)
      row.random_deltas.push_back(row.baseline_r2 - random_r2[i][t]);
    if (!row.random_deltas.empty()) {
      row.random_mean_delta = mean(row.random_deltas);
      row.random_std_delta = sample_stddev(row.random_deltas);
    }
    if (row.random_std_delta > 0.0)
      row.z_score = (row.delta_r2 - row.random_mean_delta) / row.random_std_delta;
    report.targets.push_back(std::move(row));
  }
  return report;
}

}  // namespace

SemanticCategory SemanticCategory::load(const std::filesystem::path& path) {
  SemanticCategory category;
  category.name = path.stem().string();
  category.words = read_word_list(path);
  if (category.words.empty()) throw Error("category file " + path.string() + " is empty");
  return category;
}

Subspace pca_subspace(const Matrix& word_vectors, std::string source, double var_threshold,
                      std::size_t max_dims) {
  if (word_vectors.rows() < 2) throw Error("PCA needs at least 2 word vectors");
  if (!(var_threshold > 0.0 && var_threshold <= 1.0))
    throw Error("variance threshold must lie in (0, 1]");
  if (max_dims == 0) throw Error("max_dims must be positive");

  const Matrix centered = word_vectors.rowwise() - word_vectors.colwise().mean();
  const Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const Vector variance = svd.singularValues().array().square();
  const double total = variance.sum();
  if (!(total > 0.0) || !(svd.singularValues()[0] > 1e-12))
    throw Error("category '" + source + "' has zero variance");

  std::size_t k = 0;
  double cumulative = 0.0;
  const double needed = var_threshold * total * (1.0 - 1e-12);
  while (k < static_cast<std::size_t>(variance.size()) && cumulative < needed)
    cumulative += variance[static_cast<Eigen::Index>(k++)];
  k = std::min(k, max_dims);

  Subspace sub;
  sub.basis = svd.matrixV().leftCols(static_cast<Eigen::Index>(k));
  // Fix column signs so the basis is reproducible across SVD backends.
  for (Eigen::Index c = 0; c < sub.basis.cols(); ++c) {
    Eigen::Index arg = 0;
    sub.basis.col(c).cwiseAbs().maxCoeff(&arg);
    if (sub.basis(arg, c) < 0.0) sub.basis.col(c) *= -1.0;
  }
  sub.source = std::move(source);
  for (std::size_t i = 0; i < k; ++i)
    sub.explained_variance.push_back(variance[static_cast<Eigen::Index>(i)] / total);
  return sub;
}

Subspace category_subspace(const EmbeddingStore& store, const SemanticCategory& category,
                           const LookupStrategy& strategy, double var_threshold,
                           std::size_t max_dims) {
  std::vector<Vector> vectors;
  std::string missing;
  for (const auto& word : category.words) {
    auto v = lookup_entity(store, word, strategy);
    if (!v) {
      missing += (missing.empty() ? "" : ", ") + word;
      continue;
    }
    vectors.push_back(std::move(*v));
  }
  if (!missing.empty())
    throw Error("category '" + category.name + "' has words missing from the store: " +
                missing);
  if (vectors.size() < 2)
    throw Error("category '" + category.name + "' needs at least 2 words");

  Matrix m(static_cast<Eigen::Index>(vectors.size()),
           static_cast<Eigen::Index>(store.dimension()));
  for (std::size_t i = 0; i < vectors.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
  return pca_subspace(m, category.name, var_threshold, max_dims);
}

Subspace random_subspace(std::size_t d, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > d)
    throw Error("random subspace needs 1 <= k <= d, got k=" + std::to_string(k) +
                " d=" + std::to_string(d));
  Rng rng(seed);
  Matrix q(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
  for (Eigen::Index c = 0; c < q.cols(); ++c)
    for (Eigen::Index r = 0; r < q.rows(); ++r) q(r, c) = rng.normal();

  // Modified Gram-Schmidt, run twice so orthogonality holds to working
  // precision even for nearly dependent draws.
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index p = 0; p < c; ++p) q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
    }
    const double norm = q.col(c).norm();
    if (!(norm > 1e-10)) throw Error("random draw was numerically dependent");
    q.col(c) /= norm;
  }

  Subspace sub;
  sub.basis = std::move(q);
  sub.source = "random:" + std::to_string(seed);
  return sub;
}

Matrix ablate(const Matrix& features, const Subspace& subspace) {
  if (static_cast<std::size_t>(features.cols()) != subspace.dimension())
    throw Error("cannot ablate a " + std::to_string(subspace.dimension()) +
                "-dimensional subspace from " + std::to_string(features.cols()) +
                "-dimensional features");
  return kernels::project_out(features, subspace.basis);
}

AblationReport ablation_experiment(const JoinedDesign& design,
                                   const std::vector<std::string>& targets,
                                   const Subspace& subspace,
                                   const AblationSettings& settings) {
  AblationReport report;
  report.category = subspace.source;
  report.dims = subspace.dims();
  report.components = {subspace.source};
  report.effective_rank = subspace.dims();
  return run_experiment(design, targets, ablate(design.features, subspace), subspace.dims(),
                        settings, std::move(report));
}

AblationReport combined_ablation(const JoinedDesign& design,
                                 const std::vector<std::string>& targets,
                                 const std::vector<Subspace>& subspaces,
                                 const AblationSettings& settings) {
  if (subspaces.size() < 2) throw Error("combined ablation needs at least 2 categories");
  const auto d = static_cast<std::size_t>(design.features.cols());

  AblationReport report;
  report.category = "combined";
  std::size_t total = 0;
  for (const auto& s : subspaces) {
    total += s.dims();
    report.components.push_back(s.source);
  }
  if (total > d)
    throw Error("combined ablation removes " + std::to_string(total) +
                " dimensions from a " + std::to_string(d) + "-dimensional space");
  report.dims = total;

  Matrix stacked(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(total));
  Eigen::Index offset = 0;
  Matrix features = design.features;
  for (const auto& s : subspaces) {
    features = ablate(features, s);
    stacked.middleCols(offset, s.basis.cols()) = s.basis;
    offset += s.basis.cols();
  }
  report.effective_rank = matrix_rank(stacked);
  return run_experiment(design, targets, features, total, settings, std::move(report));
}

}  // namespace wordprobe
