#pragma once

#include "wordprobe/dataset.hpp"
#include "wordprobe/embedding_store.hpp"
#include "wordprobe/ridge.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wordprobe {

struct SemanticCategory {
  std::string name;
  std::vector<std::string> words;

  // One word (or space-separated phrase) per line; `#` starts a comment.
  // The category is named after the file stem.
  static SemanticCategory load(const std::filesystem::path& path);
};

/// Orthonormal columns spanning directions to remove.
struct Subspace {
  Matrix basis;  // d x k
  std::string source;
  std::vector<double> explained_variance;  // PCA subspaces only, per column

  std::size_t dims() const { return static_cast<std::size_t>(basis.cols()); }
  std::size_t dimension() const { return static_cast<std::size_t>(basis.rows()); }
};

/// PCA of the centered category word vectors. Keeps the fewest leading
/// components whose cumulative explained variance reaches `var_threshold`,
/// capped at `max_dims`. Any unresolvable word is an error.
Subspace category_subspace(const EmbeddingStore& store,
                           const SemanticCategory& category,
                           const LookupStrategy& strategy,
                           double var_threshold = 0.9,
                           std::size_t max_dims = 20);

// Same, from already-resolved word vectors (one per row).
Subspace pca_subspace(const Matrix& word_vectors, std::string source,
                      double var_threshold = 0.9, std::size_t max_dims = 20);

/// Orthonormalized d x k standard normal draws (modified Gram-Schmidt, two
/// passes). Deterministic per seed.
Subspace random_subspace(std::size_t d, std::size_t k, std::uint64_t seed);

// X - X B B'.
Matrix ablate(const Matrix& features, const Subspace& subspace);

struct TargetAblation {
  std::string target;
  double baseline_r2 = 0.0;
  double ablated_r2 = 0.0;
  double delta_r2 = 0.0;  // baseline - ablated; positive = degradation
  double random_mean_delta = 0.0;
  double random_std_delta = 0.0;
  std::optional<double> z_score;  // nullopt when random_std_delta == 0
  std::vector<double> random_deltas;
  double lambda_baseline = 0.0;
  double lambda_ablated = 0.0;
};

struct AblationReport {
  std::string category;
  std::size_t dims = 0;  // nominal: sum of per-category dims when combined
  std::vector<std::string> components;  // categories applied, in order
  std::size_t effective_rank = 0;  // rank of the union of removed directions
  std::size_t n_random = 0;
  std::uint64_t master_seed = 0;
  std::vector<TargetAblation> targets;
};

struct AblationSettings {
  SplitSpec split;
  CvSpec cv;
  std::size_t n_random = 100;
  std::uint64_t master_seed = 0;
  Execution exec = Execution::parallel;
};

/// Baseline probe, probe on the design with `subspace` removed, and
/// `n_random` probes with random subspaces of the same dimensionality
/// (repeat i uses seed master_seed + i). Every probe re-runs lambda CV.
AblationReport ablation_experiment(const JoinedDesign& design,
                                   const std::vector<std::string>& targets,
                                   const Subspace& subspace,
                                   const AblationSettings& settings);

/// Removes each subspace in turn (no joint re-orthonormalization); the
/// random control is one random subspace of the summed dimensionality.
AblationReport combined_ablation(const JoinedDesign& design,
                                 const std::vector<std::string>& targets,
                                 const std::vector<Subspace>& subspaces,
                                 const AblationSettings& settings);

}  // namespace wordprobe
