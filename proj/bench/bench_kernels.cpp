// Serial reference vs OpenMP kernels at GloVe-like sizes: 86 entities,
// 300 dimensions, vocabulary slices of a few thousand words.

#include "wordprobe/ablation.hpp"
#include "wordprobe/kernels.hpp"
#include "wordprobe/ridge.hpp"

#include <benchmark/benchmark.h>

namespace {

using wordprobe::Matrix;
using wordprobe::Vector;

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  wordprobe::Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

void BM_SimilarityCorrelations_Reference(benchmark::State& state) {
  const Matrix entities = gaussian(86, 300, 1);
  const Matrix words = gaussian(state.range(0), 300, 2);
  const Vector target = gaussian(86, 1, 3).col(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        wordprobe::kernels::reference::similarity_correlations(entities, words, target));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimilarityCorrelations_Parallel(benchmark::State& state) {
  const Matrix entities = gaussian(86, 300, 1);
  const Matrix words = gaussian(state.range(0), 300, 2);
  const Vector target = gaussian(86, 1, 3).col(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        wordprobe::kernels::similarity_correlations(entities, words, target));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ProjectOut_Reference(benchmark::State& state) {
  const Matrix x = gaussian(state.range(0), 300, 4);
  const auto sub = wordprobe::random_subspace(300, 20, 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(wordprobe::kernels::reference::project_out(x, sub.basis));
}

void BM_ProjectOut_Parallel(benchmark::State& state) {
  const Matrix x = gaussian(state.range(0), 300, 4);
  const auto sub = wordprobe::random_subspace(300, 20, 5);
  for (auto _ : state) benchmark::DoNotOptimize(wordprobe::kernels::project_out(x, sub.basis));
}

void BM_CrossValidateLambda(benchmark::State& state) {
  const Matrix x = gaussian(state.range(0), 300, 6);
  const Vector y = gaussian(state.range(0), 1, 7).col(0);
  const wordprobe::CvSpec cv;
  for (auto _ : state) benchmark::DoNotOptimize(wordprobe::cross_validate_lambda(x, y, cv));
}

}  // namespace

BENCHMARK(BM_SimilarityCorrelations_Reference)->Arg(2000)->Arg(17000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimilarityCorrelations_Parallel)->Arg(2000)->Arg(17000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProjectOut_Reference)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ProjectOut_Parallel)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CrossValidateLambda)->Arg(80)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
