// Cost of one objective-plus-gradient evaluation as the class count and the
// data dimension grow, and of the pairwise distance kernels.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "sqfa/distances.hpp"
#include "sqfa/random.hpp"
#include "sqfa/trainer.hpp"

namespace {

using namespace sqfa;

Matrix random_spd(Rng& rng, Index n) {
  const Matrix a = rng.standard_normal(n, n);
  Matrix out = a * a.transpose() / static_cast<double>(n);
  out.diagonal().array() += 0.5;
  return out;
}

ClassEnsemble make_ensemble(Index n, int c, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Index> counts(static_cast<std::size_t>(c), 100);
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (int i = 0; i < c; ++i) {
    means.push_back(0.5 * rng.standard_normal(n, 1));
    covs.push_back(random_spd(rng, n));
  }
  return ClassEnsemble::from_moments(n, counts, means, covs);
}

void run_step(benchmark::State& state, Index n, int c, Index m, DistanceKind kind) {
  const ClassEnsemble ens = make_ensemble(n, c, 7);
  TrainConfig cfg;
  cfg.kind = kind;
  cfg.m = m;
  cfg.sigma2 = 0.01;
  Rng rng(3);
  const Matrix f = normalize_columns(rng.standard_normal(n, m));
  for (auto _ : state) {
    ObjectiveValue v = objective_with_gradient(f, ens, cfg);
    benchmark::DoNotOptimize(v.value);
  }
}

// Pair term dominates: small n, growing c.
void BM_StepVsClasses(benchmark::State& state) {
  run_step(state, 8, static_cast<int>(state.range(0)), 8, DistanceKind::FisherRaoCalvoOller);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StepVsClasses)->RangeMultiplier(2)->Range(10, 80)->Complexity(benchmark::oNSquared);

// Projection term dominates: few classes, growing n.
void BM_StepVsDim(benchmark::State& state) {
  run_step(state, state.range(0), 2, 8, DistanceKind::FisherRaoCalvoOller);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StepVsDim)->RangeMultiplier(2)->Range(50, 400)->Complexity(benchmark::oNSquared);

// The mixed regime from the performance envelope (n = 200, c = 20, m = 8).
void BM_StepReferenceScale(benchmark::State& state) {
  const auto kind = static_cast<DistanceKind>(state.range(0));
  run_step(state, 200, 20, 8, kind);
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_StepReferenceScale)->DenseRange(0, 3);

void BM_AffineInvariantGradient(benchmark::State& state) {
  Rng rng(11);
  const Index m = state.range(0);
  const SpdMatrix a(random_spd(rng, m));
  const SpdMatrix b(random_spd(rng, m));
  for (auto _ : state) {
    auto g = affine_invariant_gradient(a, b);
    benchmark::DoNotOptimize(g.distance);
  }
}
BENCHMARK(BM_AffineInvariantGradient)->RangeMultiplier(2)->Range(2, 16);

}  // namespace

BENCHMARK_MAIN();
