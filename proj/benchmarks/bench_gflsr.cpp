#include <benchmark/benchmark.h>

#include "gflsr/experiments.hpp"
#include "gflsr/fit.hpp"
#include "gflsr/inference.hpp"
#include "gflsr/simulate.hpp"

using namespace gflsr;

namespace {

Dataset make_data(Index n, std::uint64_t seed) {
  const ModelParams params = sim2_params(seed);
  NoiseSpec noise;
  noise.sigma_x_sq = 1.0;
  noise.sigma_y_sq = 1.0;
  noise.sigma1_sq = params.sigma1_sq;
  return simulate_pls(params, n, noise, seed, Variant::PlsSvd).first;
}

}  // namespace

static void BM_LeadingSingularPair(benchmark::State& state) {
  const Index dim = state.range(0);
  Rng rng(7);
  Matrix c(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) c(i, j) = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(leading_singular_pair(c, 1e-12, 10000));
  }
}
BENCHMARK(BM_LeadingSingularPair)->Arg(10)->Arg(50)->Arg(200);

static void BM_SimulatePls(benchmark::State& state) {
  const ModelParams params = sim2_params(3);
  NoiseSpec noise;
  noise.sigma_x_sq = 1.0;
  noise.sigma_y_sq = 1.0;
  noise.sigma1_sq = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_pls(params, state.range(0), noise, 5));
  }
}
BENCHMARK(BM_SimulatePls)->Arg(1000)->Arg(10000);

static void BM_FitPls(benchmark::State& state) {
  const Dataset data = make_data(state.range(0), 11);
  FitConfig cfg;
  cfg.H = 3;
  cfg.variant = Variant::PlsSvd;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_pls(data, cfg));
  }
}
BENCHMARK(BM_FitPls)->Arg(1000)->Arg(10000);

static void BM_ResidualBootstrap(benchmark::State& state) {
  const Dataset data = make_data(500, 13);
  FitConfig cfg;
  cfg.H = 3;
  cfg.variant = Variant::PlsSvd;
  const FitResult fit = fit_pls(data, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(residual_bootstrap(fit, state.range(0), 17));
  }
}
BENCHMARK(BM_ResidualBootstrap)->Arg(20)->Arg(100);

BENCHMARK_MAIN();
