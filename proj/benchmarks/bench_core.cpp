#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "bbl/besov.hpp"
#include "bbl/harness.hpp"
#include "bbl/instances.hpp"
#include "bbl/rng.hpp"
#include "bbl/strategies.hpp"
#include "bbl/wavelet.hpp"

namespace {

bbl::BesovParams params(int dim) {
  bbl::BesovParams bp;
  bp.sigma = 1.5;
  bp.p = 2.0;
  bp.q = 2.0;
  bp.L = 1.0;
  bp.dim = dim;
  return bp;
}

void BM_eval_function(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int max_level = static_cast<int>(state.range(1));
  const bbl::CoefficientFunction f =
      bbl::sample_besov_ball(params(dim), max_level, 1.0, 7);
  bbl::RngStream rng(11);
  std::vector<double> x(dim);
  for (auto _ : state) {
    for (int i = 0; i < dim; ++i) x[i] = rng.next_uniform();
    benchmark::DoNotOptimize(f.eval(x));
  }
}
BENCHMARK(BM_eval_function)->Args({1, 8})->Args({2, 5})->Args({3, 3});

void BM_besov_norm(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int max_level = static_cast<int>(state.range(1));
  const bbl::BesovParams bp = params(dim);
  const bbl::CoefficientFunction f = bbl::sample_besov_ball(bp, max_level, 1.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(bbl::besov_norm(f, bp));
}
BENCHMARK(BM_besov_norm)->Args({1, 10})->Args({2, 6});

void BM_haar_analyze(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  bbl::RngStream rng(3);
  std::vector<double> samples(static_cast<std::size_t>(1) << level);
  for (double& s : samples) s = rng.next_uniform();
  for (auto _ : state)
    benchmark::DoNotOptimize(bbl::haar_analyze(samples, 1, level));
}
BENCHMARK(BM_haar_analyze)->Arg(8)->Arg(12)->Arg(16);

void BM_episode(benchmark::State& state) {
  const std::int64_t T = state.range(0);
  bbl::InstanceSpec spec;
  spec.kind = "tent-peak";
  spec.dim = 1;
  spec.tent_s = 1.0;
  spec.tent_L = 1.0;
  spec.noise = bbl::NoiseModel::gaussian(0.1);
  const bbl::ObjectiveInstance instance = bbl::make_instance(spec, 0);
  for (auto _ : state) {
    auto strategy = bbl::make_ucb_discretization(1, 1.0, 0.1, T);
    benchmark::DoNotOptimize(bbl::run_episode(*strategy, instance, T, 42));
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_episode)->Arg(1 << 10)->Arg(1 << 14);

}  // namespace

BENCHMARK_MAIN();
