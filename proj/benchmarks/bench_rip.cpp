#include <benchmark/benchmark.h>

#include "slowkill/rip.hpp"
#include "slowkill/synthetic.hpp"

using namespace slowkill;

namespace {

void BM_EstimateRip(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n = 500;
  spec.p = state.range(0);
  spec.s = 4;
  spec.tau = 0.5;
  spec.seed = 3;
  Eigen::MatrixXd x = gen_design(spec);
  RipEstimator est(x);
  const Index s = state.range(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.estimate(s, 200, 1));
  }
}

}  // namespace

BENCHMARK(BM_EstimateRip)->Args({500, 8})->Args({1000, 16})->Args({1000, 48})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
