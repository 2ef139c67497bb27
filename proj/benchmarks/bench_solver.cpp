#include <benchmark/benchmark.h>

#include "slowkill/solver.hpp"
#include "slowkill/synthetic.hpp"

using namespace slowkill;

namespace {

struct Scenario {
  Problem pb;
  SolverConfig cfg;
};

Scenario make_scenario(Index n, Index p, Index s) {
  SyntheticSpec spec;
  spec.n = n;
  spec.p = p;
  spec.s = s;
  spec.tau = 0.9;
  spec.cov = CovKind::Toeplitz;
  spec.sigma = 1.0;
  spec.seed = 7;
  Scenario sc;
  sc.pb.X = gen_design(spec);
  sc.pb.y = gen_response(sc.pb.X, spec.effective_beta(), spec.model, spec.sigma, spec.seed);
  sc.cfg.q = static_cast<Index>(1.5 * static_cast<double>(s));
  sc.cfg.eta0 = 50.0;
  sc.cfg.schedule.T = 100;
  sc.cfg.refit = true;
  return sc;
}

void BM_SlowKillFit(benchmark::State& state) {
  Scenario sc = make_scenario(state.range(0), state.range(1), 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(sc.pb, sc.cfg));
  }
}

void BM_IhtFit(benchmark::State& state) {
  Scenario sc = make_scenario(state.range(0), state.range(1), 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iht_baseline(sc.pb, sc.cfg.q, 300));
  }
}

void BM_SingleStep(benchmark::State& state) {
  Scenario sc = make_scenario(state.range(0), state.range(1), 10);
  for (auto _ : state) {
    Solver solver(sc.pb, sc.cfg);
    solver.step();
    benchmark::DoNotOptimize(solver.state().rho);
  }
}

}  // namespace

BENCHMARK(BM_SlowKillFit)->Args({150, 1000})->Args({150, 5000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IhtFit)->Args({150, 1000})->Args({150, 5000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingleStep)->Args({150, 5000})->Args({500, 2000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
