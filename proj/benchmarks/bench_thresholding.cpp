#include <benchmark/benchmark.h>

#include <random>

#include "slowkill/rng.hpp"
#include "slowkill/thresholding.hpp"

using namespace slowkill;

namespace {

Eigen::VectorXd random_vector(Index p) {
  auto eng = make_engine(1234);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(p);
  for (Index i = 0; i < p; ++i) v[i] = nd(eng);
  return v;
}

void BM_QuantileThreshold(benchmark::State& state) {
  const Index p = state.range(0);
  const Index q = p / 10;
  Eigen::VectorXd v = random_vector(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantile_threshold(v, q, 0.5));
  }
  state.SetItemsProcessed(state.iterations() * p);
}

void BM_GroupQuantileThreshold(benchmark::State& state) {
  const Index p = state.range(0);
  const Index m = 4;
  auto eng = make_engine(99);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd s(p, m);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < m; ++j) s(i, j) = nd(eng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(group_quantile_threshold(s, p / 10, 0.5));
  }
  state.SetItemsProcessed(state.iterations() * p * m);
}

}  // namespace

BENCHMARK(BM_QuantileThreshold)->Arg(10000)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_GroupQuantileThreshold)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
