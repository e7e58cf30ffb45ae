// Microbenchmarks for the hot paths: ranking, metric combination, GP
// fitting/prediction and a small end-to-end search.

#include <benchmark/benchmark.h>

#include <vector>

#include "proxyens/bo.hpp"
#include "proxyens/ensemble.hpp"
#include "proxyens/exploit.hpp"
#include "proxyens/gp.hpp"
#include "proxyens/rng.hpp"
#include "proxyens/synth.hpp"
#include "proxyens/table.hpp"

using namespace proxyens;

namespace {

BenchmarkTable make_table(std::size_t n, std::size_t m) {
  SynthSpec spec;
  spec.genes = 6;
  spec.cardinality = 5;  // 15625-point genome space covers every size used
  return normalize_metrics(synth_benchmark(12345, n, m, spec));
}

std::vector<double> random_column(std::size_t n) {
  Rng rng(7);
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

void BM_rank_by(benchmark::State& state) {
  const auto col = random_column(std::size_t(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_by(col));
  }
}
BENCHMARK(BM_rank_by)->Arg(1024)->Arg(4096)->Arg(15625);

void BM_combine(benchmark::State& state) {
  const auto table = make_table(std::size_t(state.range(0)), 6);
  const WeightVector w(std::vector<double>{0.9, -0.3, 0.5, 0.1, -0.7, 0.2});
  for (auto _ : state) {
    benchmark::DoNotOptimize(combine(table, w));
  }
}
BENCHMARK(BM_combine)->Arg(1024)->Arg(4096)->Arg(15625);

std::pair<std::vector<WeightVector>, std::vector<double>> gp_data(
    std::size_t n, std::size_t dim) {
  Rng rng(11);
  std::vector<WeightVector> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> w(dim);
    for (double& v : w) v = rng.uniform(-1.0, 1.0);
    xs.push_back(WeightVector(std::move(w)));
    ys.push_back(rng.normal());
  }
  return {std::move(xs), std::move(ys)};
}

void BM_gp_fit_grid(benchmark::State& state) {
  const auto [xs, ys] = gp_data(std::size_t(state.range(0)), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gp::fit(xs, ys));
  }
}
BENCHMARK(BM_gp_fit_grid)->Arg(16)->Arg(50)->Arg(100);

void BM_gp_predict_batch(benchmark::State& state) {
  const auto [xs, ys] = gp_data(50, 6);
  const gp::GPState gps = gp::fit(xs, ys);
  const auto [queries, unused] = gp_data(std::size_t(state.range(0)), 6);
  std::vector<double> means, vars;
  for (auto _ : state) {
    gp::predict_batch(gps, queries, means, vars);
    benchmark::DoNotOptimize(means.data());
  }
}
BENCHMARK(BM_gp_predict_batch)->Arg(1024)->Arg(4096);

void BM_hybrid_search(benchmark::State& state) {
  const auto table = make_table(1024, 6);
  for (auto _ : state) {
    BOConfig cfg;
    cfg.budget = int(state.range(0));
    cfg.seed = 1;
    benchmark::DoNotOptimize(run_hybrid_search(table, cfg));
  }
}
BENCHMARK(BM_hybrid_search)->Unit(benchmark::kMillisecond)->Arg(10)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
