#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracle_helpers.hpp"
#include "proxyens/analytics.hpp"
#include "proxyens/bo.hpp"
#include "proxyens/ensemble.hpp"
#include "proxyens/synth.hpp"
#include "proxyens/table.hpp"

using namespace proxyens;

TEST_CASE("precision examples") {
  const Ranking a{{1, 2, 3, 4}};
  CHECK(precision_at_t(a, a, 1) == 1.0);
  CHECK(precision_at_t(a, a, 4) == 1.0);

  const Ranking rev{{4, 3, 2, 1}};
  CHECK(precision_at_t(a, rev, 2) == 0.0);

  const Ranking m{{1, 2, 3, 4, 5, 6}};
  const Ranking f{{2, 4, 1, 3, 6, 5}};
  CHECK(precision_at_t(m, f, 3) == doctest::Approx(2.0 / 3.0));

  CHECK(precision_at_t(m, f, 3) == precision_at_t(f, m, 3));  // symmetry
  CHECK_THROWS_AS(precision_at_t(m, f, 0), std::invalid_argument);
  CHECK_THROWS_AS(precision_at_t(m, f, 7), std::invalid_argument);
  CHECK_THROWS_AS(precision_at_t(a, f, 2), std::invalid_argument);
}

TEST_CASE("expected_best_rank formula") {
  CHECK(expected_best_rank(5, 1.0) == 1.0);
  CHECK(expected_best_rank(100, 1.0) == 1.0);
  CHECK(expected_best_rank(10, 0.5) == doctest::Approx(11.0 / 6.0));
  CHECK_THROWS_AS(expected_best_rank(10, 0.0), std::domain_error);
  CHECK_THROWS_AS(expected_best_rank(10, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(expected_best_rank(10, 0.55), std::invalid_argument);
  CHECK_THROWS_AS(expected_best_rank(0, 0.5), std::invalid_argument);
}

TEST_CASE("expected_best_rank matches the Monte-Carlo placement oracle") {
  const int T = 10;
  const double precision = 0.3;
  const auto mc = oracle::mc_min_rank(T, int(precision * T + 0.5), 100000, 99);
  const double exact = expected_best_rank(T, precision);
  CHECK(std::abs(exact - mc.mean) <= 4.0 * mc.se);
}

TEST_CASE("min_rank_expectation closed form and oracle") {
  CHECK(min_rank_expectation(7, 7) == 1.0);
  CHECK(min_rank_expectation(3, 1) == 2.0);
  CHECK(min_rank_expectation(10, 3) == doctest::Approx(2.75));
  CHECK(min_rank_expectation(10, 3) ==
        doctest::Approx(oracle::exhaustive_min_rank_mean(10, 3))
            .epsilon(1e-13));
  CHECK(min_rank_expectation(9, 1) == 5.0);  // (n+1)/2
  CHECK_THROWS_AS(min_rank_expectation(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(min_rank_expectation(3, 0), std::invalid_argument);
}

TEST_CASE("the two expectation formulas coincide") {
  for (int T : {5, 10, 50}) {
    for (int hits = 1; hits <= T; ++hits) {
      const double rho = double(hits) / double(T);
      CHECK(expected_best_rank(T, rho) ==
            doctest::Approx(min_rank_expectation(T, hits)).epsilon(1e-13));
    }
  }
}

TEST_CASE("empirical regret curve properties") {
  const BenchmarkTable t = normalize_metrics(synth_benchmark(3, 64, 3));
  BOConfig cfg;
  cfg.budget = 10;
  cfg.seed = 1;
  cfg.candidate_count = 32;
  const BOResult res = run_bo(t, cfg);
  const RegretCurve curve = empirical_regret(res.trace, t, 16, 50, 7);

  REQUIRE(curve.cumulative.size() == res.trace.steps.size());
  double prev = 0.0;
  for (double c : curve.cumulative) {
    const double inc = c - prev;
    CHECK(inc >= -1e-12);
    CHECK(inc <= curve.reference_precision + 1e-12);
    prev = c;
  }
  CHECK(curve.reference_precision >= 0.0);
  CHECK(curve.reference_precision <= 1.0);
}

TEST_CASE("a trace that attains the reference has zero regret") {
  // One perfect metric: its one-hot weight reaches precision 1.0, the
  // highest possible, so the reference equals the step precision.
  SynthSpec spec;
  spec.signal = {1.0};
  spec.noise = 0.0;
  const BenchmarkTable t = normalize_metrics(synth_benchmark(5, 48, 1, spec));
  SearchTrace trace;
  trace.steps.push_back({1, WeightVector::one_hot(1, 0), 0, 0.0, true});
  trace.steps.push_back({2, WeightVector::one_hot(1, 0), 0, 0.0, false});
  const RegretCurve curve = empirical_regret(trace, t, 8, 20, 3);
  CHECK(curve.reference_precision == 1.0);
  for (double c : curve.cumulative) CHECK(c == 0.0);
}

TEST_CASE("single step regret arithmetic") {
  // Metric 0 has some mid precision; the reference includes better weights.
  const BenchmarkTable t = normalize_metrics(synth_benchmark(7, 32, 2));
  SearchTrace trace;
  trace.steps.push_back({1, WeightVector::one_hot(2, 1), 0, 0.0, true});
  const RegretCurve curve = empirical_regret(trace, t, 8, 100, 5);
  const Ranking rf = objective_ranking(t);
  const double step =
      precision_at_t(combine(t, WeightVector::one_hot(2, 1)).ranking, rf, 8);
  REQUIRE(curve.cumulative.size() == 1);
  CHECK(curve.cumulative[0] ==
        doctest::Approx(curve.reference_precision - step).epsilon(1e-13));
}

TEST_CASE("ablation rank_uniform example") {
  BenchmarkTable t;
  t.arch_ids = {"a", "b", "c"};
  t.metric_names = {"m"};
  t.metrics = {{0.1, 0.9, 0.5}};
  t.available = {1};
  t.objective = {1.0, 2.0, 3.0};
  const BenchmarkTable u = ablation_transform(t, AblationMode::rank_uniform);
  CHECK(u.metrics[0] == std::vector<double>{0.0, 2.0, 1.0});
  CHECK(u.normalized);
}

TEST_CASE("every ablation mode preserves column rankings") {
  const BenchmarkTable t = synth_benchmark(11, 40, 3);
  for (AblationMode mode : {AblationMode::raw, AblationMode::rank_uniform,
                            AblationMode::rank_normal}) {
    const BenchmarkTable u = ablation_transform(t, mode, 4);
    for (std::size_t m = 0; m < t.metrics.size(); ++m) {
      CHECK(spearman(u.metrics[m], t.metrics[m]) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("raw mode keeps values untouched") {
  const BenchmarkTable t = synth_benchmark(13, 24, 2);
  const BenchmarkTable u = ablation_transform(t, AblationMode::raw);
  CHECK(u.metrics == t.metrics);
  CHECK(u.normalized);
}

TEST_CASE("rank_normal is seed-deterministic") {
  const BenchmarkTable t = synth_benchmark(17, 24, 2);
  const BenchmarkTable a = ablation_transform(t, AblationMode::rank_normal, 5);
  const BenchmarkTable b = ablation_transform(t, AblationMode::rank_normal, 5);
  const BenchmarkTable c = ablation_transform(t, AblationMode::rank_normal, 6);
  CHECK(a.metrics == b.metrics);
  CHECK(a.metrics != c.metrics);
  // per-column streams differ
  CHECK(a.metrics[0] != a.metrics[1]);
}

TEST_CASE("precision report bundles the rank statistics") {
  const BenchmarkTable t = synth_benchmark(19, 64, 1);
  const auto rep = make_precision_report(t.objective, t.objective, 10);
  CHECK(rep.precision == 1.0);
  REQUIRE(rep.expected_rank.has_value());
  CHECK(*rep.expected_rank == 1.0);
  REQUIRE(rep.spearman.has_value());
  CHECK(*rep.spearman == doctest::Approx(1.0));
  REQUIRE(rep.pearson.has_value());
  CHECK(*rep.pearson == doctest::Approx(1.0));
}

TEST_CASE("precision report with constant scores leaves correlations unset") {
  const std::vector<double> scores(20, 0.5);
  std::vector<double> objective(20);
  for (std::size_t i = 0; i < 20; ++i) objective[i] = double(i);
  const auto rep = make_precision_report(scores, objective, 5);
  CHECK_FALSE(rep.spearman.has_value());
  CHECK_FALSE(rep.pearson.has_value());
  // constant scores rank by index, so the top-5 are architectures 0..4 while
  // the objective's top-5 are 15..19: no overlap
  CHECK(rep.precision == 0.0);
  CHECK_FALSE(rep.expected_rank.has_value());
}
