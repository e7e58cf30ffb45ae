#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracle_helpers.hpp"
#include "proxyens/ensemble.hpp"
#include "proxyens/synth.hpp"
#include "proxyens/table.hpp"

using namespace proxyens;

namespace {

BenchmarkTable normalized_table() {
  BenchmarkTable t;
  t.arch_ids = {"a", "b", "c", "d"};
  t.metric_names = {"m0", "m1"};
  t.metrics = {{0.0, 1.0, 0.5, 0.25}, {1.0, 0.0, 0.75, 0.5}};
  t.available = {1, 1};
  t.objective = {0.1, 0.9, 0.5, 0.3};
  t.normalized = true;
  return t;
}

}  // namespace

TEST_CASE("WeightVector clamps and validates") {
  const WeightVector w(std::vector<double>{2.0, -3.0, 0.25});
  CHECK(w[0] == 1.0);
  CHECK(w[1] == -1.0);
  CHECK(w[2] == 0.25);
  CHECK(w.size() == 3);
  CHECK_THROWS_AS(WeightVector(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(WeightVector(std::vector<double>{std::nan("")}),
                  std::invalid_argument);

  const WeightVector e1 = WeightVector::one_hot(3, 1);
  CHECK(e1.values() == std::vector<double>{0.0, 1.0, 0.0});
  const WeightVector neg = WeightVector::one_hot(2, 0, -1.0);
  CHECK(neg.values() == std::vector<double>{-1.0, 0.0});
  CHECK_THROWS_AS(WeightVector::one_hot(2, 5), std::invalid_argument);
}

TEST_CASE("combine computes weighted scores and ranking") {
  const BenchmarkTable t = normalized_table();

  SUBCASE("one-hot weight reproduces the single metric ranking") {
    for (std::size_t i = 0; i < 2; ++i) {
      const CombinedMetric cm = combine(t, WeightVector::one_hot(2, i));
      CHECK(cm.ranking.rank == rank_by(t.metrics[i]).rank);
      CHECK(cm.scores == t.metrics[i]);
    }
  }

  SUBCASE("all-zero weights give identity ranking by tie-break") {
    const CombinedMetric cm = combine(t, WeightVector(std::vector<double>{0.0, 0.0}));
    CHECK(cm.scores == std::vector<double>{0.0, 0.0, 0.0, 0.0});
    CHECK(cm.ranking.rank == std::vector<int>{1, 2, 3, 4});
  }

  SUBCASE("dot product example") {
    BenchmarkTable one = t;
    one.arch_ids = {"a"};
    one.metrics = {{0.2}, {0.8}};
    one.objective = {0.5};
    const CombinedMetric cm =
        combine(one, WeightVector(std::vector<double>{0.5, 0.5}));
    CHECK(cm.scores[0] == doctest::Approx(0.5).epsilon(1e-15));
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(combine(t, WeightVector(std::vector<double>{1.0})),
                    std::invalid_argument);
    BenchmarkTable raw = t;
    raw.normalized = false;
    CHECK_THROWS_AS(combine(raw, WeightVector(std::vector<double>{1.0, 0.0})),
                    std::invalid_argument);
  }

  SUBCASE("unavailable columns are skipped and weights shrink to match") {
    BenchmarkTable masked = t;
    masked.available = {0, 1};
    const CombinedMetric cm =
        combine(masked, WeightVector(std::vector<double>{1.0}));
    CHECK(cm.scores == masked.metrics[1]);
  }
}

TEST_CASE("combine is linear in the weights") {
  const BenchmarkTable t = normalized_table();
  const WeightVector w1(std::vector<double>{0.3, -0.2});
  const WeightVector w2(std::vector<double>{0.4, 0.5});
  const WeightVector sum(std::vector<double>{0.7, 0.3});
  const auto s1 = combine(t, w1).scores;
  const auto s2 = combine(t, w2).scores;
  const auto s = combine(t, sum).scores;
  for (std::size_t a = 0; a < s.size(); ++a) {
    CHECK(s[a] == doctest::Approx(s1[a] + s2[a]).epsilon(1e-12));
  }
}

TEST_CASE("argmax_arch picks rank one with index tie-break") {
  const BenchmarkTable t = normalized_table();
  CombinedMetric cm = combine(t, WeightVector::one_hot(2, 0));
  CHECK(argmax_arch(cm) == 1);  // metric 0 peaks at arch b

  cm.scores = {0.9, 0.1, 0.9, 0.3};
  cm.ranking = rank_by(cm.scores);
  CHECK(argmax_arch(cm) == 0);  // tie at 0 and 2 -> lower index
}

TEST_CASE("argmax invariance under positive scaling") {
  const BenchmarkTable t = normalized_table();
  const WeightVector w(std::vector<double>{0.35, -0.15});
  const WeightVector scaled(std::vector<double>{0.70, -0.30});
  CHECK(argmax_arch(combine(t, w)) == argmax_arch(combine(t, scaled)));
}

TEST_CASE("pearson agrees with the direct-summation oracle") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1, 3, 2, 4};
  const double r = pearson(x, y);
  CHECK(r == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-14));
  CHECK(r == doctest::Approx(0.8).epsilon(1e-14));

  CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<double> neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
  CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(pearson(x, y) == pearson(y, x));
}

TEST_CASE("pearson rejects constant input") {
  const std::vector<double> c{2.0, 2.0, 2.0};
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK_THROWS_AS((void)pearson(c, x), std::domain_error);
  CHECK_THROWS_AS((void)pearson(x, c), std::domain_error);
  CHECK_THROWS_AS((void)pearson(x, std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("pearson stays within the unit interval") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = oracle::random_triple(seed, 15);
    CHECK(std::abs(pearson(t.m1, t.m2)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("spearman endpoints and oracle") {
  const std::vector<double> x{0.1, 0.4, 0.7, 0.9, 1.4};
  std::vector<double> inc(x.size()), dec(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    inc[i] = std::exp(x[i]);   // strictly increasing in x
    dec[i] = -std::exp(x[i]);  // strictly decreasing
  }
  CHECK(spearman(x, inc) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(spearman(x, dec) == doctest::Approx(-1.0).epsilon(1e-14));

  const auto triple = oracle::random_triple(21, 10);
  std::vector<double> rx, ry;
  for (int r : rank_by(triple.m1).rank) rx.push_back(double(r));
  for (int r : rank_by(triple.m2).rank) ry.push_back(double(r));
  CHECK(spearman(triple.m1, triple.m2) ==
        doctest::Approx(pearson(rx, ry)).epsilon(1e-14));
}

TEST_CASE("optimal_pairwise_weight on an orthogonal design") {
  // unit-variance, zero-mean, uncorrelated metric pair
  const std::vector<double> m1{1, 1, -1, -1};
  const std::vector<double> m2{1, -1, 1, -1};
  std::vector<double> f(4);
  for (std::size_t i = 0; i < 4; ++i) f[i] = 2.0 * m1[i] + 3.0 * m2[i];
  const double a = optimal_pairwise_weight(m1, m2, f);
  CHECK(a == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  std::vector<double> combo(4);
  for (std::size_t i = 0; i < 4; ++i) combo[i] = a * m1[i] + m2[i];
  CHECK(pearson(combo, f) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("optimal_pairwise_weight degenerate cases") {
  const auto t = oracle::random_triple(3, 12);
  // m1 identical to the target: no improving combination exists
  CHECK_THROWS_AS((void)optimal_pairwise_weight(t.f, t.m2, t.f),
                  std::domain_error);
}

TEST_CASE("pairwise combination beats the grid oracle on seed 7") {
  const auto t = oracle::random_triple(7, 20);
  const PairwiseCombination best = best_pairwise_combination(t.m1, t.m2, t.f);
  const double grid = oracle::grid_best_correlation(t.m1, t.m2, t.f);
  CHECK(best.correlation >= grid - 1e-6);
}

TEST_CASE("pairwise combination property suite") {
  int strict = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto t = oracle::random_triple(seed, 20);
    PairwiseCombination best;
    try {
      best = best_pairwise_combination(t.m1, t.m2, t.f);
    } catch (const std::domain_error&) {
      continue;  // degenerate draw
    }
    ++total;
    const double r1 = std::abs(pearson(t.m1, t.f));
    const double r2 = std::abs(pearson(t.m2, t.f));
    const double single = std::max(r1, r2);
    CHECK(best.correlation >= single - 1e-9);
    CHECK(best.correlation <= 1.0 + 1e-12);
    if (best.correlation > single + 1e-12) ++strict;
  }
  REQUIRE(total >= 190);
  CHECK(strict > total / 2);
}
