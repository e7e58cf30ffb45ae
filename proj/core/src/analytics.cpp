#include "proxyens/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "proxyens/ensemble.hpp"
#include "proxyens/rng.hpp"

namespace proxyens {

double precision_at_t(const Ranking& rank_m, const Ranking& rank_f, int T) {
  const std::size_t n = rank_f.rank.size();
  if (rank_m.rank.size() != n) {
    throw std::invalid_argument("precision_at_t: ranking size mismatch");
  }
  if (T < 1 || static_cast<std::size_t>(T) > n) {
    throw std::invalid_argument("precision_at_t: T outside [1, N]");
  }
  int hits = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (rank_m.rank[a] <= T && rank_f.rank[a] <= T) ++hits;
  }
  return double(hits) / double(T);
}

double expected_best_rank(int T, double precision) {
  if (T < 1) throw std::invalid_argument("expected_best_rank: T < 1");
  if (precision == 0.0) {
    throw std::domain_error("expected_best_rank: undefined at precision 0");
  }
  if (!(precision > 0.0 && precision <= 1.0)) {
    throw std::invalid_argument("expected_best_rank: precision outside (0, 1]");
  }
  const double hits = precision * double(T);
  if (std::abs(hits - std::round(hits)) > 1e-9 * double(T)) {
    throw std::invalid_argument(
        "expected_best_rank: precision * T is not an integer count");
  }
  return double(T + 1) / (hits + 1.0);
}

double min_rank_expectation(int n, int m) {
  if (m < 1 || m > n) {
    throw std::invalid_argument("min_rank_expectation: need 1 <= m <= n");
  }
  return double(n + 1) / double(m + 1);
}

RegretCurve empirical_regret(const SearchTrace& trace,
                             const BenchmarkTable& table, int T,
                             int ref_samples, std::uint64_t seed) {
  if (ref_samples < 0) {
    throw std::invalid_argument("empirical_regret: negative ref_samples");
  }
  const Ranking rank_f = objective_ranking(table);
  const std::size_t dim = table.available_count();

  auto precision_of = [&](const WeightVector& w) {
    return precision_at_t(combine(table, w).ranking, rank_f, T);
  };

  std::vector<double> step_precision;
  step_precision.reserve(trace.steps.size());
  double ref = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    ref = std::max(ref, precision_of(WeightVector::one_hot(dim, i)));
  }
  for (const TraceStep& s : trace.steps) {
    step_precision.push_back(precision_of(s.w));
    ref = std::max(ref, step_precision.back());
  }
  Rng rng(seed);
  for (int i = 0; i < ref_samples; ++i) {
    std::vector<double> w(dim);
    for (double& v : w) v = rng.uniform(-1.0, 1.0);
    ref = std::max(ref, precision_of(WeightVector(std::move(w))));
  }

  RegretCurve curve;
  curve.reference_precision = ref;
  double cum = 0.0;
  for (double p : step_precision) {
    cum += ref - p;
    curve.cumulative.push_back(cum);
  }
  return curve;
}

BenchmarkTable ablation_transform(const BenchmarkTable& table,
                                  AblationMode mode, std::uint64_t seed) {
  table.validate();
  BenchmarkTable t = table;
  const std::size_t n = t.arch_count();
  for (std::size_t m = 0; m < t.metrics.size(); ++m) {
    if (!t.available[m]) continue;
    auto& col = t.metrics[m];
    if (mode == AblationMode::raw) continue;
    const Ranking r = rank_by(col);
    if (mode == AblationMode::rank_uniform) {
      for (std::size_t a = 0; a < n; ++a) {
        col[a] = double(n - static_cast<std::size_t>(r.rank[a]));
      }
    } else {
      Rng rng(derive_seed(seed, m));
      std::vector<double> draws(n);
      for (double& d : draws) d = rng.normal();
      std::sort(draws.begin(), draws.end());
      for (std::size_t a = 0; a < n; ++a) {
        col[a] = draws[n - static_cast<std::size_t>(r.rank[a])];
      }
    }
  }
  t.normalized = true;  // columns are combine-ready as-is in every mode
  return t;
}

PrecisionReport make_precision_report(std::span<const double> scores,
                                      std::span<const double> objective,
                                      int T) {
  PrecisionReport rep;
  rep.T = T;
  const Ranking rm = rank_by(scores);
  const Ranking rf = rank_by(objective);
  rep.precision = precision_at_t(rm, rf, T);
  if (rep.precision > 0.0) {
    rep.expected_rank = expected_best_rank(T, rep.precision);
  }
  try {
    rep.spearman = spearman(scores, objective);
    rep.pearson = pearson(scores, objective);
  } catch (const std::domain_error&) {
    // constant inputs leave the correlations undefined
  }
  return rep;
}

}  // namespace proxyens
