#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "proxyens/bo.hpp"
#include "proxyens/table.hpp"

namespace proxyens {

// Fraction of the objective's top-T that also sits in the score's top-T:
//   |{a : R_m(a) <= T and R_f(a) <= T}| / T
double precision_at_t(const Ranking& rank_m, const Ranking& rank_f, int T);

// Expected best objective rank when walking a metric's top-T, assuming the
// precision*T hits are placed uniformly: (T + 1) / (precision * T + 1).
// Requires precision > 0 and precision * T integral.
double expected_best_rank(int T, double precision);

// Expected minimum of m uniform draws without replacement from ranks
// 1..n: (n + 1) / (m + 1).
double min_rank_expectation(int n, int m);

struct RegretCurve {
  std::vector<double> cumulative;  // one entry per trace step
  double reference_precision = 0.0;
};

// Cumulative precision gap of the trace's weights against a sampled-optimal
// reference: the reference precision is the max over ref_samples uniform
// weights, every trace weight, and all one-hot weights, so each per-step gap
// is non-negative.
RegretCurve empirical_regret(const SearchTrace& trace,
                             const BenchmarkTable& table, int T,
                             int ref_samples, std::uint64_t seed);

enum class AblationMode { raw, rank_uniform, rank_normal };

// Returns a table ready for combine() without min-max scaling:
//   raw          - metric values untouched
//   rank_uniform - column replaced by N - rank (best architecture gets N-1)
//   rank_normal  - column replaced by sorted standard-normal draws assigned
//                  by rank (best gets the largest draw); seeded per column
BenchmarkTable ablation_transform(const BenchmarkTable& table,
                                  AblationMode mode, std::uint64_t seed = 0);

struct PrecisionReport {
  int T = 0;
  double precision = 0.0;
  std::optional<double> expected_rank;  // defined iff precision > 0
  std::optional<double> spearman;       // undefined for constant scores
  std::optional<double> pearson;
};

PrecisionReport make_precision_report(std::span<const double> scores,
                                      std::span<const double> objective,
                                      int T);

}  // namespace proxyens
