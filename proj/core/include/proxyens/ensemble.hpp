#pragma once

#include <span>
#include <vector>

#include "proxyens/table.hpp"

namespace proxyens {

// Point in the weight search space [-1, 1]^M. Components are clamped into
// the box at construction; non-finite components are rejected.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> w);
  static WeightVector one_hot(std::size_t dim, std::size_t index,
                              double sign = 1.0);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& values() const { return w_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> w_;
};

// Weighted sum of the available metric columns plus its induced ranking.
struct CombinedMetric {
  WeightVector weights;
  std::vector<double> scores;  // scores[a] = sum_i w_i * metric_i[a]
  Ranking ranking;
};

// Requires a normalized table and one weight per available metric column.
CombinedMetric combine(const BenchmarkTable& table, const WeightVector& w);

// Architecture holding rank 1 under the combined scores.
int argmax_arch(const CombinedMetric& cm);

// Population (1/N) moments throughout. Either input being constant makes
// the correlation undefined and throws.
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of the tie-broken rank vectors.
double spearman(std::span<const double> x, std::span<const double> y);

// Closed-form ratio a such that a*m1 + m2 is a stationary point of the
// correlation with f:
//   a = (Cov[m2,f] Cov[m1,m2] - Cov[m1,f] Var[m2]) /
//       (Cov[m1,f] Cov[m1,m2] - Cov[m2,f] Var[m1])
// A vanishing numerator or denominator means no improving combination
// exists and throws a degenerate-combination error.
double optimal_pairwise_weight(std::span<const double> m1,
                               std::span<const double> m2,
                               std::span<const double> f);

// The stationary ratio fixes |correlation| only up to sign and may be beaten
// by m1 alone, so all arrangements +-(a*m1 + m2) and +-m1 are evaluated and
// the best is returned.
struct PairwiseCombination {
  double a = 0.0;        // stationary ratio from optimal_pairwise_weight
  double sign = 1.0;     // applied to the chosen score vector
  bool use_pair = true;  // false = m1 alone won
  double correlation = 0.0;
};
PairwiseCombination best_pairwise_combination(std::span<const double> m1,
                                              std::span<const double> m2,
                                              std::span<const double> f);

}  // namespace proxyens
