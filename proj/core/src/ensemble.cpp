#include "proxyens/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace proxyens {

namespace {

void check_same_size(std::span<const double> x, std::span<const double> y,
                     const char* who) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument(std::string(who) + ": length mismatch");
  }
}

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / double(x.size());
}

double covariance(std::span<const double> x, std::span<const double> y) {
  const double mx = mean_of(x), my = mean_of(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / double(x.size());
}

}  // namespace

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw std::invalid_argument("WeightVector: empty");
  for (double& v : w_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("WeightVector: non-finite component");
    }
    v = std::clamp(v, -1.0, 1.0);
  }
}

WeightVector WeightVector::one_hot(std::size_t dim, std::size_t index,
                                   double sign) {
  if (index >= dim) throw std::invalid_argument("one_hot: index out of range");
  std::vector<double> w(dim, 0.0);
  w[index] = sign;
  return WeightVector(std::move(w));
}

CombinedMetric combine(const BenchmarkTable& table, const WeightVector& w) {
  if (!table.normalized) {
    throw std::invalid_argument("combine: table not normalized");
  }
  const auto avail = table.available_indices();
  if (w.size() != avail.size()) {
    throw std::invalid_argument("combine: weight length != available metrics");
  }
  CombinedMetric cm;
  cm.weights = w;
  cm.scores.assign(table.arch_count(), 0.0);
  for (std::size_t j = 0; j < avail.size(); ++j) {
    const double wj = w[j];
    const auto& col = table.metrics[avail[j]];
    for (std::size_t a = 0; a < col.size(); ++a) cm.scores[a] += wj * col[a];
  }
  cm.ranking = rank_by(cm.scores);
  return cm;
}

int argmax_arch(const CombinedMetric& cm) {
  for (std::size_t a = 0; a < cm.ranking.rank.size(); ++a) {
    if (cm.ranking.rank[a] == 1) return static_cast<int>(a);
  }
  throw std::logic_error("argmax_arch: ranking has no rank 1");
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_same_size(x, y, "pearson");
  const double vx = covariance(x, x);
  const double vy = covariance(y, y);
  if (vx == 0.0 || vy == 0.0) {
    throw std::domain_error("pearson: undefined correlation (constant input)");
  }
  return covariance(x, y) / std::sqrt(vx * vy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_same_size(x, y, "spearman");
  // Tie-breaking gives a constant vector distinct ranks, so reject constant
  // input up front; its rank order is an indexing artifact, not information.
  if (covariance(x, x) == 0.0 || covariance(y, y) == 0.0) {
    throw std::domain_error(
        "spearman: undefined correlation (constant input)");
  }
  auto as_ranks = [](std::span<const double> v) {
    const Ranking r = rank_by(v);
    std::vector<double> out(r.rank.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = double(r.rank[i]);
    return out;
  };
  return pearson(as_ranks(x), as_ranks(y));
}

double optimal_pairwise_weight(std::span<const double> m1,
                               std::span<const double> m2,
                               std::span<const double> f) {
  check_same_size(m1, f, "optimal_pairwise_weight");
  check_same_size(m2, f, "optimal_pairwise_weight");
  const double c1f = covariance(m1, f);
  const double c2f = covariance(m2, f);
  const double c12 = covariance(m1, m2);
  const double v1 = covariance(m1, m1);
  const double v2 = covariance(m2, m2);
  const double num = c2f * c12 - c1f * v2;
  const double den = c1f * c12 - c2f * v1;
  const double scale = std::abs(c2f * c12) + std::abs(c1f * v2) +
                       std::abs(c1f * c12) + std::abs(c2f * v1);
  if (std::abs(den) <= 1e-14 * scale || std::abs(num) <= 1e-14 * scale) {
    throw std::domain_error(
        "optimal_pairwise_weight: degenerate combination (stationary ratio "
        "does not exist)");
  }
  return num / den;
}

PairwiseCombination best_pairwise_combination(std::span<const double> m1,
                                              std::span<const double> m2,
                                              std::span<const double> f) {
  const double a = optimal_pairwise_weight(m1, m2, f);
  std::vector<double> pair(m1.size());
  for (std::size_t i = 0; i < pair.size(); ++i) pair[i] = a * m1[i] + m2[i];
  const double rho_pair = pearson(pair, f);
  const double rho_m1 = pearson(m1, f);

  PairwiseCombination best{a, 1.0, true, rho_pair};
  auto consider = [&](double sign, bool use_pair, double rho) {
    if (rho > best.correlation) best = {a, sign, use_pair, rho};
  };
  consider(-1.0, true, -rho_pair);
  consider(1.0, false, rho_m1);
  consider(-1.0, false, -rho_m1);
  return best;
}

}  // namespace proxyens
