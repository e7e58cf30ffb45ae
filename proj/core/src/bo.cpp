#include "proxyens/bo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "proxyens/ensemble.hpp"

namespace proxyens {

std::size_t argmax_ucb(std::span<const double> means,
                       std::span<const double> sds, double kappa) {
  if (means.empty() || means.size() != sds.size()) {
    throw std::invalid_argument("argmax_ucb: bad score vectors");
  }
  std::size_t best = 0;
  double best_score = means[0] + kappa * sds[0];
  for (std::size_t i = 1; i < means.size(); ++i) {
    const double score = means[i] + kappa * sds[i];
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

const WeightVector& ucb_select(const gp::GPState& state,
                               std::span<const WeightVector> candidates,
                               double kappa) {
  if (candidates.empty()) {
    throw std::invalid_argument("ucb_select: empty candidate set");
  }
  std::vector<double> means, vars;
  gp::predict_batch(state, candidates, means, vars);
  for (double& v : vars) v = std::sqrt(v);
  return candidates[argmax_ucb(means, vars, kappa)];
}

std::vector<WeightVector> gen_candidates(
    Rng& rng, std::size_t dim, std::size_t count,
    std::span<const WeightVector> anchors) {
  if (dim == 0) throw std::invalid_argument("gen_candidates: zero dimension");
  if (count < anchors.size()) {
    throw std::invalid_argument("gen_candidates: count below anchor count");
  }
  std::vector<WeightVector> out;
  out.reserve(count);
  for (const auto& a : anchors) {
    if (a.size() != dim) {
      throw std::invalid_argument("gen_candidates: anchor dimension mismatch");
    }
    out.push_back(a);
  }
  while (out.size() < count) {
    std::vector<double> w(dim);
    for (double& v : w) v = rng.uniform(-1.0, 1.0);
    out.emplace_back(std::move(w));
  }
  return out;
}

std::vector<WeightVector> default_anchors(
    std::size_t dim, const std::optional<WeightVector>& incumbent) {
  std::vector<WeightVector> anchors;
  for (std::size_t i = 0; i < dim; ++i) {
    anchors.push_back(WeightVector::one_hot(dim, i, 1.0));
    anchors.push_back(WeightVector::one_hot(dim, i, -1.0));
  }
  anchors.emplace_back(std::vector<double>(dim, 0.5));
  if (incumbent) anchors.push_back(*incumbent);
  return anchors;
}

BOResult run_bo(const BenchmarkTable& table, const BOConfig& cfg) {
  if (!table.normalized) {
    throw std::invalid_argument("run_bo: table not normalized");
  }
  if (cfg.budget < 1) throw std::invalid_argument("run_bo: budget must be >= 1");
  if (cfg.kappa < 0.0) throw std::invalid_argument("run_bo: negative kappa");
  if (cfg.fixed_t0 && (*cfg.fixed_t0 < 1 || *cfg.fixed_t0 > cfg.budget)) {
    throw std::invalid_argument("run_bo: fixed_t0 outside [1, budget]");
  }

  const std::size_t dim = table.available_count();
  const int rounds = cfg.fixed_t0 ? *cfg.fixed_t0 : cfg.budget;
  const int sweep = static_cast<int>(
      std::min<std::size_t>(dim, static_cast<std::size_t>(rounds)));

  Rng rng(cfg.seed);
  BOResult res;
  std::vector<WeightVector> obs_w;
  std::vector<double> obs_y;
  std::optional<WeightVector> incumbent;
  double best_f = -std::numeric_limits<double>::infinity();
  int best_arch = -1;

  for (int t = 1; t <= rounds; ++t) {
    const gp::GPState state = gp::fit(obs_w, obs_y, cfg.grid);
    ++res.trace.gp_fit_count;

    WeightVector w;
    if (cfg.init == BOConfig::InitDesign::one_hot_first && t <= sweep) {
      w = WeightVector::one_hot(dim, static_cast<std::size_t>(t - 1));
    } else {
      const auto anchors = default_anchors(dim, incumbent);
      const auto candidates =
          gen_candidates(rng, dim, static_cast<std::size_t>(cfg.candidate_count),
                         anchors);
      w = ucb_select(state, candidates, cfg.kappa);
    }

    const CombinedMetric cm = combine(table, w);
    int arch;
    if (cfg.fixed_t0) {
      // Ablation rule: spend this round on the best-ranked architecture that
      // has not been queried yet, so every round is a fresh query.
      arch = -1;
      for (int a : ranked_indices(cm.ranking)) {
        if (!res.cache.contains(a)) {
          arch = a;
          break;
        }
      }
      if (arch < 0) break;  // table exhausted
    } else {
      arch = argmax_arch(cm);
    }

    const bool fresh = res.cache.insert(arch, table.objective[arch]);
    const double f = res.cache.value(arch);
    res.trace.steps.push_back({t, w, arch, f, fresh});
    obs_w.push_back(w);
    obs_y.push_back(f);
    if (f > best_f) {
      best_f = f;
      incumbent = w;
      best_arch = arch;
    }
  }

  res.trace.t0 = static_cast<int>(res.cache.size());
  res.trace.best_weight = *incumbent;
  res.trace.best_weight_arch = best_arch;
  return res;
}

}  // namespace proxyens
