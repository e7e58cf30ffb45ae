#include "proxyens/exploit.hpp"

#include <set>
#include <stdexcept>

namespace proxyens {

const char* to_string(ProposalSource s) {
  switch (s) {
    case ProposalSource::bo_phase:
      return "bo_phase";
    case ProposalSource::greedy_phase:
      return "greedy_phase";
    default:
      return "search";
  }
}

GreedyOutcome greedy_search(const BenchmarkTable& table,
                            const CombinedMetric& cm, int k, QueryCache& cache,
                            std::optional<int> spend_until_total) {
  if (k < 0) throw std::invalid_argument("greedy_search: negative k");
  if (cm.ranking.rank.size() != table.arch_count()) {
    throw std::invalid_argument("greedy_search: ranking/table size mismatch");
  }
  GreedyOutcome out;
  double best = -std::numeric_limits<double>::infinity();
  // Cached architectures seed the incumbent, earliest query wins ties.
  for (const auto& [arch, f] : cache.entries()) {
    if (f > best) {
      best = f;
      out.best_arch = arch;
    }
  }
  const auto order = ranked_indices(cm.ranking);
  const std::size_t n = order.size();
  for (std::size_t pos = 0; pos < n; ++pos) {
    const bool in_prefix = pos < static_cast<std::size_t>(k);
    const bool spending = spend_until_total &&
                          cache.size() < static_cast<std::size_t>(*spend_until_total);
    if (!in_prefix && !spending) break;
    const int arch = order[pos];
    if (cache.insert(arch, table.objective[arch])) ++out.fresh_queries;
    out.examined.push_back(arch);
    const double f = cache.value(arch);
    if (f > best) {
      best = f;
      out.best_arch = arch;
    }
  }
  if (out.best_arch < 0) {
    throw std::invalid_argument("greedy_search: empty cache and k = 0");
  }
  out.best_f = best;
  return out;
}

HybridRun run_hybrid_search(const BenchmarkTable& table, const BOConfig& cfg) {
  BOResult bo = run_bo(table, cfg);
  const int t0 = bo.trace.t0;

  std::set<int> bo_archs;
  for (const auto& [arch, f] : bo.cache.entries()) bo_archs.insert(arch);

  const CombinedMetric cm = combine(table, bo.trace.best_weight);
  const int k = std::max(0, cfg.budget - t0);
  const std::optional<int> spend =
      cfg.spend_leftover ? std::optional<int>(cfg.budget) : std::nullopt;
  const GreedyOutcome g = greedy_search(table, cm, k, bo.cache, spend);

  HybridRun run;
  run.trace = std::move(bo.trace);
  run.proposal.proposed_arch = g.best_arch;
  run.proposal.proposed_f = g.best_f;
  run.proposal.total_distinct_queries = static_cast<int>(bo.cache.size());
  run.proposal.greedy_set = g.examined;
  run.proposal.source = bo_archs.count(g.best_arch)
                            ? ProposalSource::bo_phase
                            : ProposalSource::greedy_phase;
  run.cache = std::move(bo.cache);
  return run;
}

}  // namespace proxyens
