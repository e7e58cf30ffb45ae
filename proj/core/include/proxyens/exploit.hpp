#pragma once

#include <vector>

#include "proxyens/bo.hpp"
#include "proxyens/ensemble.hpp"
#include "proxyens/table.hpp"

namespace proxyens {

enum class ProposalSource { bo_phase, greedy_phase, search };

const char* to_string(ProposalSource s);

struct ProposalResult {
  int proposed_arch = -1;
  double proposed_f = 0.0;
  int total_distinct_queries = 0;
  std::vector<int> greedy_set;  // architectures examined during exploitation
  ProposalSource source = ProposalSource::search;
};

struct GreedyOutcome {
  int best_arch = -1;
  double best_f = 0.0;
  std::vector<int> examined;  // rank-order walk, cache hits included
  int fresh_queries = 0;
};

// Walks the top-k of the combined ranking in rank order, querying every
// architecture not already cached (cache hits are free), and returns the
// best objective over the cache plus the walked prefix. When
// spend_until_total is set the walk keeps extending past k until the cache
// holds that many distinct entries (or the table is exhausted).
GreedyOutcome greedy_search(const BenchmarkTable& table,
                            const CombinedMetric& cm, int k, QueryCache& cache,
                            std::optional<int> spend_until_total = {});

struct HybridRun {
  SearchTrace trace;
  QueryCache cache;
  ProposalResult proposal;
};

// Full pipeline: surrogate weight search (run_bo), then greedy exploitation
// of the best-queried weight's ranking over the leftover budget T - T0.
HybridRun run_hybrid_search(const BenchmarkTable& table, const BOConfig& cfg);

}  // namespace proxyens
