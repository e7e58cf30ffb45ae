#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "proxyens/gp.hpp"
#include "proxyens/rng.hpp"
#include "proxyens/table.hpp"

namespace proxyens {

// Insertion-ordered map of architecture index -> objective value; one entry
// per distinct architecture ever queried.
class QueryCache {
 public:
  bool contains(int arch) const { return index_.count(arch) != 0; }
  double value(int arch) const { return entries_.at(index_.at(arch)).second; }
  // Returns false (and changes nothing) when the architecture is present.
  bool insert(int arch, double f) {
    if (contains(arch)) return false;
    index_.emplace(arch, entries_.size());
    entries_.emplace_back(arch, f);
    return true;
  }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<int, double>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<int, double>> entries_;
  std::unordered_map<int, std::size_t> index_;
};

struct BOConfig {
  int budget = 0;               // total distinct-query budget T, >= 1
  double kappa = 2.0;           // UCB exploration coefficient
  int candidate_count = 4096;   // acquisition candidates per iteration
  std::uint64_t seed = 0;
  enum class InitDesign { one_hot_first, random_init };
  InitDesign init = InitDesign::one_hot_first;
  // Ablation: run exactly this many surrogate rounds, always querying the
  // best-ranked architecture not yet queried (every round is fresh).
  std::optional<int> fixed_t0;
  // Exploitation option: keep walking down the ranked list until the budget
  // is spent on distinct queries.
  bool spend_leftover = false;
  gp::HyperGrid grid;
};

struct TraceStep {
  int t = 0;                // 1-based iteration
  WeightVector w;
  int arch = -1;            // architecture the weight pointed at
  double f = 0.0;
  bool fresh = false;       // true when this iteration consumed budget
};

struct SearchTrace {
  std::vector<TraceStep> steps;
  int t0 = 0;                       // distinct architectures queried
  WeightVector best_weight;         // weight of the best observed objective
  int best_weight_arch = -1;
  std::size_t gp_fit_count = 0;     // diagnostics: one fit per iteration
};

struct BOResult {
  SearchTrace trace;
  QueryCache cache;
};

// Argmax of mean + kappa * sd over candidates; ties keep the earliest
// candidate. Throws on an empty candidate set.
const WeightVector& ucb_select(const gp::GPState& state,
                               std::span<const WeightVector> candidates,
                               double kappa);

// Selection rule shared by ucb_select, exposed for direct testing.
std::size_t argmax_ucb(std::span<const double> means,
                       std::span<const double> sds, double kappa);

// Anchors first, then uniform draws from [-1, 1]^dim until `count` points
// exist. Requires count >= anchors.size().
std::vector<WeightVector> gen_candidates(Rng& rng, std::size_t dim,
                                         std::size_t count,
                                         std::span<const WeightVector> anchors);

// All +-one-hot vectors, the all-0.5 vector, and the incumbent when present.
std::vector<WeightVector> default_anchors(
    std::size_t dim, const std::optional<WeightVector>& incumbent);

// Surrogate loop over the weight space: each iteration refits the GP on all
// previous (w, f) pairs, picks a weight (one-hot sweep first when configured,
// UCB otherwise), evaluates the weight's top-ranked architecture, and records
// the observation. Duplicate architectures re-use the cached objective but
// still extend the observation set.
BOResult run_bo(const BenchmarkTable& table, const BOConfig& cfg);

}  // namespace proxyens
