#pragma once

#include <cstdint>
#include <vector>

#include "proxyens/bo.hpp"
#include "proxyens/exploit.hpp"
#include "proxyens/rng.hpp"
#include "proxyens/table.hpp"

namespace proxyens {

struct BaselineOutcome {
  ProposalResult proposal;       // source = ProposalSource::search
  std::vector<TraceStep> steps;  // weights empty; fresh marks budget use
  QueryCache cache;
};

// Best objective among min(T, N) distinct uniform samples.
BaselineOutcome random_search(const BenchmarkTable& table, int budget,
                              std::uint64_t seed);

// Mutates exactly one uniformly chosen gene (with at least two choices) to a
// different value. Exposed for testing.
Genome mutate_genome(Rng& rng, const Genome& genome,
                     std::span<const int> cardinalities);

// Evolutionary baseline: an initial pool of floor(T/3) distinct random
// architectures, then each remaining step removes the pool's best, queries a
// one-gene mutation of it and adds the child back. Every step spends one
// query even when the child repeats an earlier architecture. Requires
// genomes and T >= 3.
BaselineOutcome regularized_evolution(const BenchmarkTable& table, int budget,
                                      std::uint64_t seed);

struct ReinforceConfig {
  double lr = 0.01;
  double baseline_momentum = 0.9;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

// Per-gene categorical policy with Adam-updated logits and an exponential
// moving-average reward baseline.
class PolicyState {
 public:
  PolicyState(std::vector<int> cardinalities, ReinforceConfig cfg);

  Genome sample(Rng& rng) const;
  // advantage = reward - baseline (pre-update), then EMA baseline update and
  // one Adam step on -advantage * log pi(genome).
  void observe(const Genome& genome, double reward);

  double baseline() const { return baseline_; }
  std::vector<double> gene_probabilities(std::size_t gene) const;
  const std::vector<std::vector<double>>& logits() const { return logits_; }

 private:
  ReinforceConfig cfg_;
  std::vector<int> cards_;
  std::vector<std::vector<double>> logits_;
  std::vector<std::vector<double>> adam_m_;
  std::vector<std::vector<double>> adam_v_;
  long step_ = 0;
  double baseline_ = 0.0;
};

// Policy-gradient baseline: samples genomes from the policy, queries the
// matching architecture (duplicates are cache hits and spend no budget but
// still update the policy) until the budget is spent on fresh queries.
// Requires the table's genomes to enumerate the full gene space so every
// sampled genome exists.
BaselineOutcome reinforce_search(const BenchmarkTable& table, int budget,
                                 std::uint64_t seed,
                                 const ReinforceConfig& cfg = {});

}  // namespace proxyens
