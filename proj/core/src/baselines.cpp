#include "proxyens/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace proxyens {

namespace {

std::vector<int> sample_distinct_archs(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(idx[i], idx[i + rng.integer(n - i)]);
  }
  idx.resize(k);
  return idx;
}

std::map<Genome, int> genome_index(const BenchmarkTable& table) {
  std::map<Genome, int> map;
  for (std::size_t a = 0; a < table.genomes.size(); ++a) {
    map.emplace(table.genomes[a], static_cast<int>(a));
  }
  return map;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  const double hi = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(logits[i] - hi));
  for (double& v : p) v /= z;
  return p;
}

struct BestTracker {
  int arch = -1;
  double f = -std::numeric_limits<double>::infinity();
  void offer(int a, double v) {
    if (v > f) {
      f = v;
      arch = a;
    }
  }
};

BaselineOutcome finish(BestTracker best, std::vector<TraceStep> steps,
                       QueryCache cache) {
  BaselineOutcome out;
  out.proposal.proposed_arch = best.arch;
  out.proposal.proposed_f = best.f;
  out.proposal.total_distinct_queries = static_cast<int>(cache.size());
  out.proposal.source = ProposalSource::search;
  out.steps = std::move(steps);
  out.cache = std::move(cache);
  return out;
}

}  // namespace

BaselineOutcome random_search(const BenchmarkTable& table, int budget,
                              std::uint64_t seed) {
  table.validate();
  if (budget < 1) throw std::invalid_argument("random_search: budget < 1");
  const std::size_t n = table.arch_count();
  const std::size_t k = std::min<std::size_t>(n, std::size_t(budget));
  Rng rng(seed);
  QueryCache cache;
  std::vector<TraceStep> steps;
  BestTracker best;
  int t = 0;
  for (int arch : sample_distinct_archs(rng, n, k)) {
    const double f = table.objective[static_cast<std::size_t>(arch)];
    cache.insert(arch, f);
    steps.push_back({++t, {}, arch, f, true});
    best.offer(arch, f);
  }
  return finish(best, std::move(steps), std::move(cache));
}

Genome mutate_genome(Rng& rng, const Genome& genome,
                     std::span<const int> cardinalities) {
  if (genome.size() != cardinalities.size()) {
    throw std::invalid_argument("mutate_genome: cardinality shape mismatch");
  }
  std::vector<std::size_t> eligible;
  for (std::size_t g = 0; g < cardinalities.size(); ++g) {
    if (cardinalities[g] >= 2) eligible.push_back(g);
  }
  if (eligible.empty()) {
    throw std::invalid_argument("mutate_genome: no gene has an alternative");
  }
  const std::size_t g = eligible[rng.integer(eligible.size())];
  const int k = cardinalities[g];
  const int offset = 1 + static_cast<int>(rng.integer(std::uint64_t(k - 1)));
  Genome child = genome;
  child[g] = (genome[g] + offset) % k;
  return child;
}

BaselineOutcome regularized_evolution(const BenchmarkTable& table, int budget,
                                      std::uint64_t seed) {
  table.validate();
  if (budget < 3) {
    throw std::invalid_argument("regularized_evolution: budget must be >= 3");
  }
  if (table.genomes.empty()) {
    throw std::invalid_argument("regularized_evolution: table has no genomes");
  }
  const std::size_t n = table.arch_count();
  const std::size_t pool_size = std::min<std::size_t>(n, std::size_t(budget / 3));
  const auto index_of = genome_index(table);

  Rng rng(seed);
  QueryCache cache;
  std::vector<TraceStep> steps;
  BestTracker best;
  std::vector<std::pair<int, double>> pool;
  int t = 0;
  for (int arch : sample_distinct_archs(rng, n, pool_size)) {
    const double f = table.objective[static_cast<std::size_t>(arch)];
    cache.insert(arch, f);
    steps.push_back({++t, {}, arch, f, true});
    pool.emplace_back(arch, f);
    best.offer(arch, f);
  }

  for (int step = static_cast<int>(pool_size); step < budget; ++step) {
    std::size_t best_pos = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (pool[i].second > pool[best_pos].second) best_pos = i;
    }
    const int parent = pool[best_pos].first;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best_pos));

    // On fully enumerated spaces the first attempt always exists; partial
    // tables get a bounded number of re-draws.
    int child_arch = -1;
    for (int attempt = 0; attempt < 128 && child_arch < 0; ++attempt) {
      const Genome child = mutate_genome(
          rng, table.genomes[static_cast<std::size_t>(parent)],
          table.gene_cardinalities);
      auto it = index_of.find(child);
      if (it != index_of.end()) child_arch = it->second;
    }
    if (child_arch < 0) {
      throw std::runtime_error(
          "regularized_evolution: no mutation maps to an existing "
          "architecture");
    }
    const double f = table.objective[static_cast<std::size_t>(child_arch)];
    const bool fresh = cache.insert(child_arch, f);
    steps.push_back({++t, {}, child_arch, f, fresh});
    pool.emplace_back(child_arch, f);
    best.offer(child_arch, f);
  }
  return finish(best, std::move(steps), std::move(cache));
}

PolicyState::PolicyState(std::vector<int> cardinalities, ReinforceConfig cfg)
    : cfg_(cfg), cards_(std::move(cardinalities)) {
  if (cards_.empty()) throw std::invalid_argument("PolicyState: no genes");
  for (int k : cards_) {
    if (k < 1) throw std::invalid_argument("PolicyState: bad cardinality");
    logits_.emplace_back(std::size_t(k), 0.0);
    adam_m_.emplace_back(std::size_t(k), 0.0);
    adam_v_.emplace_back(std::size_t(k), 0.0);
  }
}

Genome PolicyState::sample(Rng& rng) const {
  Genome g(cards_.size());
  for (std::size_t gene = 0; gene < cards_.size(); ++gene) {
    const auto p = softmax(logits_[gene]);
    const double u = rng.uniform01();
    double acc = 0.0;
    int pick = static_cast<int>(p.size()) - 1;
    for (std::size_t j = 0; j < p.size(); ++j) {
      acc += p[j];
      if (u < acc) {
        pick = static_cast<int>(j);
        break;
      }
    }
    g[gene] = pick;
  }
  return g;
}

void PolicyState::observe(const Genome& genome, double reward) {
  if (genome.size() != cards_.size()) {
    throw std::invalid_argument("PolicyState: genome shape mismatch");
  }
  const double advantage = reward - baseline_;
  baseline_ = cfg_.baseline_momentum * baseline_ +
              (1.0 - cfg_.baseline_momentum) * reward;
  ++step_;
  const double bias1 = 1.0 - std::pow(cfg_.adam_beta1, double(step_));
  const double bias2 = 1.0 - std::pow(cfg_.adam_beta2, double(step_));
  for (std::size_t gene = 0; gene < cards_.size(); ++gene) {
    const auto p = softmax(logits_[gene]);
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double indicator = (genome[gene] == static_cast<int>(j)) ? 1.0 : 0.0;
      const double grad = -advantage * (indicator - p[j]);
      auto& m = adam_m_[gene][j];
      auto& v = adam_v_[gene][j];
      m = cfg_.adam_beta1 * m + (1.0 - cfg_.adam_beta1) * grad;
      v = cfg_.adam_beta2 * v + (1.0 - cfg_.adam_beta2) * grad * grad;
      logits_[gene][j] -=
          cfg_.lr * (m / bias1) / (std::sqrt(v / bias2) + cfg_.adam_eps);
    }
  }
}

std::vector<double> PolicyState::gene_probabilities(std::size_t gene) const {
  return softmax(logits_.at(gene));
}

BaselineOutcome reinforce_search(const BenchmarkTable& table, int budget,
                                 std::uint64_t seed,
                                 const ReinforceConfig& cfg) {
  table.validate();
  if (budget < 1) throw std::invalid_argument("reinforce_search: budget < 1");
  if (cfg.lr < 0.0) throw std::invalid_argument("reinforce_search: negative lr");
  if (table.genomes.empty()) {
    throw std::invalid_argument("reinforce_search: table has no genomes");
  }
  const std::size_t n = table.arch_count();
  const auto index_of = genome_index(table);
  std::uint64_t space = 1;
  bool overflow = false;
  for (int k : table.gene_cardinalities) {
    if (space > (std::uint64_t{1} << 62) / std::uint64_t(k)) {
      overflow = true;
      break;
    }
    space *= std::uint64_t(k);
  }
  if (overflow || space != n || index_of.size() != n) {
    throw std::invalid_argument(
        "reinforce_search: table must enumerate the full genome space");
  }

  PolicyState policy(table.gene_cardinalities, cfg);
  Rng rng(seed);
  QueryCache cache;
  std::vector<TraceStep> steps;
  BestTracker best;
  const std::size_t target = std::min<std::size_t>(n, std::size_t(budget));
  const long step_cap = 1000L * budget;  // safety valve, never hit in practice
  int t = 0;
  while (cache.size() < target && t < step_cap) {
    const Genome g = policy.sample(rng);
    const int arch = index_of.at(g);
    const double f = table.objective[static_cast<std::size_t>(arch)];
    const bool fresh = cache.insert(arch, f);
    steps.push_back({++t, {}, arch, f, fresh});
    policy.observe(g, f);
    best.offer(arch, f);
  }
  return finish(best, std::move(steps), std::move(cache));
}

}  // namespace proxyens
