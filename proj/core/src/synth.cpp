#include "proxyens/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "proxyens/rng.hpp"

namespace proxyens {

namespace {

// First n values of a seeded permutation of 0..total-1 (sparse Fisher-Yates;
// only touched slots are materialized).
std::vector<std::uint64_t> sample_distinct(Rng& rng, std::uint64_t total,
                                           std::size_t n) {
  std::unordered_map<std::uint64_t, std::uint64_t> moved;
  std::vector<std::uint64_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t j = i + rng.integer(total - i);
    auto at = [&](std::uint64_t k) {
      auto it = moved.find(k);
      return it == moved.end() ? k : it->second;
    };
    out.push_back(at(j));
    moved[j] = at(i);
  }
  return out;
}

Genome decode_genome(std::uint64_t index, int genes, int cardinality) {
  Genome g(static_cast<std::size_t>(genes));
  for (int k = genes - 1; k >= 0; --k) {
    g[static_cast<std::size_t>(k)] =
        static_cast<int>(index % static_cast<std::uint64_t>(cardinality));
    index /= static_cast<std::uint64_t>(cardinality);
  }
  return g;
}

}  // namespace

BenchmarkTable synth_benchmark(std::uint64_t seed, std::size_t n,
                               std::size_t m, const SynthSpec& spec) {
  if (n < 2) throw std::invalid_argument("synth: need at least 2 architectures");
  if (m < 1) throw std::invalid_argument("synth: need at least 1 metric");
  if (spec.noise < 0) throw std::invalid_argument("synth: negative noise");
  if (spec.genes < 1 || spec.cardinality < 1) {
    throw std::invalid_argument("synth: bad genome shape");
  }
  std::vector<double> signal = spec.signal;
  if (signal.empty()) {
    for (std::size_t i = 0; i < m; ++i) {
      signal.push_back(m == 1 ? 0.9 : 0.9 - 0.6 * double(i) / double(m - 1));
    }
  } else if (signal.size() == 1) {
    signal.assign(m, signal.front());
  } else if (signal.size() != m) {
    throw std::invalid_argument("synth: signal length must be 1 or m");
  }
  for (double s : signal) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument("synth: signal outside [0,1]");
    }
  }

  // Genome space must be able to hold n distinct genomes.
  std::uint64_t total = 1;
  for (int k = 0; k < spec.genes; ++k) {
    if (total > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(spec.cardinality)) {
      total = std::uint64_t{1} << 62;  // saturate, plenty for any n
      break;
    }
    total *= static_cast<std::uint64_t>(spec.cardinality);
  }
  if (n > total) {
    throw std::invalid_argument("synth: genome space smaller than n");
  }

  Rng rng(seed);
  BenchmarkTable t;
  t.objective.resize(n);
  for (std::size_t a = 0; a < n; ++a) t.objective[a] = rng.normal();
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> col(n);
    // Per-metric offset/gain mimic the wildly different raw scales of real
    // metrics; x + 0.25 x^3 keeps the transform strictly increasing.
    const double offset = 5.0 * double(i) - 2.0;
    const double gain = std::pow(10.0, double(i % 3) - 1.0);
    for (std::size_t a = 0; a < n; ++a) {
      const double x = signal[i] * t.objective[a] + spec.noise * rng.normal();
      col[a] = offset + gain * (x + 0.25 * x * x * x);
    }
    t.metrics.push_back(std::move(col));
    t.metric_names.push_back("m" + std::to_string(i));
  }
  t.available.assign(m, 1);

  std::vector<std::uint64_t> codes;
  if (n == total) {
    codes.resize(n);
    for (std::size_t a = 0; a < n; ++a) codes[a] = a;
  } else {
    codes = sample_distinct(rng, total, n);
  }
  for (std::size_t a = 0; a < n; ++a) {
    t.genomes.push_back(decode_genome(codes[a], spec.genes, spec.cardinality));
    t.arch_ids.push_back(std::to_string(a));
  }
  t.gene_cardinalities.assign(static_cast<std::size_t>(spec.genes),
                              spec.cardinality);
  t.validate();
  return t;
}

}  // namespace proxyens
