#pragma once

#include <cstdint>
#include <vector>

#include "proxyens/table.hpp"

namespace proxyens {

// Recipe for a synthetic benchmark. Each metric column is a strictly
// monotone transform of signal[i] * objective + noise * eps, so signal[i]=1
// with noise=0 yields a perfect (Spearman 1.0) metric and smaller signals
// yield progressively noisier ones.
struct SynthSpec {
  // One entry per metric in [0, 1]; empty = evenly spaced defaults from 0.9
  // down to 0.3, a single entry broadcasts to all metrics.
  std::vector<double> signal;
  double noise = 0.25;
  int genes = 6;
  int cardinality = 4;
};

// Deterministic for a fixed (seed, n, m, spec); genomes are distinct and
// cover the full cardinality^genes space exactly when n equals its size.
BenchmarkTable synth_benchmark(std::uint64_t seed, std::size_t n,
                               std::size_t m, const SynthSpec& spec = {});

}  // namespace proxyens
