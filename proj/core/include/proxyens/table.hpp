#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "proxyens/genome.hpp"

namespace proxyens {

// Dense 1..N ranking; rank[a] == 1 marks the best-scored architecture and
// ties are broken toward the lower architecture index.
struct Ranking {
  std::vector<int> rank;
};

Ranking rank_by(std::span<const double> scores);

// ranked_indices(r)[k] is the architecture holding rank k+1.
std::vector<int> ranked_indices(const Ranking& r);

// Column-oriented architecture benchmark. The objective is always stored so
// that larger is better; loss-style objectives are negated at load time and
// objective_higher_is_better records the orientation that was declared.
struct BenchmarkTable {
  std::vector<std::string> arch_ids;             // N
  std::vector<std::string> metric_names;         // M, distinct
  std::vector<std::vector<double>> metrics;      // M columns of length N
  std::vector<std::uint8_t> available;           // M, 0 = column unusable
  std::vector<double> objective;                 // N
  bool objective_higher_is_better = true;
  std::vector<double> test_objective;            // N or empty
  std::vector<Genome> genomes;                   // N or empty
  std::vector<int> gene_cardinalities;           // per gene when genomes exist
  bool normalized = false;

  std::size_t arch_count() const { return objective.size(); }
  std::size_t metric_count() const { return metric_names.size(); }
  std::size_t available_count() const;
  std::vector<std::size_t> available_indices() const;

  // Throws std::runtime_error when a structural invariant is broken
  // (mismatched lengths, non-finite values in available columns, duplicate
  // ids, out-of-range genes).
  void validate() const;
};

enum class TableFormat { csv, json };

struct LoadOptions {
  bool objective_higher_is_better = true;
  // Metric columns declared unusable; only these may contain "na" cells.
  std::vector<std::string> unavailable_metrics;
};

// CSV header: arch_id[,genome],<metric>...,f_val[,f_test].
// JSON: one object of parallel arrays under the same field names
// ("na" cells are JSON nulls). Malformed input, duplicate arch_id, a missing
// objective column, zero metric columns, or an "na" cell in an available
// column are all hard errors.
BenchmarkTable load_benchmark(const std::filesystem::path& path,
                              TableFormat format, const LoadOptions& opts = {});

// Writes the stored representation (objective already oriented larger-is-
// better); numeric cells round-trip exactly. Loading the result back with
// default options reproduces the table bit-for-bit.
void save_benchmark(const BenchmarkTable& table,
                    const std::filesystem::path& path, TableFormat format);

// Min-max scales every available metric column to [0, 1]; constant columns
// map to 0.5. Column order is preserved and `normalized` is set.
BenchmarkTable normalize_metrics(const BenchmarkTable& table);

// Restriction to the named metric columns (order as given); unknown names
// are errors.
BenchmarkTable select_metrics(const BenchmarkTable& table,
                              const std::vector<std::string>& names);

Ranking objective_ranking(const BenchmarkTable& table);

bool tables_equal(const BenchmarkTable& a, const BenchmarkTable& b);

}  // namespace proxyens
