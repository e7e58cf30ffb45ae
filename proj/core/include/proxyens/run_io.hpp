#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "proxyens/analytics.hpp"
#include "proxyens/bo.hpp"
#include "proxyens/exploit.hpp"

namespace proxyens {

// One search run as serialized to / from a JSONL trace file: one object per
// iteration with fields {t, w, arch_id, f, fresh} (w omitted for unweighted
// methods) and a final footer object {T0, best_weight, best_arch, method,
// seed, budget[, proposal]}. Architecture references use the table's string
// arch_id values.
struct RunRecord {
  std::string method;
  std::uint64_t seed = 0;
  int budget = 0;
  std::vector<TraceStep> steps;
  int t0 = 0;
  std::optional<WeightVector> best_weight;
  std::optional<int> best_arch;
  std::optional<ProposalResult> proposal;
};

void write_run_jsonl(const std::filesystem::path& path, const RunRecord& run,
                     const BenchmarkTable& table);
RunRecord read_run_jsonl(const std::filesystem::path& path,
                         const BenchmarkTable& table);

// summary.csv columns:
//   method,seed,budget,t0,arch_id,f,f_test,rank,distinct_queries,source
// Per-seed rows first, then aggregate rows with seed = "mean" / "std"
// (population std) over f, f_test and rank.
struct SummaryRow {
  std::string method;
  std::string seed;
  int budget = 0;
  std::optional<int> t0;
  std::optional<std::string> arch_id;
  std::optional<double> f;
  std::optional<double> f_test;
  std::optional<double> rank;
  std::optional<int> distinct_queries;
  std::string source;
};

void append_aggregate_rows(std::vector<SummaryRow>& rows);
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows);

// Ranking-quality report rows (one per metric / method / reference).
struct ReportRow {
  std::string task;
  std::string metric_or_method;
  int T = 0;
  double precision = 0.0;
  std::optional<double> expected_rank;
  std::optional<double> spearman;
  std::optional<double> pearson;
};
void write_report_csv(const std::filesystem::path& path,
                      const std::vector<ReportRow>& rows);

// Companion report: objective rank of each score's top-1 pick and the best
// objective rank inside its top-T prefix.
struct TopRankRow {
  std::string task;
  std::string metric_or_method;
  int T = 0;
  int top1_rank = 0;
  int best_rank_in_top_t = 0;
};
void write_top_ranks_csv(const std::filesystem::path& path,
                         const std::vector<TopRankRow>& rows);

// Incumbent-vs-queries plot data: one row per fresh query.
struct CurvePoint {
  std::string task;
  std::string method;
  std::string seed;
  int queries = 0;
  double best_f = 0.0;
  int best_rank = 0;
};
void write_curves_csv(const std::filesystem::path& path,
                      const std::vector<CurvePoint>& rows);

struct RegretRow {
  std::string task;
  std::string method;
  std::string seed;
  int t = 0;
  double step_precision = 0.0;
  double cumulative_regret = 0.0;
  double reference_precision = 0.0;
};
void write_regret_csv(const std::filesystem::path& path,
                      const std::vector<RegretRow>& rows);

// Weight files are either a JSON object {"weights": [...]} or a trace
// .jsonl, in which case the footer's best_weight is taken.
WeightVector read_weight_file(const std::filesystem::path& path);
void write_weight_file(const std::filesystem::path& path,
                       const WeightVector& w);

}  // namespace proxyens
