// Command-line driver: searches over tabular architecture benchmarks,
// baseline searchers, ranking analytics, and synthetic benchmark generation.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "proxyens/analytics.hpp"
#include "proxyens/baselines.hpp"
#include "proxyens/bo.hpp"
#include "proxyens/ensemble.hpp"
#include "proxyens/exploit.hpp"
#include "proxyens/run_io.hpp"
#include "proxyens/synth.hpp"
#include "proxyens/table.hpp"

namespace fs = std::filesystem;
using namespace proxyens;

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---- benchmark source ------------------------------------------------------

struct SourceOpts {
  std::string benchmark;
  std::string synth_spec;
  std::string format = "auto";
  std::vector<std::string> metrics;
  std::vector<std::string> unavailable;
  bool minimize = false;
  std::string ablation = "normalize";
  std::uint64_t ablation_seed = 0;
  std::string task;
};

void add_source_flags(CLI::App* cmd, SourceOpts& src) {
  auto* bench = cmd->add_option("--benchmark", src.benchmark,
                                "Benchmark table file (csv or json)");
  auto* synth = cmd->add_option("--synth-spec", src.synth_spec,
                                "JSON recipe for a generated benchmark");
  bench->excludes(synth);
  cmd->add_option("--format", src.format, "Benchmark file format")
      ->check(CLI::IsMember({"auto", "csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--metrics", src.metrics,
                  "Comma-separated metric subset to keep")
      ->delimiter(',');
  cmd->add_option("--unavailable", src.unavailable,
                  "Metric columns to load as unusable")
      ->delimiter(',');
  cmd->add_flag("--minimize", src.minimize,
                "Objective column is a loss (negated on load)");
  cmd->add_option("--ablation", src.ablation,
                  "Metric preprocessing: min-max scaling or a rank transform")
      ->check(CLI::IsMember({"normalize", "raw", "rank_uniform",
                             "rank_normal"}))
      ->capture_default_str();
  cmd->add_option("--ablation-seed", src.ablation_seed,
                  "Seed for the rank_normal transform")
      ->capture_default_str();
  cmd->add_option("--task", src.task, "Label used in report rows");
}

SynthSpec spec_from_json(const nlohmann::json& j, std::uint64_t& seed,
                         std::size_t& n, std::size_t& m) {
  SynthSpec spec;
  seed = j.value("seed", std::uint64_t{0});
  n = j.value("n", std::size_t{0});
  m = j.value("m", std::size_t{0});
  if (j.contains("signal")) {
    spec.signal = j.at("signal").get<std::vector<double>>();
  }
  spec.noise = j.value("noise", spec.noise);
  spec.genes = j.value("genes", spec.genes);
  spec.cardinality = j.value("cardinality", spec.cardinality);
  return spec;
}

BenchmarkTable load_raw(const SourceOpts& src) {
  if (!src.synth_spec.empty()) {
    std::ifstream in(src.synth_spec);
    if (!in) throw std::runtime_error("cannot open " + src.synth_spec);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("malformed synth spec: " +
                               std::string(e.what()));
    }
    std::uint64_t seed = 0;
    std::size_t n = 0, m = 0;
    const SynthSpec spec = spec_from_json(j, seed, n, m);
    return synth_benchmark(seed, n, m, spec);
  }
  if (src.benchmark.empty()) {
    throw std::invalid_argument("one of --benchmark/--synth-spec is required");
  }
  TableFormat format = TableFormat::csv;
  if (src.format == "json" ||
      (src.format == "auto" && fs::path(src.benchmark).extension() == ".json")) {
    format = TableFormat::json;
  }
  LoadOptions opts;
  opts.objective_higher_is_better = !src.minimize;
  opts.unavailable_metrics = src.unavailable;
  return load_benchmark(src.benchmark, format, opts);
}

BenchmarkTable load_prepared(const SourceOpts& src) {
  BenchmarkTable t = load_raw(src);
  if (!src.metrics.empty()) t = select_metrics(t, src.metrics);
  if (src.ablation == "normalize") {
    t = normalize_metrics(t);
  } else {
    AblationMode mode = AblationMode::raw;
    if (src.ablation == "rank_uniform") mode = AblationMode::rank_uniform;
    if (src.ablation == "rank_normal") mode = AblationMode::rank_normal;
    t = ablation_transform(t, mode, src.ablation_seed);
  }
  t.validate();
  return t;
}

std::string task_label(const SourceOpts& src) {
  if (!src.task.empty()) return src.task;
  if (!src.benchmark.empty()) return fs::path(src.benchmark).stem().string();
  if (!src.synth_spec.empty()) return fs::path(src.synth_spec).stem().string();
  return "synth";
}

// ---- seed lists ------------------------------------------------------------

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  auto parse_one = [](const std::string& tok) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw std::invalid_argument("bad seed '" + tok + "'");
    }
    return v;
  };
  std::vector<std::uint64_t> seeds;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const std::uint64_t lo = parse_one(text.substr(0, range));
    const std::uint64_t hi = parse_one(text.substr(range + 2));
    if (hi < lo) throw std::invalid_argument("seed range is reversed");
    if (hi - lo > 1000000) throw std::invalid_argument("seed range too large");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      if (comma == std::string::npos) comma = text.size();
      seeds.push_back(parse_one(text.substr(pos, comma - pos)));
      pos = comma + 1;
      if (comma == text.size()) break;
    }
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

// ---- shared run plumbing ----------------------------------------------------

SummaryRow summary_of(const std::string& method, std::uint64_t seed, int budget,
                      const RunRecord& rec, const BenchmarkTable& table,
                      const Ranking& rank_f) {
  SummaryRow row;
  row.method = method;
  row.seed = std::to_string(seed);
  row.budget = budget;
  if (rec.best_weight) row.t0 = rec.t0;
  if (rec.proposal) {
    const int arch = rec.proposal->proposed_arch;
    row.arch_id = table.arch_ids[std::size_t(arch)];
    row.f = rec.proposal->proposed_f;
    if (!table.test_objective.empty()) {
      row.f_test = table.test_objective[std::size_t(arch)];
    }
    row.rank = double(rank_f.rank[std::size_t(arch)]);
    row.distinct_queries = rec.proposal->total_distinct_queries;
    row.source = to_string(rec.proposal->source);
  }
  return row;
}

std::vector<CurvePoint> curve_points(const std::string& task,
                                     const RunRecord& rec,
                                     const BenchmarkTable& table,
                                     const Ranking& rank_f) {
  std::vector<CurvePoint> pts;
  std::set<int> seen;
  int queries = 0;
  double best = -std::numeric_limits<double>::infinity();
  int best_rank = 0;
  auto visit = [&](int arch) {
    if (!seen.insert(arch).second) return;
    ++queries;
    const double f = table.objective[std::size_t(arch)];
    if (f > best) {
      best = f;
      best_rank = rank_f.rank[std::size_t(arch)];
    }
    pts.push_back({task, rec.method, std::to_string(rec.seed), queries, best,
                   best_rank});
  };
  for (const TraceStep& s : rec.steps) {
    if (s.fresh) visit(s.arch);
  }
  if (rec.proposal) {
    for (int arch : rec.proposal->greedy_set) visit(arch);
  }
  return pts;
}

RunRecord record_of(const std::string& method, std::uint64_t seed, int budget,
                    const HybridRun& run) {
  RunRecord rec;
  rec.method = method;
  rec.seed = seed;
  rec.budget = budget;
  rec.steps = run.trace.steps;
  rec.t0 = run.trace.t0;
  rec.best_weight = run.trace.best_weight;
  rec.best_arch = run.trace.best_weight_arch;
  rec.proposal = run.proposal;
  return rec;
}

RunRecord record_of(const std::string& method, std::uint64_t seed, int budget,
                    const BaselineOutcome& out) {
  RunRecord rec;
  rec.method = method;
  rec.seed = seed;
  rec.budget = budget;
  rec.steps = out.steps;
  rec.t0 = int(out.cache.size());
  rec.proposal = out.proposal;
  return rec;
}

fs::path trace_path(const fs::path& out, const std::string& method,
                    std::uint64_t seed) {
  return out / ("trace_" + method + "_seed" + std::to_string(seed) + ".jsonl");
}

// ---- subcommand payloads ----------------------------------------------------

struct SearchOpts {
  SourceOpts src;
  int budget = 0;
  std::string seeds = "0";
  double kappa = 2.0;
  int candidates = 4096;
  std::string init = "one_hot_first";
  int fixed_t0 = 0;
  bool has_fixed_t0 = false;
  bool spend_leftover = false;
  std::string out = ".";
};

int cmd_search(const SearchOpts& o) {
  const BenchmarkTable table = load_prepared(o.src);
  const Ranking rank_f = objective_ranking(table);
  const std::string task = task_label(o.src);
  const auto seeds = parse_seeds(o.seeds);
  fs::create_directories(o.out);

  std::vector<SummaryRow> rows;
  std::vector<CurvePoint> curves;
  for (std::uint64_t seed : seeds) {
    BOConfig cfg;
    cfg.budget = o.budget;
    cfg.kappa = o.kappa;
    cfg.candidate_count = o.candidates;
    cfg.seed = seed;
    cfg.init = o.init == "random" ? BOConfig::InitDesign::random_init
                                  : BOConfig::InitDesign::one_hot_first;
    if (o.has_fixed_t0) cfg.fixed_t0 = o.fixed_t0;
    cfg.spend_leftover = o.spend_leftover;

    const HybridRun run = run_hybrid_search(table, cfg);
    const RunRecord rec = record_of("hybrid", seed, o.budget, run);
    write_run_jsonl(trace_path(o.out, "hybrid", seed), rec, table);
    rows.push_back(summary_of("hybrid", seed, o.budget, rec, table, rank_f));
    const auto pts = curve_points(task, rec, table, rank_f);
    curves.insert(curves.end(), pts.begin(), pts.end());
  }
  append_aggregate_rows(rows);
  write_summary_csv(fs::path(o.out) / "summary.csv", rows);
  write_curves_csv(fs::path(o.out) / "curves.csv", curves);
  return 0;
}

struct BaselineOpts {
  SourceOpts src;
  std::string method;
  int budget = 0;
  std::string seeds = "0";
  double lr = 0.01;
  double baseline_momentum = 0.9;
  std::string out = ".";
};

int cmd_baseline(const BaselineOpts& o) {
  const BenchmarkTable table = load_prepared(o.src);
  const Ranking rank_f = objective_ranking(table);
  const std::string task = task_label(o.src);
  const auto seeds = parse_seeds(o.seeds);
  fs::create_directories(o.out);

  std::vector<SummaryRow> rows;
  std::vector<CurvePoint> curves;
  for (std::uint64_t seed : seeds) {
    BaselineOutcome outcome;
    if (o.method == "rs") {
      outcome = random_search(table, o.budget, seed);
    } else if (o.method == "rea") {
      outcome = regularized_evolution(table, o.budget, seed);
    } else {
      ReinforceConfig cfg;
      cfg.lr = o.lr;
      cfg.baseline_momentum = o.baseline_momentum;
      outcome = reinforce_search(table, o.budget, seed, cfg);
    }
    const RunRecord rec = record_of(o.method, seed, o.budget, outcome);
    write_run_jsonl(trace_path(o.out, o.method, seed), rec, table);
    rows.push_back(summary_of(o.method, seed, o.budget, rec, table, rank_f));
    const auto pts = curve_points(task, rec, table, rank_f);
    curves.insert(curves.end(), pts.begin(), pts.end());
  }
  append_aggregate_rows(rows);
  write_summary_csv(fs::path(o.out) / "summary.csv", rows);
  write_curves_csv(fs::path(o.out) / "curves.csv", curves);
  return 0;
}

struct AnalyzeOpts {
  SourceOpts src;
  int T = 100;
  std::vector<std::string> weight_files;
  std::string trace_dir;
  bool regret = false;
  int ref_samples = 256;
  std::uint64_t ref_seed = 0;
  std::string out = ".";
};

void score_rows(const std::string& task, const std::string& label,
                std::span<const double> scores, const BenchmarkTable& table,
                const Ranking& rank_f, int T, std::vector<ReportRow>& reports,
                std::vector<TopRankRow>& tops) {
  const PrecisionReport rep =
      make_precision_report(scores, table.objective, T);
  reports.push_back({task, label, T, rep.precision, rep.expected_rank,
                     rep.spearman, rep.pearson});
  const auto order = ranked_indices(rank_by(scores));
  TopRankRow top;
  top.task = task;
  top.metric_or_method = label;
  top.T = T;
  top.top1_rank = rank_f.rank[std::size_t(order[0])];
  int best = std::numeric_limits<int>::max();
  for (int k = 0; k < T && k < int(order.size()); ++k) {
    best = std::min(best, rank_f.rank[std::size_t(order[std::size_t(k)])]);
  }
  top.best_rank_in_top_t = best;
  tops.push_back(top);
}

int cmd_analyze(const AnalyzeOpts& o) {
  const BenchmarkTable table = load_prepared(o.src);
  const Ranking rank_f = objective_ranking(table);
  const std::string task = task_label(o.src);
  fs::create_directories(o.out);

  std::vector<ReportRow> reports;
  std::vector<TopRankRow> tops;

  const auto avail = table.available_indices();
  for (std::size_t idx : avail) {
    score_rows(task, table.metric_names[idx], table.metrics[idx], table,
               rank_f, o.T, reports, tops);
  }

  // uniform weighting across all available metrics
  const WeightVector uniform(std::vector<double>(avail.size(), 1.0));
  score_rows(task, "average", combine(table, uniform).scores, table, rank_f,
             o.T, reports, tops);

  for (const std::string& file : o.weight_files) {
    const WeightVector w = read_weight_file(file);
    score_rows(task, "learned_" + fs::path(file).stem().string(),
               combine(table, w).scores, table, rank_f, o.T, reports, tops);
  }

  // sampled-optimal reference: best precision over one-hots plus random draws
  {
    const std::size_t dim = avail.size();
    double best_precision = -1.0;
    std::vector<double> best_scores;
    auto consider = [&](const WeightVector& w) {
      const CombinedMetric cm = combine(table, w);
      const double p = precision_at_t(cm.ranking, rank_f, o.T);
      if (p > best_precision) {
        best_precision = p;
        best_scores = cm.scores;
      }
    };
    for (std::size_t i = 0; i < dim; ++i) {
      consider(WeightVector::one_hot(dim, i));
    }
    Rng rng(o.ref_seed);
    for (int i = 0; i < o.ref_samples; ++i) {
      std::vector<double> w(dim);
      for (double& v : w) v = rng.uniform(-1.0, 1.0);
      consider(WeightVector(std::move(w)));
    }
    score_rows(task, "sampled_optimal", best_scores, table, rank_f, o.T,
               reports, tops);
  }

  write_report_csv(fs::path(o.out) / "precision_report.csv", reports);
  write_top_ranks_csv(fs::path(o.out) / "top_ranks.csv", tops);

  if (!o.trace_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(o.trace_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".jsonl") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());

    std::vector<CurvePoint> curves;
    std::vector<RegretRow> regrets;
    for (const fs::path& file : files) {
      const RunRecord rec = read_run_jsonl(file, table);
      const auto pts = curve_points(task, rec, table, rank_f);
      curves.insert(curves.end(), pts.begin(), pts.end());

      if (o.regret) {
        bool weighted = !rec.steps.empty();
        for (const TraceStep& s : rec.steps) weighted &= s.w.size() > 0;
        if (!weighted) continue;  // weightless methods have no regret curve
        SearchTrace trace;
        trace.steps = rec.steps;
        trace.t0 = rec.t0;
        const RegretCurve curve =
            empirical_regret(trace, table, o.T, o.ref_samples, o.ref_seed);
        double prev = 0.0;
        for (std::size_t i = 0; i < curve.cumulative.size(); ++i) {
          const double inc = curve.cumulative[i] - prev;
          prev = curve.cumulative[i];
          regrets.push_back({task, rec.method, std::to_string(rec.seed),
                             rec.steps[i].t,
                             curve.reference_precision - inc,
                             curve.cumulative[i],
                             curve.reference_precision});
        }
      }
    }
    write_curves_csv(fs::path(o.out) / "curves.csv", curves);
    if (o.regret) {
      write_regret_csv(fs::path(o.out) / "regret.csv", regrets);
    }
  }
  return 0;
}

struct SynthOpts {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> signal;
  double noise = 0.25;
  int genes = 6;
  int cardinality = 4;
  std::string out = ".";
};

int cmd_synth(const SynthOpts& o) {
  SynthSpec spec;
  spec.signal = o.signal;
  spec.noise = o.noise;
  spec.genes = o.genes;
  spec.cardinality = o.cardinality;
  const BenchmarkTable table = synth_benchmark(o.seed, o.n, o.m, spec);
  fs::create_directories(o.out);
  const fs::path file =
      fs::path(o.out) / ("synth_seed" + std::to_string(o.seed) + "_n" +
                         std::to_string(o.n) + "_m" + std::to_string(o.m) +
                         ".csv");
  save_benchmark(table, file, TableFormat::csv);
  for (std::size_t i = 0; i < table.metric_count(); ++i) {
    const double rho = spearman(table.metrics[i], table.objective);
    std::cout << table.metric_names[i] << " spearman " << fmt(rho) << "\n";
  }
  std::cout << "wrote " << file.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric-ensemble architecture search over tabular benchmarks"};
  app.require_subcommand(1);
  // INI defaults; keys live in a [section] named after the subcommand and
  // explicit flags always win. Must precede the subcommand on the command
  // line: proxyens --config run.ini search ...
  app.set_config("--config", "", "Read option defaults from an INI file");

  SearchOpts search;
  auto* cs = app.add_subcommand(
      "search", "Surrogate weight search plus greedy exploitation");
  add_source_flags(cs, search.src);
  cs->add_option("--budget", search.budget, "Distinct-query budget")
      ->required()
      ->check(CLI::PositiveNumber);
  cs->add_option("--seeds", search.seeds, "Seed list: A..B or a,b,c")
      ->capture_default_str();
  cs->add_option("--kappa", search.kappa, "Exploration coefficient")
      ->capture_default_str();
  cs->add_option("--candidates", search.candidates,
                 "Acquisition candidates per iteration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cs->add_option("--init", search.init, "Initial design")
      ->check(CLI::IsMember({"one_hot_first", "random"}))
      ->capture_default_str();
  auto* ft = cs->add_option("--fixed-t0", search.fixed_t0,
                            "Run exactly this many surrogate rounds");
  cs->add_flag("--spend-leftover", search.spend_leftover,
               "Extend the greedy walk until the whole budget is spent");
  cs->add_option("--out", search.out, "Output directory")
      ->capture_default_str();

  BaselineOpts baseline;
  auto* cb = app.add_subcommand("baseline", "Reference search algorithms");
  add_source_flags(cb, baseline.src);
  cb->add_option("--method", baseline.method, "rs, rea or reinforce")
      ->required()
      ->check(CLI::IsMember({"rs", "rea", "reinforce"}));
  cb->add_option("--budget", baseline.budget, "Distinct-query budget")
      ->required()
      ->check(CLI::PositiveNumber);
  cb->add_option("--seeds", baseline.seeds, "Seed list: A..B or a,b,c")
      ->capture_default_str();
  cb->add_option("--lr", baseline.lr, "Policy-gradient learning rate")
      ->capture_default_str();
  cb->add_option("--baseline-momentum", baseline.baseline_momentum,
                 "Reward moving-average momentum")
      ->capture_default_str();
  cb->add_option("--out", baseline.out, "Output directory")
      ->capture_default_str();

  AnalyzeOpts analyze;
  auto* ca = app.add_subcommand(
      "analyze", "Ranking-quality reports and plot data");
  add_source_flags(ca, analyze.src);
  ca->add_option("--t", analyze.T, "Prefix size T for precision reports")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ca->add_option("--weights", analyze.weight_files,
                 "Weight file(s) to evaluate (json or trace jsonl)");
  ca->add_option("--trace-dir", analyze.trace_dir,
                 "Directory of trace_*.jsonl runs to turn into curves");
  ca->add_flag("--regret", analyze.regret,
               "Also emit cumulative regret rows for weighted traces");
  ca->add_option("--ref-samples", analyze.ref_samples,
                 "Random weights sampled for the reference precision")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  ca->add_option("--ref-seed", analyze.ref_seed,
                 "Seed for the sampled reference")
      ->capture_default_str();
  ca->add_option("--out", analyze.out, "Output directory")
      ->capture_default_str();

  SynthOpts synth;
  auto* cy = app.add_subcommand("synth", "Generate a synthetic benchmark");
  cy->add_option("--seed", synth.seed, "Generator seed")
      ->capture_default_str();
  cy->add_option("--n", synth.n, "Architecture count")->required();
  cy->add_option("--m", synth.m, "Metric count")->required();
  cy->add_option("--signal", synth.signal,
                 "Per-metric signal strengths in [0,1]")
      ->delimiter(',');
  cy->add_option("--noise", synth.noise, "Metric noise scale")
      ->capture_default_str();
  cy->add_option("--genes", synth.genes, "Genome length")
      ->capture_default_str();
  cy->add_option("--cardinality", synth.cardinality,
                 "Choices per gene")
      ->capture_default_str();
  cy->add_option("--out", synth.out, "Output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cs->parsed()) {
      search.has_fixed_t0 = ft->count() > 0;
      return cmd_search(search);
    }
    if (cb->parsed()) return cmd_baseline(baseline);
    if (ca->parsed()) return cmd_analyze(analyze);
    return cmd_synth(synth);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
