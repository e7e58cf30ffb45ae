#include "proxyens/run_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "text_util.hpp"

namespace proxyens {

namespace {

using ordered_json = nlohmann::ordered_json;
using detail::fmt_double;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write " + path.string());
  return out;
}

const std::string& id_of(const BenchmarkTable& table, int arch) {
  if (arch < 0 || static_cast<std::size_t>(arch) >= table.arch_count()) {
    fail("architecture index out of range");
  }
  return table.arch_ids[static_cast<std::size_t>(arch)];
}

std::unordered_map<std::string, int> id_lookup(const BenchmarkTable& table) {
  std::unordered_map<std::string, int> map;
  for (std::size_t a = 0; a < table.arch_count(); ++a) {
    map.emplace(table.arch_ids[a], static_cast<int>(a));
  }
  return map;
}

ProposalSource source_from(const std::string& s) {
  if (s == "bo_phase") return ProposalSource::bo_phase;
  if (s == "greedy_phase") return ProposalSource::greedy_phase;
  if (s == "search") return ProposalSource::search;
  fail("unknown proposal source '" + s + "'");
}

std::string cell(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

}  // namespace

void write_run_jsonl(const std::filesystem::path& path, const RunRecord& run,
                     const BenchmarkTable& table) {
  auto out = open_out(path);
  for (const TraceStep& s : run.steps) {
    ordered_json j;
    j["t"] = s.t;
    if (s.w.size() > 0) j["w"] = s.w.values();
    j["arch_id"] = id_of(table, s.arch);
    j["f"] = s.f;
    j["fresh"] = s.fresh;
    out << j.dump() << '\n';
  }
  ordered_json foot;
  foot["T0"] = run.t0;
  if (run.best_weight) foot["best_weight"] = run.best_weight->values();
  if (run.best_arch) foot["best_arch"] = id_of(table, *run.best_arch);
  foot["method"] = run.method;
  foot["seed"] = run.seed;
  foot["budget"] = run.budget;
  if (run.proposal) {
    const ProposalResult& p = *run.proposal;
    ordered_json pj;
    pj["arch_id"] = id_of(table, p.proposed_arch);
    pj["f"] = p.proposed_f;
    pj["distinct_queries"] = p.total_distinct_queries;
    ordered_json gs = ordered_json::array();
    for (int a : p.greedy_set) gs.push_back(id_of(table, a));
    pj["greedy_set"] = std::move(gs);
    pj["source"] = to_string(p.source);
    foot["proposal"] = std::move(pj);
  }
  out << foot.dump() << '\n';
  if (!out) fail("write failed for " + path.string());
}

RunRecord read_run_jsonl(const std::filesystem::path& path,
                         const BenchmarkTable& table) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  const auto ids = id_lookup(table);
  auto arch_of = [&](const ordered_json& v) {
    const std::string id = v.get<std::string>();
    auto it = ids.find(id);
    if (it == ids.end()) fail("trace arch_id '" + id + "' not in table");
    return it->second;
  };

  RunRecord run;
  bool have_footer = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      fail("malformed trace line: " + std::string(e.what()));
    }
    if (j.contains("T0")) {
      run.t0 = j.at("T0").get<int>();
      if (j.contains("best_weight")) {
        run.best_weight =
            WeightVector(j.at("best_weight").get<std::vector<double>>());
      }
      if (j.contains("best_arch")) run.best_arch = arch_of(j.at("best_arch"));
      run.method = j.value("method", std::string());
      run.seed = j.value("seed", std::uint64_t{0});
      run.budget = j.value("budget", 0);
      if (j.contains("proposal")) {
        const auto& pj = j.at("proposal");
        ProposalResult p;
        p.proposed_arch = arch_of(pj.at("arch_id"));
        p.proposed_f = pj.at("f").get<double>();
        p.total_distinct_queries = pj.at("distinct_queries").get<int>();
        for (const auto& v : pj.at("greedy_set")) {
          p.greedy_set.push_back(arch_of(v));
        }
        p.source = source_from(pj.at("source").get<std::string>());
        run.proposal = std::move(p);
      }
      have_footer = true;
      break;
    }
    TraceStep s;
    s.t = j.at("t").get<int>();
    if (j.contains("w")) s.w = WeightVector(j.at("w").get<std::vector<double>>());
    s.arch = arch_of(j.at("arch_id"));
    s.f = j.at("f").get<double>();
    s.fresh = j.at("fresh").get<bool>();
    run.steps.push_back(std::move(s));
  }
  if (!have_footer) fail("trace " + path.string() + " has no footer");
  return run;
}

void append_aggregate_rows(std::vector<SummaryRow>& rows) {
  if (rows.empty()) return;
  auto aggregate = [&](auto pick) -> std::pair<std::optional<double>, std::optional<double>> {
    std::vector<double> vals;
    for (const SummaryRow& r : rows) {
      if (auto v = pick(r)) vals.push_back(*v);
    }
    if (vals.size() != rows.size()) return {std::nullopt, std::nullopt};
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= double(vals.size());
    return {mean, std::sqrt(var)};
  };
  const auto [f_mean, f_std] = aggregate([](const SummaryRow& r) { return r.f; });
  const auto [t_mean, t_std] =
      aggregate([](const SummaryRow& r) { return r.f_test; });
  const auto [r_mean, r_std] =
      aggregate([](const SummaryRow& r) { return r.rank; });

  SummaryRow mean_row, std_row;
  mean_row.method = std_row.method = rows.front().method;
  mean_row.budget = std_row.budget = rows.front().budget;
  mean_row.seed = "mean";
  std_row.seed = "std";
  mean_row.f = f_mean;
  std_row.f = f_std;
  mean_row.f_test = t_mean;
  std_row.f_test = t_std;
  mean_row.rank = r_mean;
  std_row.rank = r_std;
  rows.push_back(std::move(mean_row));
  rows.push_back(std::move(std_row));
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "method,seed,budget,t0,arch_id,f,f_test,rank,distinct_queries,source\n";
  for (const SummaryRow& r : rows) {
    out << r.method << ',' << r.seed << ',' << r.budget << ','
        << (r.t0 ? std::to_string(*r.t0) : std::string()) << ','
        << (r.arch_id ? *r.arch_id : std::string()) << ',' << cell(r.f) << ','
        << cell(r.f_test) << ',' << cell(r.rank) << ','
        << (r.distinct_queries ? std::to_string(*r.distinct_queries)
                               : std::string())
        << ',' << r.source << '\n';
  }
  if (!out) fail("write failed for " + path.string());
}

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<ReportRow>& rows) {
  auto out = open_out(path);
  out << "task,metric_or_method,T,precision,expected_rank,spearman,pearson\n";
  for (const ReportRow& r : rows) {
    out << r.task << ',' << r.metric_or_method << ',' << r.T << ','
        << fmt_double(r.precision) << ',' << cell(r.expected_rank) << ','
        << cell(r.spearman) << ',' << cell(r.pearson) << '\n';
  }
  if (!out) fail("write failed for " + path.string());
}

void write_top_ranks_csv(const std::filesystem::path& path,
                         const std::vector<TopRankRow>& rows) {
  auto out = open_out(path);
  out << "task,metric_or_method,T,top1_rank,best_rank_in_top_t\n";
  for (const TopRankRow& r : rows) {
    out << r.task << ',' << r.metric_or_method << ',' << r.T << ','
        << r.top1_rank << ',' << r.best_rank_in_top_t << '\n';
  }
  if (!out) fail("write failed for " + path.string());
}

void write_curves_csv(const std::filesystem::path& path,
                      const std::vector<CurvePoint>& rows) {
  auto out = open_out(path);
  out << "task,method,seed,queries,best_f,best_rank\n";
  for (const CurvePoint& r : rows) {
    out << r.task << ',' << r.method << ',' << r.seed << ',' << r.queries
        << ',' << fmt_double(r.best_f) << ',' << r.best_rank << '\n';
  }
  if (!out) fail("write failed for " + path.string());
}

void write_regret_csv(const std::filesystem::path& path,
                      const std::vector<RegretRow>& rows) {
  auto out = open_out(path);
  out << "task,method,seed,t,step_precision,cumulative_regret,"
         "reference_precision\n";
  for (const RegretRow& r : rows) {
    out << r.task << ',' << r.method << ',' << r.seed << ',' << r.t << ','
        << fmt_double(r.step_precision) << ','
        << fmt_double(r.cumulative_regret) << ','
        << fmt_double(r.reference_precision) << '\n';
  }
  if (!out) fail("write failed for " + path.string());
}

WeightVector read_weight_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("missing weight file " + path.string());
  if (path.extension() == ".jsonl") {
    std::string line, last_nonempty;
    while (std::getline(in, line)) {
      if (!line.empty()) last_nonempty = line;
    }
    if (last_nonempty.empty()) fail("empty trace " + path.string());
    const auto j = ordered_json::parse(last_nonempty);
    if (!j.contains("best_weight")) {
      fail("trace footer in " + path.string() + " has no best_weight");
    }
    return WeightVector(j.at("best_weight").get<std::vector<double>>());
  }
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    fail("malformed weight file: " + std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("weights")) {
    fail("weight file must be an object with a 'weights' array");
  }
  return WeightVector(j.at("weights").get<std::vector<double>>());
}

void write_weight_file(const std::filesystem::path& path,
                       const WeightVector& w) {
  auto out = open_out(path);
  ordered_json j;
  j["weights"] = w.values();
  out << j.dump() << '\n';
  if (!out) fail("write failed for " + path.string());
}

}  // namespace proxyens
