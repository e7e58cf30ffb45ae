#include "proxyens/table.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "text_util.hpp"

namespace proxyens {

namespace {

using ordered_json = nlohmann::ordered_json;
using detail::fmt_double;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

double parse_double(const std::string& tok, const std::string& what) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    fail("non-numeric " + what + ": '" + tok + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

struct ColumnLayout {
  bool has_genome = false;
  bool has_test = false;
  std::vector<std::string> metric_names;
};

ColumnLayout parse_header(const std::vector<std::string>& header) {
  if (header.empty() || header[0] != "arch_id") {
    fail("malformed header: first column must be arch_id");
  }
  ColumnLayout lay;
  std::size_t i = 1;
  if (i < header.size() && header[i] == "genome") {
    lay.has_genome = true;
    ++i;
  }
  while (i < header.size() && header[i] != "f_val") {
    lay.metric_names.push_back(header[i]);
    ++i;
  }
  if (i >= header.size()) fail("objective column f_val absent");
  ++i;  // skip f_val
  if (i < header.size()) {
    if (header[i] != "f_test" || i + 1 != header.size()) {
      fail("malformed header: only f_test may follow f_val");
    }
    lay.has_test = true;
  }
  if (lay.metric_names.empty()) fail("no metric columns");
  return lay;
}

void finish_table(BenchmarkTable& t, const LoadOptions& opts) {
  t.objective_higher_is_better = opts.objective_higher_is_better;
  if (!opts.objective_higher_is_better) {
    for (double& v : t.objective) v = -v;
    for (double& v : t.test_objective) v = -v;
  }
  t.available.assign(t.metric_count(), 1);
  for (const std::string& name : opts.unavailable_metrics) {
    auto it = std::find(t.metric_names.begin(), t.metric_names.end(), name);
    if (it == t.metric_names.end()) {
      fail("unavailable metric '" + name + "' not in table");
    }
    t.available[static_cast<std::size_t>(it - t.metric_names.begin())] = 0;
  }
  if (!t.genomes.empty()) {
    const std::size_t genes = t.genomes.front().size();
    t.gene_cardinalities.assign(genes, 1);
    for (const Genome& g : t.genomes) {
      if (g.size() != genes) fail("genomes differ in length");
      for (std::size_t k = 0; k < genes; ++k) {
        t.gene_cardinalities[k] = std::max(t.gene_cardinalities[k], g[k] + 1);
      }
    }
  }
  t.validate();
}

BenchmarkTable load_csv(const std::filesystem::path& path,
                        const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail("empty benchmark file " + path.string());
  const auto header = split_csv_line(line);
  const ColumnLayout lay = parse_header(header);

  BenchmarkTable t;
  t.metric_names = lay.metric_names;
  t.metrics.assign(t.metric_names.size(), {});
  std::set<std::string> na_ok(opts.unavailable_metrics.begin(),
                              opts.unavailable_metrics.end());
  std::set<std::string> seen_ids;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail("row has " + std::to_string(cells.size()) + " cells, expected " +
           std::to_string(header.size()));
    }
    std::size_t i = 0;
    const std::string& id = cells[i++];
    if (!seen_ids.insert(id).second) fail("duplicate arch_id '" + id + "'");
    t.arch_ids.push_back(id);
    if (lay.has_genome) t.genomes.push_back(parse_genome(cells[i++]));
    for (std::size_t m = 0; m < t.metric_names.size(); ++m, ++i) {
      if (cells[i] == "na") {
        if (!na_ok.count(t.metric_names[m])) {
          fail("na cell in available metric column '" + t.metric_names[m] +
               "'");
        }
        t.metrics[m].push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        t.metrics[m].push_back(
            parse_double(cells[i], "metric " + t.metric_names[m]));
      }
    }
    t.objective.push_back(parse_double(cells[i++], "objective f_val"));
    if (lay.has_test) {
      t.test_objective.push_back(parse_double(cells[i++], "objective f_test"));
    }
  }
  if (t.arch_count() == 0) fail("benchmark has no rows");
  finish_table(t, opts);
  return t;
}

BenchmarkTable load_json(const std::filesystem::path& path,
                         const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    fail("malformed JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) fail("benchmark JSON must be a single object");

  std::vector<std::string> header;
  for (const auto& item : j.items()) header.push_back(item.key());
  const ColumnLayout lay = parse_header(header);

  auto expect_array = [&](const std::string& key) -> const ordered_json& {
    const auto& a = j.at(key);
    if (!a.is_array()) fail("field '" + key + "' must be an array");
    return a;
  };

  BenchmarkTable t;
  const auto& ids = expect_array("arch_id");
  const std::size_t n = ids.size();
  if (n == 0) fail("benchmark has no rows");
  std::set<std::string> seen_ids;
  for (const auto& v : ids) {
    std::string id = v.is_string() ? v.get<std::string>() : v.dump();
    if (!seen_ids.insert(id).second) fail("duplicate arch_id '" + id + "'");
    t.arch_ids.push_back(std::move(id));
  }
  auto check_len = [&](const std::string& key, std::size_t len) {
    if (len != n) fail("field '" + key + "' length mismatch");
  };
  if (lay.has_genome) {
    const auto& gs = expect_array("genome");
    check_len("genome", gs.size());
    for (const auto& v : gs) t.genomes.push_back(parse_genome(v.get<std::string>()));
  }
  std::set<std::string> na_ok(opts.unavailable_metrics.begin(),
                              opts.unavailable_metrics.end());
  t.metric_names = lay.metric_names;
  for (const std::string& name : lay.metric_names) {
    const auto& col = expect_array(name);
    check_len(name, col.size());
    std::vector<double> vals;
    for (const auto& v : col) {
      if (v.is_null()) {
        if (!na_ok.count(name)) {
          fail("na cell in available metric column '" + name + "'");
        }
        vals.push_back(std::numeric_limits<double>::quiet_NaN());
      } else if (v.is_number()) {
        vals.push_back(v.get<double>());
      } else {
        fail("non-numeric metric " + name);
      }
    }
    t.metrics.push_back(std::move(vals));
  }
  const auto& fv = expect_array("f_val");
  check_len("f_val", fv.size());
  for (const auto& v : fv) {
    if (!v.is_number()) fail("non-numeric objective f_val");
    t.objective.push_back(v.get<double>());
  }
  if (lay.has_test) {
    const auto& ft = expect_array("f_test");
    check_len("f_test", ft.size());
    for (const auto& v : ft) {
      if (!v.is_number()) fail("non-numeric objective f_test");
      t.test_objective.push_back(v.get<double>());
    }
  }
  finish_table(t, opts);
  return t;
}

}  // namespace

std::string genome_to_string(const Genome& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(g[i]);
  }
  return out;
}

Genome parse_genome(const std::string& text) {
  Genome g;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dash = text.find('-', pos);
    if (dash == std::string::npos) dash = text.size();
    const std::string tok = text.substr(pos, dash - pos);
    int v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 0) {
      fail("malformed genome '" + text + "'");
    }
    g.push_back(v);
    pos = dash + 1;
    if (dash == text.size()) break;
  }
  if (g.empty()) fail("malformed genome '" + text + "'");
  return g;
}

Ranking rank_by(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("rank_by: empty scores");
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("rank_by: non-finite score");
  }
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  Ranking r;
  r.rank.assign(scores.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    r.rank[order[k]] = static_cast<int>(k) + 1;
  }
  return r;
}

std::vector<int> ranked_indices(const Ranking& r) {
  std::vector<int> order(r.rank.size());
  for (std::size_t a = 0; a < r.rank.size(); ++a) {
    order[static_cast<std::size_t>(r.rank[a]) - 1] = static_cast<int>(a);
  }
  return order;
}

std::size_t BenchmarkTable::available_count() const {
  return static_cast<std::size_t>(
      std::count(available.begin(), available.end(), std::uint8_t{1}));
}

std::vector<std::size_t> BenchmarkTable::available_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t m = 0; m < available.size(); ++m) {
    if (available[m]) idx.push_back(m);
  }
  return idx;
}

void BenchmarkTable::validate() const {
  const std::size_t n = arch_count();
  if (n == 0) fail("table has no architectures");
  if (arch_ids.size() != n) fail("arch_ids length mismatch");
  if (metric_names.empty()) fail("no metric columns");
  if (metrics.size() != metric_names.size() ||
      available.size() != metric_names.size()) {
    fail("metric column bookkeeping mismatch");
  }
  if (available_count() == 0) fail("zero available metrics");
  std::set<std::string> names(metric_names.begin(), metric_names.end());
  if (names.size() != metric_names.size()) fail("duplicate metric names");
  std::set<std::string> ids(arch_ids.begin(), arch_ids.end());
  if (ids.size() != n) fail("duplicate arch_id");
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    if (metrics[m].size() != n) fail("metric column length mismatch");
    if (!available[m]) continue;
    for (double v : metrics[m]) {
      if (!std::isfinite(v)) {
        fail("non-finite value in available metric '" + metric_names[m] + "'");
      }
    }
  }
  for (double v : objective) {
    if (!std::isfinite(v)) fail("non-finite objective value");
  }
  if (!test_objective.empty() && test_objective.size() != n) {
    fail("test objective length mismatch");
  }
  if (!genomes.empty()) {
    if (genomes.size() != n) fail("genome list length mismatch");
    for (const Genome& g : genomes) {
      if (g.size() != gene_cardinalities.size()) fail("genome length mismatch");
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (g[k] < 0 || g[k] >= gene_cardinalities[k]) {
          fail("gene value out of range in genome " + genome_to_string(g));
        }
      }
    }
  }
}

BenchmarkTable load_benchmark(const std::filesystem::path& path,
                              TableFormat format, const LoadOptions& opts) {
  return format == TableFormat::csv ? load_csv(path, opts)
                                    : load_json(path, opts);
}

void save_benchmark(const BenchmarkTable& table,
                    const std::filesystem::path& path, TableFormat format) {
  table.validate();
  std::ofstream out(path);
  if (!out) fail("cannot write " + path.string());
  const bool has_genome = !table.genomes.empty();
  const bool has_test = !table.test_objective.empty();
  const std::size_t n = table.arch_count();
  if (format == TableFormat::csv) {
    out << "arch_id";
    if (has_genome) out << ",genome";
    for (const auto& name : table.metric_names) out << ',' << name;
    out << ",f_val";
    if (has_test) out << ",f_test";
    out << '\n';
    for (std::size_t a = 0; a < n; ++a) {
      out << table.arch_ids[a];
      if (has_genome) out << ',' << genome_to_string(table.genomes[a]);
      for (std::size_t m = 0; m < table.metrics.size(); ++m) {
        const double v = table.metrics[m][a];
        out << ',' << (std::isnan(v) ? "na" : fmt_double(v));
      }
      out << ',' << fmt_double(table.objective[a]);
      if (has_test) out << ',' << fmt_double(table.test_objective[a]);
      out << '\n';
    }
  } else {
    ordered_json j;
    j["arch_id"] = table.arch_ids;
    if (has_genome) {
      std::vector<std::string> gs;
      for (const Genome& g : table.genomes) gs.push_back(genome_to_string(g));
      j["genome"] = gs;
    }
    for (std::size_t m = 0; m < table.metrics.size(); ++m) {
      ordered_json col = ordered_json::array();
      for (double v : table.metrics[m]) {
        if (std::isnan(v)) {
          col.push_back(nullptr);
        } else {
          col.push_back(v);
        }
      }
      j[table.metric_names[m]] = std::move(col);
    }
    j["f_val"] = table.objective;
    if (has_test) j["f_test"] = table.test_objective;
    out << j.dump(1) << '\n';
  }
  if (!out) fail("write failed for " + path.string());
}

BenchmarkTable normalize_metrics(const BenchmarkTable& table) {
  table.validate();
  BenchmarkTable t = table;
  for (std::size_t m = 0; m < t.metrics.size(); ++m) {
    if (!t.available[m]) continue;
    auto& col = t.metrics[m];
    const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
    const double lo = *lo_it, hi = *hi_it;
    if (lo == hi) {
      std::fill(col.begin(), col.end(), 0.5);
    } else {
      for (double& v : col) v = (v - lo) / (hi - lo);
    }
  }
  t.normalized = true;
  return t;
}

BenchmarkTable select_metrics(const BenchmarkTable& table,
                              const std::vector<std::string>& names) {
  table.validate();
  BenchmarkTable t = table;
  t.metric_names.clear();
  t.metrics.clear();
  t.available.clear();
  for (const std::string& name : names) {
    auto it = std::find(table.metric_names.begin(), table.metric_names.end(),
                        name);
    if (it == table.metric_names.end()) fail("unknown metric '" + name + "'");
    const auto m = static_cast<std::size_t>(it - table.metric_names.begin());
    t.metric_names.push_back(name);
    t.metrics.push_back(table.metrics[m]);
    t.available.push_back(table.available[m]);
  }
  t.validate();
  return t;
}

Ranking objective_ranking(const BenchmarkTable& table) {
  return rank_by(table.objective);
}

// Value-level equality (metadata flags excluded); NaN cells compare equal so
// that saved "na" round-trips count as identical.
bool tables_equal(const BenchmarkTable& a, const BenchmarkTable& b) {
  auto cols_equal = [](const std::vector<double>& x,
                       const std::vector<double>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!same_bits(x[i], y[i]) && !(std::isnan(x[i]) && std::isnan(y[i]))) {
        return false;
      }
    }
    return true;
  };
  if (a.arch_ids != b.arch_ids || a.metric_names != b.metric_names ||
      a.available != b.available || a.genomes != b.genomes ||
      a.gene_cardinalities != b.gene_cardinalities) {
    return false;
  }
  if (a.metrics.size() != b.metrics.size()) return false;
  for (std::size_t m = 0; m < a.metrics.size(); ++m) {
    if (!cols_equal(a.metrics[m], b.metrics[m])) return false;
  }
  return cols_equal(a.objective, b.objective) &&
         cols_equal(a.test_objective, b.test_objective);
}

}  // namespace proxyens
