#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "avgslope/bounds.hpp"
#include "avgslope/datasets.hpp"
#include "avgslope/error.hpp"
#include "avgslope/extend.hpp"
#include "avgslope/metric.hpp"
#include "avgslope/slope.hpp"
#include "avgslope/smooth_class.hpp"
#include "avgslope/smooth_reg.hpp"

namespace avgslope::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v))
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

// Parses "x7" / "d12" into the 1-based index or 0.
inline std::size_t column_index(const std::string& name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return 0;
  for (std::size_t k = 1; k < name.size(); ++k)
    if (name[k] < '0' || name[k] > '9') return 0;
  return std::stoul(name.substr(1));
}

}  // namespace detail

// Header row with x1..xd (coordinates) or d1..dn (distance-matrix rows), optional weight and label.
inline Dataset parse_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!detail::trim(line).empty()) break;
  }
  if (detail::trim(line).empty()) fail(ErrorCode::ParseError, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = detail::split(line);

  std::vector<std::size_t> col_of;  // column -> 1-based coordinate slot
  std::size_t weight_col = std::string::npos, label_col = std::string::npos, width = 0;
  int kind = 0;  // 1 coords, 2 matrix
  col_of.assign(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& h = header[c];
    if (h == "weight" || h == "label") {
      auto& slot = h == "weight" ? weight_col : label_col;
      if (slot != std::string::npos) fail(ErrorCode::ParseError, "duplicate column " + h);
      slot = c;
      continue;
    }
    const std::size_t xi = detail::column_index(h, 'x'), di = detail::column_index(h, 'd');
    const int k = xi ? 1 : di ? 2 : 0;
    if (!k) fail(ErrorCode::ParseError, "unknown column '" + h + "'");
    if (kind && kind != k) fail(ErrorCode::ParseError, "mixed coordinate and matrix columns");
    kind = k;
    col_of[c] = xi ? xi : di;
    ++width;
  }
  if (!kind) fail(ErrorCode::ParseError, "no x or d columns");
  std::vector<char> seen(width + 1, 0);
  for (std::size_t v : col_of)
    if (v) {
      if (v > width || seen[v]) fail(ErrorCode::ParseError, "coordinate columns must be 1..k without gaps");
      seen[v] = 1;
    }

  Dataset d;
  d.is_matrix = kind == 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line);
    if (cells.size() != header.size())
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                                      " fields");
    std::vector<double> row(width);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double v = detail::parse_number(cells[c], lineno);
      if (c == weight_col) d.weights.push_back(v);
      else if (c == label_col) d.labels.push_back(v);
      else row[col_of[c] - 1] = v;
    }
    d.rows.push_back(std::move(row));
  }
  if (d.rows.empty()) fail(ErrorCode::ParseError, "no data rows");
  if (d.is_matrix && width != d.rows.size()) fail(ErrorCode::NonSquareMatrix, "d-columns must equal row count");
  return d;
}

inline Dataset parse_csv_string(const std::string& s) {
  std::istringstream in(s);
  return parse_csv(in);
}

inline Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return parse_csv(in);
}

inline std::string write_csv(const Dataset& d) {
  std::ostringstream out;
  const std::size_t width = d.rows.empty() ? 0 : d.rows.front().size();
  const char prefix = d.is_matrix ? 'd' : 'x';
  for (std::size_t k = 0; k < width; ++k) out << (k ? "," : "") << prefix << k + 1;
  if (!d.weights.empty()) out << ",weight";
  if (!d.labels.empty()) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    for (std::size_t k = 0; k < width; ++k) out << (k ? "," : "") << format_double(d.rows[i][k]);
    if (!d.weights.empty()) out << ',' << format_double(d.weights[i]);
    if (!d.labels.empty()) out << ',' << format_double(d.labels[i]);
    out << '\n';
  }
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << content;
  if (!out) fail(ErrorCode::IoError, "write failed: " + path);
}

enum class MetricChoice { euclidean, l1, linf, matrix };

inline MetricChoice parse_metric(const std::string& s) {
  if (s == "euclidean") return MetricChoice::euclidean;
  if (s == "l1") return MetricChoice::l1;
  if (s == "linf") return MetricChoice::linf;
  if (s == "matrix") return MetricChoice::matrix;
  fail(ErrorCode::InvalidParameters, "unknown metric '" + s + "'");
}

inline FiniteMetricSpace to_space(const Dataset& d, MetricChoice m) {
  if ((m == MetricChoice::matrix) != d.is_matrix)
    fail(ErrorCode::SchemaMismatch, m == MetricChoice::matrix ? "matrix metric needs d1..dn columns"
                                                              : "d1..dn columns need --metric matrix");
  if (d.is_matrix) return FiniteMetricSpace::from_matrix(d.rows);
  const MetricTag tag = m == MetricChoice::l1 ? MetricTag::l1 : m == MetricChoice::linf ? MetricTag::linf
                                                                                       : MetricTag::euclidean;
  return FiniteMetricSpace::from_coordinates(d.rows, tag);
}

inline std::vector<double> normalized_weights(const Dataset& d) {
  const std::size_t n = d.size();
  if (d.weights.empty()) return std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  double total = 0.0;
  for (double w : d.weights) {
    if (!(w >= 0.0)) fail(ErrorCode::InvalidWeights, "negative weight");
    total += w;
  }
  if (!(total > 0.0)) fail(ErrorCode::InvalidWeights, "weights sum to zero");
  std::vector<double> out(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += out[i] = d.weights[i] / total;
  // Push the rounding residue onto the largest weight so the sum is 1 to within an ulp.
  std::size_t big = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (out[i] > out[big]) big = i;
  out[big] += 1.0 - acc;
  return out;
}

inline LabeledSample to_labeled(const Dataset& d, MetricChoice m, LabelKind kind) {
  if (d.labels.empty()) fail(ErrorCode::SchemaMismatch, "input needs a label column");
  return LabeledSample(WeightedSample(to_space(d, m), normalized_weights(d)), d.labels, kind);
}

// ---- JSON ----

inline json to_json(const SlopeProfile& p) {
  json curve = json::array();
  for (const auto& lp : p.level_curve) curve.push_back({{"t", lp.t}, {"mass", lp.mass}});
  return {{"local", p.local}, {"strong_mean", p.strong_mean}, {"weak_mean", p.weak_mean},
          {"lip", p.lip}, {"level_curve", curve}};
}

inline SlopeProfile slope_profile_from_json(const json& j) {
  SlopeProfile p;
  p.local = j.at("local").get<std::vector<double>>();
  p.strong_mean = j.at("strong_mean").get<double>();
  p.weak_mean = j.at("weak_mean").get<double>();
  p.lip = j.at("lip").get<double>();
  for (const auto& e : j.at("level_curve")) p.level_curve.push_back({e.at("t").get<double>(), e.at("mass").get<double>()});
  return p;
}

inline json to_json(const SmoothingSolution& s) {
  return {{"z", s.z},
          {"per_point_budget", s.per_point_budget},
          {"objective", s.objective},
          {"budget_used", s.budget_used},
          {"budget_cap", s.budget_cap},
          {"max_residual", s.max_residual},
          {"dense_strong_mean", s.dense_strong_mean},
          {"constraint_count", s.constraint_count},
          {"formulation", s.formulation},
          {"solver_stats",
           {{"iterations", s.solver_stats.iterations},
            {"backend", s.solver_stats.backend},
            {"method", s.solver_stats.method},
            {"lower_bound", s.solver_stats.lower_bound}}}};
}

inline SmoothingSolution smoothing_solution_from_json(const json& j) {
  SmoothingSolution s;
  s.z = j.at("z").get<std::vector<double>>();
  s.per_point_budget = j.at("per_point_budget").get<std::vector<double>>();
  s.objective = j.at("objective").get<double>();
  s.budget_used = j.at("budget_used").get<double>();
  s.budget_cap = j.at("budget_cap").get<double>();
  s.max_residual = j.at("max_residual").get<double>();
  s.dense_strong_mean = j.at("dense_strong_mean").get<double>();
  s.constraint_count = j.at("constraint_count").get<std::size_t>();
  s.formulation = j.at("formulation").get<std::string>();
  const auto& st = j.at("solver_stats");
  s.solver_stats.iterations = st.at("iterations").get<std::size_t>();
  s.solver_stats.backend = st.at("backend").get<std::string>();
  s.solver_stats.method = st.at("method").get<std::string>();
  s.solver_stats.lower_bound = st.at("lower_bound").get<double>();
  return s;
}

inline json to_json(const ClsrpLevel& lv) {
  json entries = json::array();
  for (const auto& e : lv.entries) entries.push_back({{"point", e.point}, {"label", e.label}, {"members", e.members}});
  return {{"t", lv.t},           {"radius", lv.radius}, {"net", lv.net},       {"entries", entries},
          {"active", lv.active}, {"weights", lv.weights}, {"demand", lv.demand}, {"cover", lv.cover},
          {"relabel", lv.relabel}};
}

inline ClsrpLevel clsrp_level_from_json(const json& j) {
  ClsrpLevel lv;
  lv.t = j.at("t").get<double>();
  lv.radius = j.at("radius").get<double>();
  lv.net = j.at("net").get<std::vector<std::size_t>>();
  for (const auto& e : j.at("entries"))
    lv.entries.push_back({e.at("point").get<std::size_t>(), e.at("label").get<int>(),
                          e.at("members").get<std::vector<std::size_t>>()});
  lv.active = j.at("active").get<std::vector<std::size_t>>();
  lv.weights = j.at("weights").get<std::vector<double>>();
  lv.demand = j.at("demand").get<double>();
  lv.cover = j.at("cover").get<std::vector<std::size_t>>();
  lv.relabel = j.at("relabel").get<std::vector<std::size_t>>();
  return lv;
}

inline json to_json(const RelabelPlan& p) {
  json levels = json::array();
  for (const auto& lv : p.per_level) levels.push_back(to_json(lv));
  return {{"relabeled_indices", p.relabeled_indices}, {"new_labels", p.new_labels}, {"labels", p.labels},
          {"levels_used", p.levels_used}, {"per_level", levels}};
}

inline RelabelPlan relabel_plan_from_json(const json& j) {
  RelabelPlan p;
  p.relabeled_indices = j.at("relabeled_indices").get<std::vector<std::size_t>>();
  p.new_labels = j.at("new_labels").get<std::vector<double>>();
  p.labels = j.at("labels").get<std::vector<double>>();
  p.levels_used = j.at("levels_used").get<std::vector<double>>();
  for (const auto& lv : j.at("per_level")) p.per_level.push_back(clsrp_level_from_json(lv));
  return p;
}

// Extender anchors: coordinates + metric, or an explicit distance matrix, plus values.
inline json to_json(const Extender& e) {
  const auto& s = e.anchor_space();
  json j{{"values", e.anchor_values()}};
  if (s.is_explicit()) {
    std::vector<std::vector<double>> m(s.size(), std::vector<double>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t k = 0; k < s.size(); ++k) m[i][k] = s.distance(i, k);
    j["matrix"] = m;
  } else {
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto p = s.point(i);
      pts.emplace_back(p.begin(), p.end());
    }
    j["metric"] = metric_name(s.tag());
    j["coords"] = pts;
  }
  return j;
}

inline Extender extender_from_json(const json& j) {
  auto values = j.at("values").get<std::vector<double>>();
  if (j.contains("matrix"))
    return Extender(FiniteMetricSpace::from_matrix(j.at("matrix").get<std::vector<std::vector<double>>>()),
                    std::move(values));
  const auto m = parse_metric(j.at("metric").get<std::string>());
  Dataset d;
  d.rows = j.at("coords").get<std::vector<std::vector<double>>>();
  return Extender(to_space(d, m), std::move(values));
}

inline json to_json(const ExtensionGuarantees& g) {
  return {{"sample_distortion", g.sample_distortion}, {"distortion_bound", g.distortion_bound},
          {"weak_distortion_bound", g.weak_distortion_bound}, {"lip_extension", g.lip_extension},
          {"lip_bound", g.lip_bound}, {"sample_strong_mean", g.sample_strong_mean},
          {"sample_weak_mean", g.sample_weak_mean}};
}

inline ExtensionGuarantees extension_guarantees_from_json(const json& j) {
  ExtensionGuarantees g;
  g.sample_distortion = j.at("sample_distortion").get<double>();
  g.distortion_bound = j.at("distortion_bound").get<double>();
  g.weak_distortion_bound = j.at("weak_distortion_bound").get<double>();
  g.lip_extension = j.at("lip_extension").get<double>();
  g.lip_bound = j.at("lip_bound").get<double>();
  g.sample_strong_mean = j.at("sample_strong_mean").get<double>();
  g.sample_weak_mean = j.at("sample_weak_mean").get<double>();
  return g;
}

inline json to_json(const ExtensionResult& r) {
  return {{"extender", to_json(r.extender)}, {"removed_indices", r.removed_indices}, {"net_indices", r.net_indices},
          {"epsilon", r.epsilon}, {"sample_values", r.sample_values}, {"guarantees", to_json(r.guarantees)}};
}

inline ExtensionResult extension_result_from_json(const json& j) {
  ExtensionResult r;
  r.extender = extender_from_json(j.at("extender"));
  r.removed_indices = j.at("removed_indices").get<std::vector<std::size_t>>();
  r.net_indices = j.at("net_indices").get<std::vector<std::size_t>>();
  r.epsilon = j.at("epsilon").get<double>();
  r.sample_values = j.at("sample_values").get<std::vector<double>>();
  r.guarantees = extension_guarantees_from_json(j.at("guarantees"));
  return r;
}

inline json to_json(const BoundReport& b) {
  return {{"name", b.name}, {"inputs", b.inputs}, {"value", b.value}, {"clamped", b.clamped}, {"notes", b.notes}};
}

inline BoundReport bound_report_from_json(const json& j) {
  BoundReport b;
  b.name = j.at("name").get<std::string>();
  b.inputs = j.at("inputs").get<std::map<std::string, double>>();
  b.value = j.at("value").get<double>();
  b.clamped = j.at("clamped").get<bool>();
  b.notes = j.at("notes").get<std::string>();
  return b;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- numeric tables (predictions, per-point outputs, demo curves) ----

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool operator==(const Table&) const = default;
};

inline std::string write_table(const Table& t) {
  std::ostringstream out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_double(r[c]);
    out << '\n';
  }
  return out.str();
}

inline Table parse_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, "empty table");
  Table t;
  t.columns = detail::split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line);
    if (cells.size() != t.columns.size()) fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": field count");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(detail::parse_number(c, lineno));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---- bound tables as CSV ----

inline std::string bounds_csv(const std::vector<BoundReport>& rows) {
  std::vector<std::string> keys;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.inputs)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  std::ostringstream out;
  out << "name";
  for (const auto& k : keys) out << ',' << k;
  out << ",value,clamped,notes\n";
  for (const auto& r : rows) {
    out << r.name;
    for (const auto& k : keys) {
      out << ',';
      if (auto it = r.inputs.find(k); it != r.inputs.end()) out << format_double(it->second);
    }
    out << ',' << format_double(r.value) << ',' << (r.clamped ? 1 : 0) << ',' << r.notes << '\n';
  }
  return out.str();
}

inline std::vector<BoundReport> parse_bounds_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, "empty bounds table");
  const auto header = detail::split(line);
  if (header.size() < 4 || header.front() != "name") fail(ErrorCode::ParseError, "bad bounds header");
  std::vector<BoundReport> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = detail::split(line);
    if (cells.size() != header.size()) fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": field count");
    BoundReport r;
    r.name = cells[0];
    const std::size_t nk = header.size() - 4;
    for (std::size_t k = 0; k < nk; ++k)
      if (!cells[1 + k].empty()) r.inputs[header[1 + k]] = detail::parse_number(cells[1 + k], lineno);
    r.value = detail::parse_number(cells[1 + nk], lineno);
    r.clamped = cells[2 + nk] == "1";
    r.notes = cells[3 + nk];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace avgslope::io
