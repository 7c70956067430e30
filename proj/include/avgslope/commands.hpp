#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avgslope/bounds.hpp"
#include "avgslope/datasets.hpp"
#include "avgslope/error.hpp"
#include "avgslope/extend.hpp"
#include "avgslope/io.hpp"
#include "avgslope/pmse.hpp"
#include "avgslope/slope.hpp"
#include "avgslope/smooth_class.hpp"
#include "avgslope/smooth_reg.hpp"

namespace avgslope::cli {

using io::json;

enum class Format { json, csv };

struct RunConfig {
  std::string command;
  std::string input, test, out;
  io::MetricChoice metric = io::MetricChoice::euclidean;
  std::optional<double> budget_L;
  double epsilon = 0.1;
  double approx_c = 0.1;
  double delta = 0.05;
  double c_delta = 1.0;
  std::uint64_t seed = 1;
  Format format = Format::json;

  std::string mode = "reg-dense";     // smooth: reg-dense | reg-hier | class
  std::string backend = "auto";       // smooth: auto | exact | approximate
  std::string task = "regression";    // extend: regression | classification

  std::vector<double> t_values{0.25, 0.5};  // bounds
  double dim = 1.0, diam = 1.0, sample_size = 1000.0;
  std::optional<double> tv_m;

  std::string dataset;                // generate
  std::size_t size = 1000;
  double gamma = 0.1, power = 0.5, noise = 0.2;

  void validate() const {
    auto bad = [](const std::string& what) { fail(ErrorCode::InvalidParameters, what); };
    if (budget_L && !(*budget_L > 0.0 && std::isfinite(*budget_L))) bad("--budget-L must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorCode::EpsilonOutOfRange, "--epsilon must lie in (0,1)");
    if (!(approx_c > 0.0 && approx_c < 1.0)) bad("--approx-c must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) bad("--delta must lie in (0,1)");
    if (!(c_delta > 0.0 && std::isfinite(c_delta))) bad("--c-delta must be positive");
    if (mode != "reg-dense" && mode != "reg-hier" && mode != "class") bad("--mode must be reg-dense, reg-hier or class");
    if (backend != "auto" && backend != "exact" && backend != "approximate") bad("--backend must be auto, exact or approximate");
    if (task != "regression" && task != "classification") bad("--task must be regression or classification");
    for (double t : t_values)
      if (!(t > 0.0 && std::isfinite(t))) bad("--t values must be positive");
    if (!(dim > 0.0) || !(diam > 0.0) || !(sample_size >= 1.0)) bad("--d, --diam must be positive and --n >= 1");
    if (tv_m && !(*tv_m >= 1.0)) bad("--m must be >= 1");
  }
};

// Rendered command output.
struct Output {
  std::string text;
};

namespace detail {

inline std::string render(const json& j) { return io::dump(j); }

inline double required_L(const RunConfig& c) {
  if (!c.budget_L) fail(ErrorCode::InvalidParameters, "--budget-L is required");
  return *c.budget_L;
}

inline std::vector<std::string> point_columns(const Dataset& d) {
  std::vector<std::string> cols;
  const std::size_t w = d.rows.front().size();
  for (std::size_t k = 0; k < w; ++k) cols.push_back((d.is_matrix ? "d" : "x") + std::to_string(k + 1));
  return cols;
}

// One row per point: its coordinates (or matrix row), label, then extra per-point columns.
inline io::Table per_point_table(const Dataset& d, const std::vector<std::string>& names,
                                 const std::vector<std::vector<double>>& extra) {
  io::Table t;
  t.columns = point_columns(d);
  t.columns.push_back("label");
  t.columns.insert(t.columns.end(), names.begin(), names.end());
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto row = d.rows[i];
    row.push_back(d.labels[i]);
    for (const auto& col : extra) row.push_back(col[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Backend regression_backend(const RunConfig& c, std::size_t n, bool hierarchical) {
  if (c.backend == "exact") return Backend::exact;
  if (c.backend == "approximate") return Backend::approximate;
  return !hierarchical && n <= 40 ? Backend::exact : Backend::approximate;
}

}  // namespace detail

inline Output cmd_stats(const Dataset& d, const RunConfig& c) {
  c.validate();
  const LabeledSample s = io::to_labeled(d, c.metric, LabelKind::real01);
  const SlopeProfile p = profile(s.sample(), s.labels());
  if (c.format == Format::csv) return {io::write_table(detail::per_point_table(d, {"slope"}, {p.local}))};
  json j{{"n", s.size()}, {"profile", io::to_json(p)}, {"markov_holds", check_markov(p, p.weak_mean)}};
  if (c.budget_L) {
    j["budget_L"] = *c.budget_L;
    j["class"] = class_name(class_membership(p, *c.budget_L));
  }
  return {detail::render(j)};
}

inline Output cmd_smooth(const Dataset& d, const RunConfig& c) {
  c.validate();
  const double L = detail::required_L(c);
  if (c.mode == "class") {
    const LabeledSample s = io::to_labeled(d, c.metric, LabelKind::binary);
    const RelabelPlan plan = clsrp_bicriteria(s, L);
    if (c.format == Format::csv) return {io::write_table(detail::per_point_table(d, {"new_label"}, {plan.labels}))};
    json audit{{"budget_L", L},
               {"relabeled_count", plan.relabeled_indices.size()},
               {"audit_b6_before", slope_audit(s.space(), s.labels(), L, 6.0)},
               {"audit_b6_after", slope_audit(s.space(), plan.labels, L, 6.0)}};
    return {detail::render({{"mode", c.mode}, {"plan", io::to_json(plan)}, {"audit", audit}})};
  }
  const LabeledSample s = io::to_labeled(d, c.metric, LabelKind::real01);
  const bool hier = c.mode == "reg-hier";
  RegSmoothingProblem prob{s, L, c.approx_c, hier ? Formulation::hierarchical : Formulation::dense};
  const SmoothingSolution sol = smooth(prob, detail::regression_backend(c, s.size(), hier));
  if (c.format == Format::csv) return {io::write_table(detail::per_point_table(d, {"z"}, {sol.z}))};
  json audit{{"budget_L", L},
             {"strong_mean_y", profile(s.sample(), s.labels()).strong_mean},
             {"strong_mean_z", sol.dense_strong_mean},
             {"budget_residual", std::max(0.0, sol.budget_used - sol.budget_cap)}};
  return {detail::render({{"mode", c.mode}, {"solution", io::to_json(sol)}, {"audit", audit}})};
}

// Regression: optional dense smoothing (when --budget-L is given), then the eps-net PMSE extension.
// Classification: optional relabeling, then PMSE from every sample point, rounded half up.
inline Output cmd_extend(const Dataset& train, const Dataset& test, const RunConfig& c) {
  c.validate();
  if (train.is_matrix || c.metric == io::MetricChoice::matrix)
    fail(ErrorCode::SchemaMismatch, "extension needs coordinates for train and test points");
  if (test.is_matrix || test.rows.front().size() != train.rows.front().size())
    fail(ErrorCode::SchemaMismatch, "test columns must match the train coordinate columns");
  const bool cls = c.task == "classification";
  const LabeledSample s = io::to_labeled(train, c.metric, cls ? LabelKind::binary : LabelKind::real01);

  ExtensionResult res;
  std::optional<SmoothingSolution> smoothed;
  std::optional<RelabelPlan> plan;
  if (cls) {
    if (c.budget_L) {
      plan = clsrp_bicriteria(s, *c.budget_L);
      res = extend_classification(s);
      res.extender = Extender(s.space(), plan->labels);
      res.sample_values = plan->labels;
    } else {
      res = extend_classification(s);
    }
  } else if (c.budget_L) {
    RegSmoothingProblem prob{s, *c.budget_L, c.approx_c, Formulation::dense};
    smoothed = smooth(prob, detail::regression_backend(c, s.size(), false));
    res = extend_regression(LabeledSample(s.sample(), smoothed->z, LabelKind::real01), c.epsilon);
  } else {
    res = extend_regression(s, c.epsilon);
  }

  std::vector<double> pred;
  for (const auto& q : test.rows) {
    const double v = res.extender.eval_at(q);
    pred.push_back(cls ? static_cast<double>(round_label(v)) : v);
  }
  if (c.format == Format::csv) {
    io::Table t;
    t.columns = detail::point_columns(test);
    t.columns.push_back("prediction");
    for (std::size_t i = 0; i < test.size(); ++i) {
      auto row = test.rows[i];
      row.push_back(pred[i]);
      t.rows.push_back(std::move(row));
    }
    return {io::write_table(t)};
  }
  json j{{"task", c.task}, {"predictions", pred}, {"extension", io::to_json(res)}};
  if (smoothed) j["smoothing"] = io::to_json(*smoothed);
  if (plan) j["relabel"] = io::to_json(*plan);
  return {detail::render(j)};
}

inline std::vector<BoundReport> bound_rows(const RunConfig& c) {
  c.validate();
  const double L = c.budget_L.value_or(1.0);
  const double n = c.sample_size;
  std::vector<BoundReport> rows;
  for (double t : c.t_values) {
    rows.push_back(lip_cover_bound(t, L, c.dim, c.diam));
    rows.push_back(ambient_cover_bound(t, L, c.dim, c.diam));
  }
  const double eps0 = empirical_eps0(n, L, c.dim, c.c_delta);
  if (c.dim >= 1.0)
    for (double t : c.t_values) rows.push_back(empirical_cover_bound(t, eps0, L, c.dim));
  rows.push_back(distance_additive_term(n, L, c.dim, c.delta));
  rows.push_back(generalization_bound(n, L, c.dim, c.delta, c.c_delta, TaskKind::regression));
  rows.push_back(generalization_bound(n, L, c.dim, c.delta, c.c_delta, TaskKind::classification));
  if (c.tv_m) rows.push_back(tv_bound(*c.tv_m, n, c.delta));
  return rows;
}

inline Output cmd_bounds(const RunConfig& c) {
  const auto rows = bound_rows(c);
  if (c.format == Format::csv) return {io::bounds_csv(rows)};
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(io::to_json(r));
  return {detail::render({{"bounds", arr}})};
}

inline constexpr std::size_t kDemoAnchors = 10;
inline constexpr std::size_t kDemoStepsPerGap = 100;

// 1-D comparator: linear interpolation between consecutive sorted anchors, constant outside.
inline double amle_1d(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  const double a = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return ys[k - 1] + a * (ys[k] - ys[k - 1]);
}

// PMSE and AMLE of 1{x > 1/2} from 10 uniform anchors, on a grid that contains every anchor.
inline io::Table demo_step_table() {
  const auto xs = datasets::grid(kDemoAnchors, 0.0, 1.0);
  std::vector<double> ys;
  for (double x : xs) ys.push_back(x > 0.5 ? 1.0 : 0.0);
  std::vector<std::vector<double>> pts;
  for (double x : xs) pts.push_back({x});
  const Extender ext(FiniteMetricSpace::from_coordinates(pts, MetricTag::euclidean), ys);
  io::Table t;
  t.columns = {"x", "pmse", "amle"};
  const std::size_t m = (kDemoAnchors - 1) * kDemoStepsPerGap;
  for (std::size_t j = 0; j <= m; ++j) {
    const double x = j % kDemoStepsPerGap == 0 ? xs[j / kDemoStepsPerGap]
                                               : static_cast<double>(j) / static_cast<double>(m);
    const double q[1] = {x};
    t.rows.push_back({x, ext.eval_at(q), amle_1d(xs, ys, x)});
  }
  return t;
}

inline Output cmd_demo_step(const RunConfig& c) {
  const io::Table t = demo_step_table();
  if (c.format == Format::csv) return {io::write_table(t)};
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back({{"x", r[0]}, {"pmse", r[1]}, {"amle", r[2]}});
  return {detail::render({{"anchors", kDemoAnchors}, {"curve", rows}})};
}

inline Dataset generate_dataset(const RunConfig& c) {
  if (c.dataset == "gapped-step") return datasets::gapped_step(c.size, c.gamma);
  if (c.dataset == "margin-loss") return datasets::margin_loss(c.size, c.gamma);
  if (c.dataset == "power") return datasets::power(c.size, c.power);
  if (c.dataset == "noisy-step") return datasets::noisy_step(c.size, c.noise, c.seed);
  if (c.dataset == "two-clusters") return datasets::two_clusters(c.size, c.seed);
  fail(ErrorCode::InvalidParameters, "unknown dataset '" + c.dataset + "'");
}

inline Output cmd_generate(const RunConfig& c) { return {io::write_csv(generate_dataset(c))}; }

inline int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Validation: return 2;
    case ErrorKind::Solver: return 3;
    case ErrorKind::Io: return 4;
  }
  return 3;
}

}  // namespace avgslope::cli
