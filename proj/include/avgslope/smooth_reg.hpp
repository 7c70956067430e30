#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "avgslope/error.hpp"
#include "avgslope/lp.hpp"
#include "avgslope/metric.hpp"
#include "avgslope/nets.hpp"
#include "avgslope/pc_solver.hpp"
#include "avgslope/slope.hpp"

namespace avgslope {

enum class Formulation { dense, hierarchical };
enum class Backend { exact, approximate };

inline const char* formulation_name(Formulation f) { return f == Formulation::dense ? "dense" : "hierarchical"; }
inline const char* backend_name(Backend b) { return b == Backend::exact ? "exact" : "approximate"; }

struct RegSmoothingProblem {
  LabeledSample labeled;
  double budget_L = 1.0;
  double approx_c = 0.1;
  Formulation formulation = Formulation::dense;

  void validate() const {
    if (!(budget_L > 0.0) || !std::isfinite(budget_L)) fail(ErrorCode::InvalidParameters, "budget_L must be positive");
    if (!(approx_c > 0.0 && approx_c < 1.0)) fail(ErrorCode::InvalidParameters, "approx_c must lie in (0,1)");
  }
};

struct SolverStats {
  std::size_t iterations = 0;
  std::string backend;
  std::string method;
  double lower_bound = 0.0;  // certified bound on the weighted objective (approximate backend)
};

struct SmoothingSolution {
  std::vector<double> z;
  std::vector<double> per_point_budget;
  double objective = 0.0;   // sum_i mu_i |z_i - y_i|; the mean for uniform weights
  double budget_used = 0.0; // sum_i mu_i L_i
  double budget_cap = 0.0;  // budget the formulation enforces
  double max_residual = 0.0;
  double dense_strong_mean = 0.0;  // post-hoc strong mean slope of z
  std::size_t constraint_count = 0;
  std::string formulation;
  SolverStats solver_stats;
};

// Hierarchical budgets are inflated by this factor so every dense-feasible point stays feasible:
// with nearest-center radius r and witness windows [2r, 8r), each pair at distance D in [3r, 6r)
// is represented by a net point at distance in [2r, 7r), i.e. within a factor 3/2 of D.
inline constexpr double kHierBudgetInflation = 1.5;
inline constexpr double kHierWindowLow = 2.0;
inline constexpr double kHierWindowHigh = 8.0;

namespace detail {

// Internal model shared by both formulations. z variables: the n labels first, then auxiliaries.
struct SmoothModel {
  std::size_t n = 0;
  std::size_t num_z = 0;
  std::vector<double> y, mu, l_upper;
  double cap = 0.0;
  struct Diff {
    std::size_t a, b;   // z_a - z_b <= L_owner * rho   (owner == kNone: <= 0)
    std::size_t owner;
    double rho;
  };
  std::vector<Diff> diffs;
  struct Aux {
    std::size_t var;
    std::vector<std::size_t> members;
    bool is_max;
  };
  std::vector<Aux> aux;
};

inline double weighted_median(const std::vector<double>& y, const std::vector<double>& mu) {
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  double total = 0.0;
  for (double w : mu) total += w;
  double cum = 0.0;
  for (std::size_t k : order) {
    cum += mu[k];
    if (cum >= 0.5 * total) return y[k];
  }
  return y.empty() ? 0.0 : y[order.back()];
}

inline SmoothModel dense_model(const LabeledSample& s, double cap) {
  SmoothModel m;
  const auto& sp = s.space();
  m.n = m.num_z = s.size();
  m.y = s.labels();
  m.mu = s.weights();
  m.cap = cap;
  m.l_upper.assign(m.n, 0.0);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      if (i == j) continue;
      const double d = sp.distance(i, j);
      m.l_upper[i] = std::max(m.l_upper[i], 1.0 / d);
      m.diffs.push_back({i, j, i, d});
      m.diffs.push_back({j, i, i, d});
    }
  return m;
}

inline SmoothModel hierarchical_model(const LabeledSample& s, double cap) {
  SmoothModel m;
  const auto& sp = s.space();
  m.n = m.num_z = s.size();
  m.y = s.labels();
  m.mu = s.weights();
  m.cap = cap;
  m.l_upper.assign(m.n, 0.0);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      if (i != j) m.l_upper[i] = std::max(m.l_upper[i], 1.0 / sp.distance(i, j));
  if (m.n < 2) return m;
  const Hierarchy h = build_hierarchy(sp);
  const FiniteMetricSpace& ns = h.normalized;
  const double dmin = ns.min_distance();
  std::set<std::pair<std::size_t, std::size_t>> pair_done;
  double r = 1.0;
  for (std::size_t k = 0;; ++k, r *= 0.5) {
    const NetResult& lvl = h.levels[std::min(k, h.depth() - 1)];
    std::map<std::size_t, std::vector<std::size_t>> cells;
    for (std::size_t x = 0; x < m.n; ++x) cells[lvl.assignment[x]].push_back(x);
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> aux_of;  // center -> (max var, min var)
    for (std::size_t i = 0; i < m.n; ++i) {
      for (std::size_t j : lvl.center_indices) {
        const double d = ns.distance(i, j);
        if (!(d >= kHierWindowLow * r && d < kHierWindowHigh * r)) continue;
        const double rho = sp.distance(i, j);
        const auto& cell = cells[j];
        if (cell.size() == 1) {
          if (pair_done.insert({i, j}).second) {
            m.diffs.push_back({i, j, i, rho});
            m.diffs.push_back({j, i, i, rho});
          }
          continue;
        }
        auto it = aux_of.find(j);
        if (it == aux_of.end()) {
          const std::size_t zmax = m.num_z++, zmin = m.num_z++;
          m.aux.push_back({zmax, cell, true});
          m.aux.push_back({zmin, cell, false});
          for (std::size_t x : cell) {
            m.diffs.push_back({x, zmax, kNone, 0.0});
            m.diffs.push_back({zmin, x, kNone, 0.0});
          }
          it = aux_of.emplace(j, std::make_pair(zmax, zmin)).first;
        }
        const auto [zmax, zmin] = it->second;
        m.diffs.push_back({i, zmax, i, rho});
        m.diffs.push_back({zmax, i, i, rho});
        m.diffs.push_back({i, zmin, i, rho});
        m.diffs.push_back({zmin, i, i, rho});
      }
    }
    if (k + 1 >= h.depth() && r <= dmin / 3.0) break;
  }
  return m;
}

inline std::size_t model_rows(const SmoothModel& m) {
  std::size_t rows = 1 + m.diffs.size();
  for (std::size_t i = 0; i < m.n; ++i) rows += (m.y[i] > 0.0) + (m.y[i] < 1.0);
  return rows;
}

// Variable layout: L_i at i, w_i at n + i, z_k at 2n + k.
inline LinearProgram model_lp(const SmoothModel& m) {
  LinearProgram lp;
  const std::size_t n = m.n;
  // No upper bounds on L and w: never binding, and large 1/rho bounds hurt the tableau's conditioning.
  for (std::size_t i = 0; i < n; ++i) lp.add_var(0.0);
  for (std::size_t i = 0; i < n; ++i) lp.add_var(m.mu[i]);
  for (std::size_t k = 0; k < m.num_z; ++k) lp.add_var(0.0, 1.0);
  std::vector<std::pair<std::size_t, double>> budget;
  for (std::size_t i = 0; i < n; ++i)
    if (m.mu[i] > 0.0) budget.push_back({i, m.mu[i]});
  lp.add_row(budget, RowSense::le, m.cap);
  for (std::size_t i = 0; i < n; ++i) {
    lp.add_row({{n + i, 1.0}, {2 * n + i, -1.0}}, RowSense::ge, -m.y[i]);
    lp.add_row({{n + i, 1.0}, {2 * n + i, 1.0}}, RowSense::ge, m.y[i]);
  }
  for (const auto& d : m.diffs) {
    std::vector<std::pair<std::size_t, double>> c{{2 * n + d.a, -1.0}, {2 * n + d.b, 1.0}};
    if (d.owner != kNone) c.push_back({d.owner, d.rho});
    lp.add_row(std::move(c), RowSense::ge, 0.0);
  }
  return lp;
}

// Dummy-variable rewrite: z~_k = 1 - z_k. Layout: L, w, z (num_z), z~ (num_z).
inline PackingCoveringForm model_pc(const SmoothModel& m) {
  PackingCoveringForm f;
  const std::size_t n = m.n, zt = 2 * n + m.num_z;
  f.num_vars = 2 * n + 2 * m.num_z;
  f.cost.assign(f.num_vars, 0.0);
  f.upper.assign(f.num_vars, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    f.upper[i] = m.l_upper[i];
    f.cost[n + i] = m.mu[i];
  }
  PackingCoveringForm::Group g;
  for (std::size_t i = 0; i < n; ++i)
    if (m.mu[i] > 0.0) g.coefs.push_back({i, m.mu[i]});
  g.cap = m.cap;
  f.packing.push_back(g);
  for (std::size_t k = 0; k < m.num_z; ++k) f.complements.push_back({2 * n + k, zt + k});
  for (std::size_t i = 0; i < n; ++i) {
    if (m.y[i] > 0.0) f.covering.push_back(LpRow{{{n + i, 1.0}, {2 * n + i, 1.0}}, RowSense::ge, m.y[i]});
    if (m.y[i] < 1.0) f.covering.push_back(LpRow{{{n + i, 1.0}, {zt + i, 1.0}}, RowSense::ge, 1.0 - m.y[i]});
  }
  for (const auto& d : m.diffs) {
    // z_a - z_b <= L rho   <=>   L rho + z_b + z~_a >= 1
    std::vector<std::pair<std::size_t, double>> c{{2 * n + d.b, 1.0}, {zt + d.a, 1.0}};
    if (d.owner != kNone) c.push_back({d.owner, d.rho});
    f.covering.push_back(LpRow{std::move(c), RowSense::ge, 1.0});
  }
  return f;
}

// Exactly feasible point from label values z (first n entries used): auxiliaries set to cell
// max/min, minimal per-point budgets, then a shrink toward the weighted median if over budget.
inline double repair_model(const SmoothModel& m, std::vector<double>& z_all, std::vector<double>& L) {
  const std::size_t n = m.n;
  for (std::size_t i = 0; i < n; ++i) z_all[i] = std::clamp(z_all[i], 0.0, 1.0);
  auto fill_aux = [&]() {
    for (const auto& a : m.aux) {
      double v = a.is_max ? 0.0 : 1.0;
      for (std::size_t x : a.members) v = a.is_max ? std::max(v, z_all[x]) : std::min(v, z_all[x]);
      z_all[a.var] = v;
    }
  };
  auto budgets = [&]() {
    L.assign(n, 0.0);
    for (const auto& d : m.diffs)
      if (d.owner != kNone) L[d.owner] = std::max(L[d.owner], (z_all[d.a] - z_all[d.b]) / d.rho);
    double used = 0.0;
    for (std::size_t i = 0; i < n; ++i) used += m.mu[i] * L[i];
    return used;
  };
  fill_aux();
  const double used = budgets();
  if (used > m.cap) {
    const double med = weighted_median(m.y, m.mu);
    const double lam = m.cap / used * (1.0 - 1e-12);
    for (std::size_t i = 0; i < n; ++i) z_all[i] = med + lam * (z_all[i] - med);
    fill_aux();
    budgets();
  }
  double obj = 0.0;
  for (std::size_t i = 0; i < n; ++i) obj += m.mu[i] * std::abs(z_all[i] - m.y[i]);
  return obj;
}

inline double model_residual(const SmoothModel& m, const std::vector<double>& z_all, const std::vector<double>& L) {
  double worst = 0.0, used = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    used += m.mu[i] * L[i];
    worst = std::max(worst, -L[i]);
  }
  worst = std::max(worst, used - m.cap);
  for (const auto& d : m.diffs) {
    const double bound = d.owner == kNone ? 0.0 : L[d.owner] * d.rho;
    worst = std::max(worst, z_all[d.a] - z_all[d.b] - bound);
  }
  for (double v : z_all) worst = std::max({worst, -v, v - 1.0});
  return worst;
}

inline SmoothingSolution solve_model(const SmoothModel& m, const LabeledSample& s, Backend backend, double c) {
  SmoothingSolution sol;
  const std::size_t n = m.n;
  sol.budget_cap = m.cap;
  sol.constraint_count = model_rows(m);
  sol.solver_stats.backend = backend_name(backend);
  std::vector<double> z_all(m.num_z, 0.0), L;

  // Labels already within budget: no distortion needed.
  {
    std::vector<double> zy(m.num_z, 0.0), Ly;
    std::copy(m.y.begin(), m.y.end(), zy.begin());
    std::vector<double> probe = zy;
    const double obj = repair_model(m, probe, Ly);
    if (obj == 0.0) {
      z_all = probe;
      L = Ly;
      sol.solver_stats.method = "labels-feasible";
    }
  }
  if (sol.solver_stats.method.empty()) {
    if (backend == Backend::exact) {
      const LinearProgram lp = model_lp(m);
      const LpSolution ls = exact_lp_solve(lp);
      L.assign(ls.x.begin(), ls.x.begin() + static_cast<std::ptrdiff_t>(n));
      for (std::size_t k = 0; k < m.num_z; ++k) z_all[k] = std::clamp(ls.x[2 * n + k], 0.0, 1.0);
      sol.solver_stats.iterations = ls.iterations;
      sol.solver_stats.method = ls.method;
      sol.solver_stats.lower_bound = ls.objective;
    } else {
      const PackingCoveringForm f = model_pc(m);
      std::vector<double> scratch_L;
      PcRepair rep = [&](std::vector<double>& x) {
        std::vector<double> zz(x.begin() + static_cast<std::ptrdiff_t>(2 * n),
                               x.begin() + static_cast<std::ptrdiff_t>(2 * n + m.num_z));
        const double obj = repair_model(m, zz, scratch_L);
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = scratch_L[i];
          x[n + i] = std::abs(zz[i] - m.y[i]);
        }
        for (std::size_t k = 0; k < m.num_z; ++k) {
          x[2 * n + k] = zz[k];
          x[2 * n + m.num_z + k] = 1.0 - zz[k];
        }
        return obj;
      };
      const PcSolution ps = approx_pc_solve(f, c, rep);
      L.assign(ps.x.begin(), ps.x.begin() + static_cast<std::ptrdiff_t>(n));
      for (std::size_t k = 0; k < m.num_z; ++k) z_all[k] = ps.x[2 * n + k];
      sol.solver_stats.iterations = ps.iterations;
      sol.solver_stats.method = "primal-dual-mwu";
      sol.solver_stats.lower_bound = ps.lower_bound;
    }
  }
  sol.z.assign(z_all.begin(), z_all.begin() + static_cast<std::ptrdiff_t>(n));
  sol.per_point_budget = L;
  for (std::size_t i = 0; i < n; ++i) {
    sol.objective += m.mu[i] * std::abs(sol.z[i] - m.y[i]);
    sol.budget_used += m.mu[i] * L[i];
  }
  sol.max_residual = model_residual(m, z_all, L);
  sol.dense_strong_mean = profile(s.sample(), sol.z).strong_mean;
  return sol;
}

}  // namespace detail

inline SmoothingSolution smooth_dense(const RegSmoothingProblem& p, Backend backend = Backend::exact) {
  p.validate();
  if (p.labeled.size() == 0) fail(ErrorCode::TooFewPoints, "empty sample");
  const auto m = detail::dense_model(p.labeled, p.budget_L);
  auto sol = detail::solve_model(m, p.labeled, backend, p.approx_c);
  sol.formulation = "dense";
  return sol;
}

inline SmoothingSolution smooth_hierarchical(const RegSmoothingProblem& p, Backend backend = Backend::approximate) {
  p.validate();
  if (p.labeled.size() == 0) fail(ErrorCode::TooFewPoints, "empty sample");
  const auto m = detail::hierarchical_model(p.labeled, kHierBudgetInflation * p.budget_L);
  auto sol = detail::solve_model(m, p.labeled, backend, p.approx_c);
  sol.formulation = "hierarchical";
  return sol;
}

inline SmoothingSolution smooth(const RegSmoothingProblem& p, Backend backend) {
  return p.formulation == Formulation::dense ? smooth_dense(p, backend) : smooth_hierarchical(p, backend);
}

// Constraint count of the hierarchical program (no solve).
inline std::size_t hierarchical_constraint_count(const LabeledSample& s, double budget_L) {
  return detail::model_rows(detail::hierarchical_model(s, kHierBudgetInflation * budget_L));
}

inline std::size_t dense_constraint_count(const LabeledSample& s) {
  return detail::model_rows(detail::dense_model(s, 1.0));
}

}  // namespace avgslope
