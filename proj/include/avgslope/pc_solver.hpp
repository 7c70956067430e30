#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "avgslope/error.hpp"
#include "avgslope/lp.hpp"

namespace avgslope {

// minimize cost . x over
//   0 <= x <= upper,  disjoint packing groups  sum a_j x_j <= cap,
//   complement pairs  x_a + x_b = 1,  covering rows  a_r . x >= b_r  (a_r >= 0, b_r > 0).
// All cost and constraint coefficients are nonnegative.
struct PackingCoveringForm {
  std::size_t num_vars = 0;
  std::vector<double> cost;
  std::vector<double> upper;
  struct Group {
    std::vector<std::pair<std::size_t, double>> coefs;
    double cap = 0.0;
  };
  std::vector<Group> packing;
  std::vector<std::pair<std::size_t, std::size_t>> complements;
  std::vector<LpRow> covering;  // sense ignored, read as >=
};

struct PcSolution {
  std::vector<double> x;
  double objective = 0.0;    // after repair
  double lower_bound = 0.0;  // certified
  std::size_t iterations = 0;
  std::size_t restarts = 0;
};

struct PcOptions {
  std::size_t max_iters = 400000;
  std::size_t check_every = 64;
  double abs_tol = 1e-12;
};

// Maps an approximate point to an exactly feasible one; returns its objective.
using PcRepair = std::function<double(std::vector<double>&)>;

namespace detail {

inline constexpr int kRuizPasses = 12;
inline constexpr double kRestartSufficient = 0.2;
inline constexpr double kRestartNecessary = 0.8;
inline constexpr double kRestartArtificial = 0.36;

class PcSolver {
 public:
  PcSolver(const PackingCoveringForm& f, const PcOptions& opt) : f_(f), opt_(opt) {
    n_ = f.num_vars;
    role_.assign(n_, Role{});
    for (std::size_t g = 0; g < f.packing.size(); ++g)
      for (const auto& [j, a] : f.packing[g].coefs) {
        if (!(a > 0.0)) fail(ErrorCode::InvalidParameters, "packing coefficients must be positive");
        if (role_[j].kind != 0) fail(ErrorCode::InvalidParameters, "packing groups must be disjoint");
        role_[j] = Role{1, g};
      }
    for (std::size_t p = 0; p < f.complements.size(); ++p) {
      const auto [a, b] = f.complements[p];
      if (role_[a].kind != 0 || role_[b].kind != 0)
        fail(ErrorCode::InvalidParameters, "complement variables must be free of other structure");
      role_[a] = Role{2, p};
      role_[b] = Role{2, p};
    }
    for (const auto& r : f.covering) {
      if (!(r.rhs > 0.0)) continue;  // satisfied by any nonnegative x
      Row row;
      for (const auto& [j, v] : r.coefs) {
        if (v < 0.0) fail(ErrorCode::InvalidParameters, "covering coefficients must be nonnegative");
        if (v != 0.0) row.coefs.push_back({j, v});
      }
      if (row.coefs.empty()) fail(ErrorCode::Infeasible, "covering row with no positive coefficient");
      row.rhs = r.rhs;
      rows_.push_back(std::move(row));
    }
    equilibrate();
  }

  PcSolution solve(double c, const PcRepair& repair) {
    const std::size_t m = rows_.size();
    PcSolution best;
    best.objective = std::numeric_limits<double>::infinity();
    std::vector<double> x(n_, 0.0), y(m, 0.0);
    for (const auto& [a, b] : f_.complements) x[b] = 1.0;
    project(x);

    const double eta = 0.9 / operator_norm();
    omega_ = initial_weight();
    std::vector<double> x_new(n_), xbar(n_), grad(n_), x_avg = x, y_avg = y;
    std::vector<double> x_last = x, y_last = y, trial;
    double err_last = kkt_error(x, y), err_prev = err_last;
    double lb = 0.0;
    std::size_t it = 0, count = 0, restarts = 0, since_restart = 0;

    while (it < opt_.max_iters) {
      const double tau = eta / omega_, sigma = eta * omega_;
      for (std::size_t j = 0; j < n_; ++j) grad[j] = f_.cost[j];
      for (std::size_t r = 0; r < m; ++r) {
        const double yr = y[r] * rscale_[r];
        if (yr == 0.0) continue;
        for (const auto& [j, v] : rows_[r].coefs) grad[j] -= yr * v;
      }
      for (std::size_t j = 0; j < n_; ++j) x_new[j] = x[j] - tau * cscale_[j] * cscale_[j] * grad[j];
      project(x_new);
      for (std::size_t j = 0; j < n_; ++j) xbar[j] = 2.0 * x_new[j] - x[j];
      x.swap(x_new);
      for (std::size_t r = 0; r < m; ++r) {
        double a = 0.0;
        for (const auto& [j, v] : rows_[r].coefs) a += v * xbar[j];
        y[r] = std::max(0.0, y[r] + sigma * rscale_[r] * (rows_[r].rhs - a));
      }
      ++it;
      ++count;
      ++since_restart;
      const double w = 1.0 / static_cast<double>(count);
      for (std::size_t j = 0; j < n_; ++j) x_avg[j] += w * (x[j] - x_avg[j]);
      for (std::size_t r = 0; r < m; ++r) y_avg[r] += w * (y[r] - y_avg[r]);

      if (it % opt_.check_every != 0) continue;
      lb = std::max({lb, lagrangian_bound(y_avg), lagrangian_bound(y)});
      for (const auto* cand : {&x_avg, &x}) {
        trial = *cand;
        const double ub = repair ? repair(trial) : feasible_objective(trial);
        if (ub < best.objective) {
          best.objective = ub;
          best.x = trial;
        }
      }
      if (best.objective <= (1.0 + c) * lb + opt_.abs_tol) break;

      // Adaptive restart to whichever of the current and averaged iterates has smaller KKT error.
      const double e_cur = kkt_error(x, y), e_avg = kkt_error(x_avg, y_avg);
      const bool use_avg = e_avg < e_cur;
      const double e = std::min(e_cur, e_avg);
      const bool restart = e <= kRestartSufficient * err_last ||
                           (e <= kRestartNecessary * err_last && e > err_prev) ||
                           static_cast<double>(since_restart) >= kRestartArtificial * static_cast<double>(it);
      err_prev = e;
      if (!restart) continue;
      if (use_avg) {
        x = x_avg;
        y = y_avg;
      }
      update_weight(x, y, x_last, y_last);
      x_last = x;
      y_last = y;
      x_avg = x;
      y_avg = y;
      count = 0;
      since_restart = 0;
      err_last = err_prev = e;
      ++restarts;
    }
    best.lower_bound = lb;
    best.iterations = it;
    best.restarts = restarts;
    if (!(best.objective <= (1.0 + c) * lb + opt_.abs_tol))
      fail(ErrorCode::NonconvergenceAfterMaxIters, "packing/covering solver did not certify the target ratio");
    return best;
  }

 private:
  struct Role {
    int kind = 0;  // 0 free box, 1 packing group, 2 complement pair
    std::size_t idx = 0;
  };
  struct Row {
    std::vector<std::pair<std::size_t, double>> coefs;
    double rhs = 0.0;
  };

  const PackingCoveringForm& f_;
  PcOptions opt_;
  std::size_t n_ = 0;
  std::vector<Role> role_;
  std::vector<Row> rows_;
  std::vector<double> rscale_, cscale_;  // scaled matrix: rscale_[r] * a_rj * cscale_[j]
  double omega_ = 1.0;

  // Ruiz equilibration of the covering matrix towards unit row and column max-norms.
  void equilibrate() {
    rscale_.assign(rows_.size(), 1.0);
    cscale_.assign(n_, 1.0);
    for (std::size_t j = 0; j < n_; ++j) cscale_[j] = std::max(1.0, f_.upper[j]);
    std::vector<double> cmax(n_);
    for (int pass = 0; pass < kRuizPasses; ++pass) {
      std::fill(cmax.begin(), cmax.end(), 0.0);
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        double rmax = 0.0;
        for (const auto& [j, v] : rows_[r].coefs) rmax = std::max(rmax, rscale_[r] * v * cscale_[j]);
        rscale_[r] /= std::sqrt(rmax);
        for (const auto& [j, v] : rows_[r].coefs) cmax[j] = std::max(cmax[j], rscale_[r] * v * cscale_[j]);
      }
      for (std::size_t j = 0; j < n_; ++j)
        if (cmax[j] > 0.0) cscale_[j] = std::min(cscale_[j] / std::sqrt(cmax[j]), 1e6 * std::max(1.0, f_.upper[j]));
    }
  }

  // Largest singular value of the scaled matrix (power iteration, slightly inflated).
  double operator_norm() const {
    if (rows_.empty()) return 1.0;
    std::vector<double> v(n_, 1.0), u(rows_.size());
    double s = 1.0;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        double a = 0.0;
        for (const auto& [j, w] : rows_[r].coefs) a += rscale_[r] * w * cscale_[j] * v[j];
        u[r] = a;
      }
      std::fill(v.begin(), v.end(), 0.0);
      for (std::size_t r = 0; r < rows_.size(); ++r)
        for (const auto& [j, w] : rows_[r].coefs) v[j] += rscale_[r] * w * cscale_[j] * u[r];
      double nv = 0.0;
      for (double t : v) nv += t * t;
      nv = std::sqrt(nv);
      if (!(nv > 0.0)) return 1.0;
      s = std::sqrt(nv);
      for (double& t : v) t /= nv;
    }
    return 1.05 * s;
  }

  double initial_weight() const {
    double cn = 0.0, bn = 0.0;
    for (std::size_t j = 0; j < n_; ++j) cn += std::pow(f_.cost[j] * cscale_[j], 2);
    for (std::size_t r = 0; r < rows_.size(); ++r) bn += std::pow(rows_[r].rhs * rscale_[r], 2);
    return cn > 0.0 && bn > 0.0 ? std::sqrt(cn / bn) : 1.0;
  }

  void update_weight(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& x0,
                     const std::vector<double>& y0) {
    double dx = 0.0, dy = 0.0;
    for (std::size_t j = 0; j < n_; ++j) dx += std::pow((x[j] - x0[j]) / cscale_[j], 2);
    for (std::size_t r = 0; r < y.size(); ++r) dy += std::pow(y[r] - y0[r], 2);
    dx = std::sqrt(dx);
    dy = std::sqrt(dy);
    if (dx > 1e-10 && dy > 1e-10) omega_ = std::exp(0.5 * std::log(dy / dx) + 0.5 * std::log(omega_));
  }

  // Scaled primal infeasibility combined with the relative gap to the exact Lagrangian bound.
  double kkt_error(const std::vector<double>& x, const std::vector<double>& y) const {
    double infeas = 0.0, obj = 0.0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      double a = 0.0;
      for (const auto& [j, v] : rows_[r].coefs) a += v * x[j];
      infeas += std::pow(rscale_[r] * std::max(0.0, rows_[r].rhs - a), 2);
    }
    for (std::size_t j = 0; j < n_; ++j) obj += f_.cost[j] * x[j];
    const double bound = lagrangian_bound(y);
    const double gap = (obj - bound) / (1.0 + std::abs(obj) + std::abs(bound));
    return std::sqrt(infeas + gap * gap);
  }

  // Projection onto the structured box in the metric sum_j (x_j - v_j)^2 / cscale_j^2.
  void project(std::vector<double>& x) const {
    for (std::size_t j = 0; j < n_; ++j)
      if (role_[j].kind == 0) x[j] = std::clamp(x[j], 0.0, f_.upper[j]);
    for (const auto& [a, b] : f_.complements) {
      const double wa = 1.0 / (cscale_[a] * cscale_[a]), wb = 1.0 / (cscale_[b] * cscale_[b]);
      const double t = std::clamp((wa * x[a] + wb * (1.0 - x[b])) / (wa + wb), 0.0, 1.0);
      x[a] = t;
      x[b] = 1.0 - t;
    }
    for (const auto& g : f_.packing) {
      auto at = [&](double lam, std::size_t j, double a) {
        return std::clamp(x[j] - lam * a * cscale_[j] * cscale_[j], 0.0, f_.upper[j]);
      };
      auto load = [&](double lam) {
        double s = 0.0;
        for (const auto& [j, a] : g.coefs) s += a * at(lam, j, a);
        return s;
      };
      if (load(0.0) <= g.cap) {
        for (const auto& [j, a] : g.coefs) x[j] = at(0.0, j, a);
        continue;
      }
      double lo = 0.0, hi = 1.0;
      while (load(hi) > g.cap) hi *= 2.0;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        (load(mid) > g.cap ? lo : hi) = mid;
      }
      for (const auto& [j, a] : g.coefs) x[j] = at(hi, j, a);
    }
  }

  // min over the structured box of cost.x + y.(b - A x), exactly; y is in scaled units.
  double lagrangian_bound(const std::vector<double>& y) const {
    std::vector<double> g(f_.cost);
    double val = 0.0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const double yr = y[r] * rscale_[r];
      if (yr == 0.0) continue;
      val += yr * rows_[r].rhs;
      for (const auto& [j, v] : rows_[r].coefs) g[j] -= yr * v;
    }
    for (std::size_t j = 0; j < n_; ++j)
      if (role_[j].kind == 0 && g[j] < 0.0) val += g[j] * f_.upper[j];
    for (const auto& [a, b] : f_.complements) val += std::min(g[a], g[b]);
    for (const auto& grp : f_.packing) {
      std::vector<std::pair<double, std::size_t>> order;
      for (std::size_t k = 0; k < grp.coefs.size(); ++k) {
        const auto [j, a] = grp.coefs[k];
        if (g[j] < 0.0) order.push_back({g[j] / a, k});
      }
      std::sort(order.begin(), order.end());
      double cap = grp.cap;
      for (const auto& [ratio, k] : order) {
        const auto [j, a] = grp.coefs[k];
        const double take = std::min(f_.upper[j], cap / a);
        val += g[j] * take;
        cap -= take * a;
        if (cap <= 0.0) break;
      }
    }
    return val;
  }

  // Objective when x is covering-feasible, +inf otherwise (used without a repair map).
  double feasible_objective(const std::vector<double>& x) const {
    for (const auto& r : rows_) {
      double a = 0.0;
      for (const auto& [j, v] : r.coefs) a += v * x[j];
      if (a < r.rhs - 1e-9) return std::numeric_limits<double>::infinity();
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += f_.cost[j] * x[j];
    return obj;
  }
};

}  // namespace detail

// Restarted primal-dual hybrid gradient on the equilibrated covering rows.
// Stops once a repaired primal point is certified within (1 + c) of a Lagrangian lower bound.
inline PcSolution approx_pc_solve(const PackingCoveringForm& form, double c, const PcRepair& repair = {},
                                  const PcOptions& opt = {}) {
  if (!(c > 0.0)) fail(ErrorCode::InvalidParameters, "approximation factor must be positive");
  if (form.cost.size() != form.num_vars || form.upper.size() != form.num_vars)
    fail(ErrorCode::InvalidParameters, "form vectors do not match variable count");
  for (std::size_t j = 0; j < form.num_vars; ++j)
    if (form.cost[j] < 0.0 || !std::isfinite(form.upper[j]) || form.upper[j] < 0.0)
      fail(ErrorCode::InvalidParameters, "costs must be nonnegative and bounds finite");
  detail::PcSolver s(form, opt);
  return s.solve(c, repair);
}

}  // namespace avgslope
