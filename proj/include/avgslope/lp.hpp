#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "avgslope/error.hpp"

namespace avgslope {

enum class RowSense { le, ge, eq };

struct LpRow {
  std::vector<std::pair<std::size_t, double>> coefs;
  RowSense sense = RowSense::le;
  double rhs = 0.0;
};

// minimize cost . x  subject to rows, 0 <= x <= upper.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> cost;
  std::vector<double> upper;  // empty or +inf entries mean unbounded above
  std::vector<LpRow> rows;

  std::size_t add_var(double c, double ub = std::numeric_limits<double>::infinity()) {
    cost.push_back(c);
    upper.push_back(ub);
    return num_vars++;
  }
  void add_row(std::vector<std::pair<std::size_t, double>> coefs, RowSense s, double rhs) {
    rows.push_back(LpRow{std::move(coefs), s, rhs});
  }
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::string method;
  double max_residual = 0.0;
};

// Largest violation of rows and bounds by x (absolute).
inline double lp_residual(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    worst = std::max(worst, -x[j]);
    if (j < lp.upper.size() && std::isfinite(lp.upper[j])) worst = std::max(worst, x[j] - lp.upper[j]);
  }
  for (const auto& r : lp.rows) {
    double a = 0.0;
    for (const auto& [j, v] : r.coefs) a += v * x[j];
    switch (r.sense) {
      case RowSense::le: worst = std::max(worst, a - r.rhs); break;
      case RowSense::ge: worst = std::max(worst, r.rhs - a); break;
      case RowSense::eq: worst = std::max(worst, std::abs(a - r.rhs)); break;
    }
  }
  return worst;
}

namespace detail {

// Dense two-phase tableau simplex. Entering column by most negative reduced cost, switching to
// Bland's lowest-index rule after a run of degenerate pivots (and back after progress); leaving
// row by a Harris ratio test (largest pivot among near-minimal ratios, lowest basic index on ties).
class Tableau {
 public:
  enum class Status { optimal, infeasible, unbounded, iteration_limit };

  struct Result {
    Status status = Status::optimal;
    std::vector<double> x;
    std::vector<double> duals;  // simplex multipliers per original row, original orientation
    double objective = 0.0;
    std::size_t iterations = 0;
  };

  static Result solve(std::size_t nv, const std::vector<double>& cost, const std::vector<LpRow>& rows_in,
                      std::size_t max_iters) {
    Tableau t;
    return t.run(nv, cost, rows_in, max_iters);
  }

 private:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr std::size_t kDegenerateSwitch = 50;
  static constexpr double kHarrisSlack = 1e-9;

  std::size_t m_ = 0, cols_ = 0, w_ = 0;  // w_ = row stride (cols_ + 1, last = rhs)
  std::vector<double> a_;
  std::vector<double> obj_;  // reduced costs, last entry = -objective
  std::vector<std::size_t> basis_;
  std::vector<char> allowed_;
  std::size_t iters_ = 0;

  double& at(std::size_t r, std::size_t c) { return a_[r * w_ + c]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    double* prow = &a_[pr * w_];
    std::vector<std::size_t> nz;
    nz.reserve(64);
    for (std::size_t c = 0; c < w_; ++c) {
      if (prow[c] != 0.0) {
        prow[c] /= p;
        nz.push_back(c);
      }
    }
    prow[pc] = 1.0;
    auto eliminate = [&](double* row) {
      const double f = row[pc];
      if (f == 0.0) return;
      for (std::size_t c : nz) {
        double v = row[c] - f * prow[c];
        if (std::abs(v) < 1e-13) v = 0.0;
        row[c] = v;
      }
      row[pc] = 0.0;
    };
    for (std::size_t r = 0; r < m_; ++r)
      if (r != pr) eliminate(&a_[r * w_]);
    eliminate(obj_.data());
    basis_[pr] = pc;
  }

  Status iterate(std::size_t max_iters) {
    std::size_t degenerate_run = 0;
    while (true) {
      if (iters_ >= max_iters) return Status::iteration_limit;
      const bool bland = degenerate_run >= kDegenerateSwitch;
      std::size_t pc = cols_;
      double best = -kCostTol;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (!allowed_[c]) continue;
        if (obj_[c] < best) {
          pc = c;
          if (bland) break;
          best = obj_[c];
        }
      }
      if (pc == cols_) return Status::optimal;
      // Harris two-pass ratio test: bound the step with a small feasibility slack, then take the
      // largest pivot among rows within that bound.
      double theta = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double v = at(r, pc);
        if (v > kPivotTol) theta = std::min(theta, (std::max(0.0, at(r, cols_)) + kHarrisSlack) / v);
      }
      if (!std::isfinite(theta)) return Status::unbounded;
      std::size_t pr = m_;
      double big = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        const double v = at(r, pc);
        if (v <= kPivotTol || std::max(0.0, at(r, cols_)) / v > theta) continue;
        if (v > big || (v == big && basis_[r] < basis_[pr])) {
          pr = r;
          big = v;
        }
      }
      const double ratio = std::max(0.0, at(pr, cols_)) / big;
      degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(pr, pc);
      for (std::size_t r = 0; r < m_; ++r)
        if (at(r, cols_) < 0.0) at(r, cols_) = 0.0;
      ++iters_;
    }
  }

  Result run(std::size_t nv, const std::vector<double>& cost, const std::vector<LpRow>& rows,
             std::size_t max_iters) {
    Result res;
    m_ = rows.size();
    std::vector<double> sign(m_, 1.0);
    std::vector<RowSense> sense(m_);
    std::size_t n_slack = 0, n_art = 0;
    for (std::size_t r = 0; r < m_; ++r) {
      sense[r] = rows[r].sense;
      if (rows[r].rhs < 0.0) {
        sign[r] = -1.0;
        if (sense[r] == RowSense::le) sense[r] = RowSense::ge;
        else if (sense[r] == RowSense::ge) sense[r] = RowSense::le;
      }
      if (sense[r] != RowSense::eq) ++n_slack;
      if (sense[r] != RowSense::le) ++n_art;
    }
    const std::size_t slack0 = nv, art0 = nv + n_slack;
    cols_ = nv + n_slack + n_art;
    w_ = cols_ + 1;
    a_.assign(m_ * w_, 0.0);
    obj_.assign(w_, 0.0);
    basis_.assign(m_, 0);
    allowed_.assign(cols_, 1);
    std::vector<std::size_t> slack_col(m_, cols_);
    std::vector<double> slack_orig_sign(m_, 0.0);
    std::size_t si = slack0, ai = art0;
    for (std::size_t r = 0; r < m_; ++r) {
      for (const auto& [j, v] : rows[r].coefs) at(r, j) += sign[r] * v;
      at(r, cols_) = sign[r] * rows[r].rhs;
      if (sense[r] == RowSense::le) {
        at(r, si) = 1.0;
        slack_col[r] = si;
        slack_orig_sign[r] = sign[r];
        basis_[r] = si++;
      } else if (sense[r] == RowSense::ge) {
        at(r, si) = -1.0;
        slack_col[r] = si;
        slack_orig_sign[r] = -sign[r];
        ++si;
        at(r, ai) = 1.0;
        basis_[r] = ai++;
      } else {
        at(r, ai) = 1.0;
        basis_[r] = ai++;
      }
    }
    // Phase 1: minimize the sum of artificials.
    if (n_art > 0) {
      for (std::size_t r = 0; r < m_; ++r)
        if (basis_[r] >= art0)
          for (std::size_t c = 0; c < w_; ++c)
            if (c < art0 || c == cols_) obj_[c] -= at(r, c);
      Status st = iterate(max_iters);
      if (st == Status::iteration_limit) {
        res.status = st;
        return res;
      }
      const double scale = rhs_scale();
      if (-obj_[cols_] > 1e-9 * scale) {
        res.status = Status::infeasible;
        return res;
      }
      // Drive remaining artificials out of the basis where possible.
      for (std::size_t r = 0; r < m_; ++r) {
        if (basis_[r] < art0) continue;
        std::size_t pc = cols_;
        double big = kPivotTol;
        for (std::size_t c = 0; c < art0; ++c)
          if (std::abs(at(r, c)) > big) {
            big = std::abs(at(r, c));
            pc = c;
          }
        if (pc != cols_) pivot(r, pc);
      }
      for (std::size_t c = art0; c < cols_; ++c) allowed_[c] = 0;
    }
    // Phase 2 reduced costs.
    std::fill(obj_.begin(), obj_.end(), 0.0);
    for (std::size_t j = 0; j < nv; ++j) obj_[j] = cost[j];
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t b = basis_[r];
      const double cb = b < nv ? cost[b] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c < w_; ++c) obj_[c] -= cb * at(r, c);
    }
    Status st = iterate(max_iters);
    res.iterations = iters_;
    if (st != Status::optimal) {
      res.status = st;
      return res;
    }
    res.x.assign(nv, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] < nv) res.x[basis_[r]] = std::max(0.0, at(r, cols_));
    res.objective = 0.0;
    for (std::size_t j = 0; j < nv; ++j) res.objective += cost[j] * res.x[j];
    res.duals.assign(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      if (slack_col[r] != cols_) res.duals[r] = -obj_[slack_col[r]] / slack_orig_sign[r];
    return res;
  }

  double rhs_scale() const {
    double s = 1.0;
    for (std::size_t r = 0; r < m_; ++r) s = std::max(s, std::abs(a_[r * w_ + cols_]));
    return s;
  }
};

// Rows with finite upper bounds moved into the constraint list.
inline std::vector<LpRow> rows_with_bounds(const LinearProgram& lp) {
  std::vector<LpRow> rows = lp.rows;
  for (std::size_t j = 0; j < lp.upper.size(); ++j)
    if (std::isfinite(lp.upper[j])) rows.push_back(LpRow{{{j, 1.0}}, RowSense::le, lp.upper[j]});
  return rows;
}

}  // namespace detail

// Exact simplex. When rows greatly outnumber variables the dual program is solved instead
// and the primal is read from its multipliers; the primal route is the fallback.
inline LpSolution exact_lp_solve(const LinearProgram& lp, std::size_t max_iters = 2000000) {
  using detail::Tableau;
  if (lp.cost.size() != lp.num_vars) fail(ErrorCode::InvalidParameters, "cost length != variable count");
  const auto rows = detail::rows_with_bounds(lp);
  double scale = 1.0;
  for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));
  const double tol = 1e-9 * scale;

  std::size_t ge_rows = 0;
  for (const auto& r : rows) ge_rows += r.sense == RowSense::eq ? 2 : 1;
  if (ge_rows > 2 * lp.num_vars) {
    // Dual of  min c.x, A x >= b, x >= 0  is  max b.y, A^T y <= c, y >= 0.
    std::vector<std::pair<std::size_t, double>> ycols;  // (row index, orientation sign)
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].sense != RowSense::le) ycols.push_back({r, 1.0});
      if (rows[r].sense != RowSense::ge) ycols.push_back({r, -1.0});
    }
    std::vector<LpRow> drows(lp.num_vars);
    std::vector<double> dcost(ycols.size());
    for (std::size_t k = 0; k < ycols.size(); ++k) {
      const auto [r, sg] = ycols[k];
      dcost[k] = -sg * rows[r].rhs;
      for (const auto& [j, v] : rows[r].coefs) drows[j].coefs.push_back({k, sg * v});
    }
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      drows[j].sense = RowSense::le;
      drows[j].rhs = lp.cost[j];
    }
    auto d = Tableau::solve(ycols.size(), dcost, drows, max_iters);
    if (d.status == Tableau::Status::optimal) {
      LpSolution sol;
      sol.x.resize(lp.num_vars);
      for (std::size_t j = 0; j < lp.num_vars; ++j) sol.x[j] = std::max(0.0, -d.duals[j]);
      if (lp.upper.size() == lp.num_vars)
        for (std::size_t j = 0; j < lp.num_vars; ++j) sol.x[j] = std::min(sol.x[j], lp.upper[j]);
      sol.objective = 0.0;
      for (std::size_t j = 0; j < lp.num_vars; ++j) sol.objective += lp.cost[j] * sol.x[j];
      sol.iterations = d.iterations;
      sol.method = "dual-simplex-tableau";
      sol.max_residual = lp_residual(lp, sol.x);
      if (sol.max_residual <= tol && std::abs(sol.objective + d.objective) <= 1e-7 * std::max(1.0, std::abs(sol.objective)))
        return sol;
    }
  }
  auto p = Tableau::solve(lp.num_vars, lp.cost, rows, max_iters);
  if (p.status == Tableau::Status::infeasible) fail(ErrorCode::Infeasible, "LP has no feasible point");
  if (p.status == Tableau::Status::unbounded) fail(ErrorCode::Unbounded, "LP objective unbounded below");
  if (p.status == Tableau::Status::iteration_limit) fail(ErrorCode::SolverFailure, "simplex iteration limit");
  LpSolution sol;
  sol.x = std::move(p.x);
  sol.objective = p.objective;
  sol.iterations = p.iterations;
  sol.method = "primal-simplex-tableau";
  sol.max_residual = lp_residual(lp, sol.x);
  if (sol.max_residual > tol) fail(ErrorCode::SolverFailure, "simplex residual too large");
  return sol;
}

}  // namespace avgslope
