#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "avgslope/error.hpp"
#include "avgslope/metric.hpp"
#include "avgslope/slope.hpp"

namespace avgslope {

struct BoundReport {
  std::string name;
  std::map<std::string, double> inputs;
  double value = 0.0;
  bool clamped = false;  // a log factor was nonpositive and set to 0
  std::string notes;
};

namespace detail {

inline void require_positive(const char* what, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidParameters, std::string(what) + " must be positive");
}

// ln(x) clamped at 0, flagging the clamp.
inline double clamped_log(double x, bool& clamped) {
  const double v = std::log(x);
  if (v <= 0.0) {
    clamped = true;
    return 0.0;
  }
  return v;
}

}  // namespace detail

// log N(t, Lip_L, l_inf) <= (16 L diam / t)^d ln(8/t).
inline BoundReport lip_cover_bound(double t, double L, double d, double diam = 1.0) {
  detail::require_positive("t", t);
  detail::require_positive("L", L);
  detail::require_positive("d", d);
  detail::require_positive("diam", diam);
  BoundReport r{"lip_cover", {{"t", t}, {"L", L}, {"d", d}, {"diam", diam}}, 0.0, false, ""};
  const double lg = detail::clamped_log(8.0 / t, r.clamped);
  r.value = lg == 0.0 ? 0.0 : std::pow(16.0 * L * diam / t, d) * lg;
  if (r.clamped) r.notes = "ln(8/t) <= 0";
  return r;
}

// Same bound from an explicit covering number of the space at scale t/(8L).
inline BoundReport lip_cover_bound_from_covering(double t, double covering_number) {
  detail::require_positive("t", t);
  detail::require_positive("covering_number", covering_number);
  BoundReport r{"lip_cover_explicit", {{"t", t}, {"covering_number", covering_number}}, 0.0, false, ""};
  r.value = covering_number * detail::clamped_log(8.0 / t, r.clamped);
  if (r.clamped) r.notes = "ln(8/t) <= 0";
  return r;
}

// log N(t, weak-mean class, L2(mu)) <= (128 L diam / t^3)^d ln(16/t).
inline BoundReport ambient_cover_bound(double t, double L, double d, double diam = 1.0) {
  detail::require_positive("t", t);
  detail::require_positive("L", L);
  detail::require_positive("d", d);
  detail::require_positive("diam", diam);
  BoundReport r{"ambient_cover", {{"t", t}, {"L", L}, {"d", d}, {"diam", diam}}, 0.0, false, ""};
  const double lg = detail::clamped_log(16.0 / t, r.clamped);
  r.value = lg == 0.0 ? 0.0 : std::pow(128.0 * L * diam / (t * t * t), d) * lg;
  if (r.clamped) r.notes = "ln(16/t) <= 0";
  return r;
}

// eps0 = C_delta sqrt(L) n^{-1/(8d)}.
inline double empirical_eps0(double n, double L, double d, double c_delta = 1.0) {
  detail::require_positive("n", n);
  detail::require_positive("L", L);
  detail::require_positive("d", d);
  detail::require_positive("C_delta", c_delta);
  return c_delta * std::sqrt(L) * std::pow(n, -1.0 / (8.0 * d));
}

// (c L / (alpha^3 eps0^3))^d ln(1/(alpha eps0)); c defaults to 1.
inline BoundReport empirical_cover_bound(double alpha, double eps0, double L, double d, double c = 1.0) {
  detail::require_positive("alpha", alpha);
  detail::require_positive("eps0", eps0);
  detail::require_positive("L", L);
  detail::require_positive("c", c);
  if (!(d >= 1.0) || !std::isfinite(d)) fail(ErrorCode::InvalidParameters, "d must be >= 1");
  BoundReport r{"empirical_cover", {{"alpha", alpha}, {"eps0", eps0}, {"L", L}, {"d", d}, {"c", c}}, 0.0, false, ""};
  const double ae = alpha * eps0;
  const double lg = detail::clamped_log(1.0 / ae, r.clamped);
  r.value = lg == 0.0 ? 0.0 : std::pow(c * L / (ae * ae * ae), d) * lg;
  if (r.clamped) r.notes = "alpha * eps0 >= 1";
  return r;
}

struct AdditiveTerms {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
  double sum() const { return t1 + t2 + t3 + t4; }
};

// 25 n^{-1/4d} + 15 sqrt(L) n^{-1/8d} + (6 + 2^{d/4}) n^{-1/8} + (162/n ln(2/delta))^{1/4}.
inline AdditiveTerms distance_additive_terms(double n, double L, double d, double delta) {
  if (!(n >= 1.0) || !std::isfinite(n)) fail(ErrorCode::InvalidParameters, "n must be >= 1");
  detail::require_positive("L", L);
  detail::require_positive("d", d);
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::InvalidParameters, "delta must lie in (0,1)");
  AdditiveTerms a;
  a.t1 = 25.0 * std::pow(n, -1.0 / (4.0 * d));
  a.t2 = 15.0 * std::sqrt(L) * std::pow(n, -1.0 / (8.0 * d));
  a.t3 = (6.0 + std::pow(2.0, d / 4.0)) * std::pow(n, -1.0 / 8.0);
  a.t4 = std::pow(162.0 / n * std::log(2.0 / delta), 0.25);
  return a;
}

inline BoundReport distance_additive_term(double n, double L, double d, double delta) {
  const AdditiveTerms a = distance_additive_terms(n, L, d, delta);
  return {"distance_additive", {{"n", n}, {"L", L}, {"d", d}, {"delta", delta}}, a.sum(), false, ""};
}

enum class TaskKind { regression, classification };

struct GeneralizationTerms {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double sum() const { return t1 + t2 + t3; }
};

// C sqrt(L) / n^{1/8d} + C^{-d/2} sqrt(2) / n^{5/16} + 3 sqrt(ln(2/delta) / 2n); same form for both tasks.
inline GeneralizationTerms generalization_terms(double n, double L, double d, double delta, double c_delta) {
  if (!(n >= 1.0) || !std::isfinite(n)) fail(ErrorCode::InvalidParameters, "n must be >= 1");
  if (!(L >= 0.0) || !std::isfinite(L)) fail(ErrorCode::InvalidParameters, "L must be nonnegative");
  detail::require_positive("d", d);
  detail::require_positive("C_delta", c_delta);
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::InvalidParameters, "delta must lie in (0,1)");
  GeneralizationTerms g;
  g.t1 = c_delta * std::sqrt(L) / std::pow(n, 1.0 / (8.0 * d));
  g.t2 = std::pow(c_delta, -d / 2.0) * std::sqrt(2.0) / std::pow(n, 5.0 / 16.0);
  g.t3 = 3.0 * std::sqrt(std::log(2.0 / delta) / (2.0 * n));
  return g;
}

inline BoundReport generalization_bound(double n, double L, double d, double delta, double c_delta = 1.0,
                                        TaskKind kind = TaskKind::regression) {
  const GeneralizationTerms g = generalization_terms(n, L, d, delta, c_delta);
  return {kind == TaskKind::regression ? "generalization_regression" : "generalization_classification",
          {{"n", n}, {"L", L}, {"d", d}, {"delta", delta}, {"C_delta", c_delta}},
          g.sum(),
          false,
          ""};
}

// sqrt(m/n) + sqrt((2/n) ln(2/delta)).
inline BoundReport tv_bound(double m, double n, double delta) {
  if (!(m >= 1.0) || !(n >= 1.0)) fail(ErrorCode::InvalidParameters, "m and n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::InvalidParameters, "delta must lie in (0,1)");
  BoundReport r{"tv", {{"m", m}, {"n", n}, {"delta", delta}}, 0.0, false, ""};
  r.value = std::sqrt(m / n) + std::sqrt(2.0 / n * std::log(2.0 / delta));
  if (r.value >= 1.0) r.notes = "vacuous";
  return r;
}

struct WeakStrongCheck {
  double lhs = 0.0;         // E[X]
  double rhs = 0.0;         // 2 W[X] ln(1/p*)
  double weak = 0.0;        // W[X]
  double p_star = 0.0;      // smallest positive weight
  bool degenerate = false;  // a single atom: p* = 1
  bool holds() const { return degenerate || lhs <= rhs * (1.0 + 1e-12); }
};

inline WeakStrongCheck weak_strong_log_check(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size() || values.empty())
    fail(ErrorCode::InvalidParameters, "values and weights must be nonempty and aligned");
  WeakStrongCheck c;
  double total = 0.0;
  c.p_star = 1.0;
  std::size_t atoms = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !(weights[i] >= 0.0)) fail(ErrorCode::InvalidParameters, "need nonnegative data");
    total += weights[i];
    c.lhs += values[i] * weights[i];
    if (weights[i] > 0.0) {
      c.p_star = std::min(c.p_star, weights[i]);
      ++atoms;
    }
  }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::InvalidWeights, "weights must sum to 1");
  c.weak = weak_mean_of(values, weights);
  c.rhs = 2.0 * c.weak * std::log(1.0 / c.p_star);
  c.degenerate = atoms <= 1;
  return c;
}

// Greedy L2(mu) cover of a function bank at radius t: each function not yet within t of a chosen
// centre becomes one. An upper estimate of the covering number.
inline std::size_t empirical_cover_estimate(const std::vector<std::vector<double>>& bank, std::span<const double> mu,
                                            double t) {
  detail::require_positive("t", t);
  std::vector<std::size_t> centres;
  for (std::size_t f = 0; f < bank.size(); ++f) {
    if (bank[f].size() != mu.size()) fail(ErrorCode::InvalidParameters, "bank member length != sample size");
    bool covered = false;
    for (std::size_t c : centres) {
      double acc = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const double diff = bank[f][i] - bank[c][i];
        acc += mu[i] * diff * diff;
      }
      if (std::sqrt(acc) <= t) {
        covered = true;
        break;
      }
    }
    if (!covered) centres.push_back(f);
  }
  return centres.size();
}

struct SamplerStats {
  std::vector<std::vector<double>> bank;
  std::size_t proposals = 0;
};

// Rejection sampler for [0,1]-valued functions with weak mean slope <= L on a 1-D sample:
// proposals mix a random step function with a random Lipschitz ramp; accepted iff the weak mean
// is within L. A sampler, not a uniform measure on the class.
inline SamplerStats sample_weak_lip(const WeightedSample& s, double L, std::size_t count, std::uint64_t seed,
                                    std::size_t max_proposals = 1000000) {
  detail::require_positive("L", L);
  if (s.space().dimension() != 1) fail(ErrorCode::InvalidParameters, "sampler expects 1-D coordinates");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::size_t n = s.size();
  SamplerStats st;
  std::vector<double> f(n);
  while (st.bank.size() < count) {
    if (st.proposals++ >= max_proposals) fail(ErrorCode::SolverFailure, "rejection sampler proposal limit");
    const int steps = static_cast<int>(U(rng) * 4.0);
    std::vector<double> cut(steps), level(steps + 1);
    for (auto& c : cut) c = U(rng);
    std::sort(cut.begin(), cut.end());
    for (auto& v : level) v = U(rng);
    const double mix = U(rng);
    const double slope = (2.0 * U(rng) - 1.0) * L;
    const double off = U(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = s.space().point(i)[0];
      const auto k = static_cast<std::size_t>(std::upper_bound(cut.begin(), cut.end(), x) - cut.begin());
      const double ramp = std::clamp(off + slope * (x - 0.5), 0.0, 1.0);
      f[i] = mix * level[k] + (1.0 - mix) * ramp;
    }
    if (profile(s, f).weak_mean <= L) st.bank.push_back(f);
  }
  return st;
}

}  // namespace avgslope
