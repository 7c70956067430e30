#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "avgslope/error.hpp"
#include "avgslope/metric.hpp"

namespace avgslope {

// max over x' in subset \ {i} of |f(i) - f(x')| / dist(i, x'); 0 for an empty witness set.
inline double local_slope(const FiniteMetricSpace& space, std::span<const double> f, std::size_t i,
                          std::span<const std::size_t> subset) {
  double best = 0.0;
  for (std::size_t j : subset) {
    if (j == i) continue;
    best = std::max(best, std::abs(f[i] - f[j]) / space.distance(i, j));
  }
  return best;
}

// Local slopes of every point against the whole space.
inline std::vector<double> local_slopes(const FiniteMetricSpace& space, std::span<const double> f) {
  const std::size_t n = space.size();
  if (f.size() != n) fail(ErrorCode::InvalidParameters, "function length != point count");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = std::abs(f[i] - f[j]) / space.distance(i, j);
      out[i] = std::max(out[i], s);
      out[j] = std::max(out[j], s);
    }
  return out;
}

struct LevelPoint {
  double t = 0.0;
  double mass = 0.0;  // weight of {i : local_i >= t}
};

struct SlopeProfile {
  std::vector<double> local;
  double strong_mean = 0.0;
  double weak_mean = 0.0;
  double lip = 0.0;
  std::vector<LevelPoint> level_curve;  // ascending t, nonincreasing mass
};

// sup over t of t * P(X >= t) for a finite nonnegative distribution.
inline double weak_mean_of(std::span<const double> values, std::span<const double> weights) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  double cum = 0.0, best = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    cum += weights[order[k]];
    const bool group_end = k + 1 == order.size() || values[order[k + 1]] != values[order[k]];
    if (group_end) best = std::max(best, values[order[k]] * cum);
  }
  return best;
}

inline SlopeProfile profile_from_slopes(std::vector<double> local, std::span<const double> weights) {
  SlopeProfile p;
  p.local = std::move(local);
  const std::size_t n = p.local.size();
  for (std::size_t i = 0; i < n; ++i) {
    p.strong_mean += weights[i] * p.local[i];
    p.lip = std::max(p.lip, p.local[i]);
  }
  p.weak_mean = weak_mean_of(p.local, weights);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p.local[a] > p.local[b]; });
  double cum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += weights[order[k]];
    if (k + 1 == n || p.local[order[k + 1]] != p.local[order[k]])
      p.level_curve.push_back({p.local[order[k]], cum});
  }
  std::reverse(p.level_curve.begin(), p.level_curve.end());
  return p;
}

inline SlopeProfile profile(const WeightedSample& sample, std::span<const double> f) {
  return profile_from_slopes(local_slopes(sample.space(), f), sample.weights());
}

enum class SmoothnessClass { lip, strong, weak, none };

inline const char* class_name(SmoothnessClass c) {
  switch (c) {
    case SmoothnessClass::lip: return "lip";
    case SmoothnessClass::strong: return "strong";
    case SmoothnessClass::weak: return "weak";
    case SmoothnessClass::none: return "none";
  }
  return "none";
}

inline SmoothnessClass class_membership(const SlopeProfile& p, double L) {
  if (!(L > 0.0)) fail(ErrorCode::InvalidParameters, "L must be positive");
  if (p.lip <= L) return SmoothnessClass::lip;
  if (p.strong_mean <= L) return SmoothnessClass::strong;
  if (p.weak_mean <= L) return SmoothnessClass::weak;
  return SmoothnessClass::none;
}

inline std::vector<std::size_t> level_set(const SlopeProfile& p, double t) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidParameters, "level t must be positive");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.local.size(); ++i)
    if (p.local[i] >= t) out.push_back(i);
  return out;
}

// Markov-type tail check s * mass(s) <= L at every materialized threshold.
inline bool check_markov(const SlopeProfile& p, double L) {
  for (const auto& lp : p.level_curve)
    if (lp.t * lp.mass > L) return false;
  return true;
}

}  // namespace avgslope
