#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "avgslope/error.hpp"
#include "avgslope/metric.hpp"

namespace avgslope {

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct NetResult {
  std::vector<std::size_t> center_indices;  // insertion order
  double radius = 0.0;
  std::vector<std::size_t> assignment;  // point -> nearest center (point index)
};

// Nearest center for every point; ties go to the lowest point index.
inline std::vector<std::size_t> voronoi_assign(const FiniteMetricSpace& space,
                                               std::span<const std::size_t> centers) {
  if (centers.empty()) fail(ErrorCode::EmptyCenters, "voronoi_assign needs centers");
  std::vector<std::size_t> sorted(centers.begin(), centers.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> out(space.size());
  for (std::size_t x = 0; x < space.size(); ++x) {
    std::size_t best = sorted[0];
    double bd = space.distance(x, best);
    for (std::size_t k = 1; k < sorted.size() && bd > 0.0; ++k) {
      const double d = space.distance(x, sorted[k]);
      if (d < bd) {
        bd = d;
        best = sorted[k];
      }
    }
    out[x] = best;
  }
  return out;
}

// Greedy farthest-point net of `subset`, optionally extending `initial` centers.
// Every subset point ends within `radius` of a center; centers are pairwise > radius apart
// (provided the initial centers already are). Ties pick the lowest index.
inline NetResult build_net_subset(const FiniteMetricSpace& space, double radius,
                                  std::span<const std::size_t> subset,
                                  std::span<const std::size_t> initial = {}) {
  if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorCode::InvalidRadius, "radius must be positive");
  std::vector<std::size_t> pts(subset.begin(), subset.end());
  std::sort(pts.begin(), pts.end());
  NetResult net;
  net.radius = radius;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dmin(pts.size(), inf);
  auto add_center = [&](std::size_t c) {
    net.center_indices.push_back(c);
    for (std::size_t a = 0; a < pts.size(); ++a) dmin[a] = std::min(dmin[a], space.distance(pts[a], c));
  };
  for (std::size_t c : initial) add_center(c);
  if (!pts.empty() && net.center_indices.empty()) add_center(pts[0]);
  while (true) {
    std::size_t arg = kNone;
    double far = radius;
    for (std::size_t a = 0; a < pts.size(); ++a)
      if (dmin[a] > far) {
        far = dmin[a];
        arg = a;
      }
    if (arg == kNone) break;
    add_center(pts[arg]);
  }
  if (!net.center_indices.empty()) net.assignment = voronoi_assign(space, net.center_indices);
  return net;
}

inline NetResult build_net(const FiniteMetricSpace& space, double radius, std::size_t seed = 0) {
  if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorCode::InvalidRadius, "radius must be positive");
  if (space.size() == 0) return NetResult{{}, radius, {}};
  if (seed >= space.size()) fail(ErrorCode::InvalidParameters, "seed out of range");
  std::vector<std::size_t> all(space.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::size_t first[1] = {seed};
  return build_net_subset(space, radius, all, first);
}

// Empty string when `net` covers `subset` and is a packing at its radius.
inline std::string audit_net(const FiniteMetricSpace& space, const NetResult& net,
                             std::span<const std::size_t> subset) {
  for (std::size_t x : subset) {
    const std::size_t c = net.assignment.at(x);
    if (space.distance(x, c) > net.radius) return "point " + std::to_string(x) + " not covered";
  }
  for (std::size_t a = 0; a < net.center_indices.size(); ++a) {
    const std::size_t c = net.center_indices[a];
    if (net.assignment.at(c) != c) return "center " + std::to_string(c) + " not self-assigned";
    for (std::size_t b = a + 1; b < net.center_indices.size(); ++b)
      if (!(space.distance(c, net.center_indices[b]) > net.radius))
        return "centers " + std::to_string(c) + "," + std::to_string(net.center_indices[b]) + " too close";
  }
  return {};
}

inline std::string audit_net(const FiniteMetricSpace& space, const NetResult& net) {
  std::vector<std::size_t> all(space.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return audit_net(space, net, all);
}

struct Hierarchy {
  double scale = 1.0;                 // original distance = normalized distance * scale
  FiniteMetricSpace normalized;       // diameter <= 1
  std::vector<NetResult> levels;      // level i has radius 2^{-i} in normalized units
  std::vector<std::vector<std::size_t>> parent;  // parent[i][x] for level-i centers x, i >= 1

  std::size_t depth() const noexcept { return levels.size(); }
};

// Nested greedy nets: level i is a 2^{-i}-net of all points seeded with level i-1.
// Stops at the first level whose radius is below the minimal interpoint distance.
inline Hierarchy build_hierarchy(const FiniteMetricSpace& space) {
  if (space.size() == 0) fail(ErrorCode::DegenerateSpace, "empty space");
  Hierarchy h;
  const double diam = space.diameter();
  h.scale = diam > 1.0 ? diam : 1.0;
  h.normalized = diam > 1.0 ? space.scaled(1.0 / diam) : space;
  const FiniteMetricSpace& s = h.normalized;
  std::vector<std::size_t> all(s.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const double mind = s.size() >= 2 ? s.min_distance() : 0.0;
  double r = 1.0;
  std::vector<std::size_t> prev;
  while (true) {
    NetResult lvl = prev.empty() ? build_net(s, r, 0) : build_net_subset(s, r, all, prev);
    std::vector<std::size_t> par(s.size(), kNone);
    if (!prev.empty()) {
      const auto a = voronoi_assign(s, prev);
      for (std::size_t c : lvl.center_indices) par[c] = a[c];
    }
    if (std::string err = audit_net(s, lvl); !err.empty())
      fail(ErrorCode::SolverFailure, "hierarchy level audit failed: " + err);
    prev = lvl.center_indices;
    h.levels.push_back(std::move(lvl));
    h.parent.push_back(std::move(par));
    if (s.size() == 1 || r < mind) break;
    r *= 0.5;
  }
  return h;
}

struct DdimEstimate {
  double value = 0.0;
  std::size_t max_cover = 1;  // largest half-radius cover found
  double max_value = 0.0;     // log2(max_cover)
};

// Empirical doubling-dimension estimate: over sampled balls B(x, r) at dyadic radii with at least
// two points, the size of a greedy cover of B by balls of radius r/2 centered in B. The estimate
// is the mean of log2 of the cover sizes; grids alone push the max to log2 3 at odd step counts.
// Greedy picks the ball covering most uncovered points, then the one farthest from x,
// then the lowest index.
inline DdimEstimate estimate_ddim(const FiniteMetricSpace& space, std::size_t max_balls = 64) {
  const std::size_t n = space.size();
  if (n < 2) fail(ErrorCode::TooFewPoints, "ddim estimate needs two points");
  std::vector<std::size_t> centers;
  const std::size_t nb = std::min(n, max_balls);
  for (std::size_t k = 0; k < nb; ++k) centers.push_back(k * n / nb);
  const double mind = space.min_distance();
  std::size_t best = 1, balls = 0;
  double log_sum = 0.0;
  for (double r = space.diameter(); r >= mind; r *= 0.5) {
    for (std::size_t x : centers) {
      std::vector<std::size_t> ball;
      for (std::size_t y = 0; y < n; ++y)
        if (space.distance(x, y) <= r) ball.push_back(y);
      const std::size_t m = ball.size();
      if (m < 2) continue;
      std::vector<std::vector<std::size_t>> reach(m);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          if (space.distance(ball[a], ball[b]) <= 0.5 * r) reach[a].push_back(b);
      std::vector<std::size_t> gain(m);
      for (std::size_t a = 0; a < m; ++a) gain[a] = reach[a].size();
      std::vector<char> covered(m, 0);
      std::size_t left = m, used = 0;
      while (left > 0) {
        std::size_t pick = 0;
        for (std::size_t a = 1; a < m; ++a) {
          if (gain[a] > gain[pick] ||
              (gain[a] == gain[pick] &&
               space.distance(x, ball[a]) > space.distance(x, ball[pick])))
            pick = a;
        }
        ++used;
        for (std::size_t b : reach[pick]) {
          if (covered[b]) continue;
          covered[b] = 1;
          --left;
          for (std::size_t a : reach[b]) --gain[a];  // reach is symmetric
        }
      }
      best = std::max(best, used);
      log_sum += std::log2(static_cast<double>(used));
      ++balls;
    }
  }
  const double mean = balls ? log_sum / static_cast<double>(balls) : 0.0;
  return DdimEstimate{mean, best, std::log2(static_cast<double>(best))};
}

}  // namespace avgslope
