#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "avgslope/error.hpp"
#include "avgslope/metric.hpp"
#include "avgslope/nets.hpp"
#include "avgslope/pmse.hpp"
#include "avgslope/slope.hpp"

namespace avgslope {

struct DefectReport {
  double eta = 0.0;
  double ell = 0.0;
  double c = 1.0;
  std::vector<std::size_t> defect_indices;
};

inline std::vector<std::size_t> slope_witnesses(const FiniteMetricSpace& space, std::span<const double> f,
                                                std::size_t i, double threshold) {
  if (!(threshold > 0.0)) fail(ErrorCode::InvalidParameters, "threshold must be positive");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < space.size(); ++j)
    if (j != i && std::abs(f[i] - f[j]) / space.distance(i, j) >= threshold) out.push_back(j);
  return out;
}

// x is an (eta, ell, c)-defect when its slope is >= ell and every (ell/c)-slope witness y
// has |f(x) - f(y)| <= eta.
inline DefectReport find_defects_with_slopes(const FiniteMetricSpace& space, std::span<const double> f,
                                             std::span<const double> slopes, double eta, double ell,
                                             double c) {
  if (!(eta > 0.0) || !(ell > 0.0) || !(c >= 1.0))
    fail(ErrorCode::InvalidParameters, "need eta > 0, ell > 0, c >= 1");
  DefectReport rep{eta, ell, c, {}};
  const double thr = ell / c;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!(slopes[i] >= ell)) continue;
    bool small_jumps = true;
    for (std::size_t j = 0; j < space.size() && small_jumps; ++j) {
      if (j == i) continue;
      const double gap = std::abs(f[i] - f[j]);
      if (gap / space.distance(i, j) >= thr && gap > eta) small_jumps = false;
    }
    if (small_jumps) rep.defect_indices.push_back(i);
  }
  return rep;
}

inline DefectReport find_defects(const FiniteMetricSpace& space, std::span<const double> f, double eta,
                                 double ell, double c) {
  const auto s = local_slopes(space, f);
  return find_defects_with_slopes(space, f, s, eta, ell, c);
}

struct RepairResult {
  std::vector<double> values;
  std::vector<std::size_t> net;       // V
  std::vector<std::size_t> net_keep;  // V0
  std::vector<std::size_t> net_bad;   // V1
  std::vector<std::size_t> removed;   // A_f
};

// Defect repair: PMSE of f from the complement of A_f, where A_f collects the balls around
// net points of M_f(ell) lying entirely inside the (eta, ell, 1)-defect set, minus the other
// balls and the net itself.
inline RepairResult repair_detailed(const FiniteMetricSpace& space, std::span<const double> f, double eta,
                                    double ell) {
  if (!(eta > 0.0) || !(ell > 0.0) || !std::isfinite(eta) || !std::isfinite(ell))
    fail(ErrorCode::InvalidParameters, "need eta > 0 and ell > 0");
  const std::size_t n = space.size();
  if (f.size() != n) fail(ErrorCode::InvalidParameters, "function length != point count");
  for (double v : f)
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidParameters, "repair expects values in [0,1]");
  RepairResult res;
  res.values.assign(f.begin(), f.end());
  const auto slopes = local_slopes(space, f);
  std::vector<std::size_t> level;
  for (std::size_t i = 0; i < n; ++i)
    if (slopes[i] >= ell) level.push_back(i);
  if (level.empty()) return res;

  const double r = eta / ell;
  res.net = build_net_subset(space, r, level).center_indices;
  std::vector<char> defect(n, 0);
  for (std::size_t i : find_defects_with_slopes(space, f, slopes, eta, ell, 1.0).defect_indices) defect[i] = 1;

  std::vector<char> in_bad(n, 0), in_keep(n, 0), in_net(n, 0);
  for (std::size_t v : res.net) {
    in_net[v] = 1;
    bool all_defects = true;
    for (std::size_t y = 0; y < n && all_defects; ++y)
      if (space.distance(v, y) <= r && !defect[y]) all_defects = false;
    (all_defects ? res.net_bad : res.net_keep).push_back(v);
    auto& mark = all_defects ? in_bad : in_keep;
    for (std::size_t y = 0; y < n; ++y)
      if (space.distance(v, y) <= r) mark[y] = 1;
  }
  std::vector<std::size_t> kept;
  for (std::size_t y = 0; y < n; ++y) {
    if (in_bad[y] && !in_keep[y] && !in_net[y])
      res.removed.push_back(y);
    else
      kept.push_back(y);
  }
  if (res.removed.empty()) return res;
  std::vector<double> kv(kept.size());
  for (std::size_t a = 0; a < kept.size(); ++a) kv[a] = f[kept[a]];
  res.values = pmse_extend(space, kept, kv);
  return res;
}

inline std::vector<double> repair(const FiniteMetricSpace& space, std::span<const double> f, double eta,
                                  double ell) {
  return repair_detailed(space, f, eta, ell).values;
}

// Union of Voronoi cells (from an (eta/ell)-net of the whole space) that touch M_g(ell).
inline std::vector<std::size_t> level_set_cells(const FiniteMetricSpace& space, std::span<const double> g,
                                                double eta, double ell) {
  if (!(eta > 0.0) || !(ell > 0.0)) fail(ErrorCode::InvalidParameters, "need eta > 0 and ell > 0");
  const auto slopes = local_slopes(space, g);
  const auto net = build_net(space, eta / ell);
  std::vector<char> touched(space.size(), 0);
  for (std::size_t i = 0; i < space.size(); ++i)
    if (slopes[i] >= ell) touched[net.assignment[i]] = 1;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (touched[net.assignment[i]]) out.push_back(i);
  return out;
}

}  // namespace avgslope
