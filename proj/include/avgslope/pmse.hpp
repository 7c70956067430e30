#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "avgslope/error.hpp"
#include "avgslope/metric.hpp"
#include "avgslope/nets.hpp"
#include "avgslope/slope.hpp"

namespace avgslope {

struct PmseDetail {
  double value = 0.0;
  std::size_t u = kNone;  // argmax pair; kNone when the value is constant or an anchor hit
  std::size_t v = kNone;
  double ratio = 0.0;
  std::size_t anchor_hit = kNone;
};

// Pointwise minimum slope extension at a query given its distances to the anchors.
inline PmseDetail pmse_eval_detail(std::span<const double> values, std::span<const double> dists) {
  const std::size_t m = values.size();
  if (m == 0) fail(ErrorCode::EmptyAnchors, "no anchors");
  if (dists.size() != m) fail(ErrorCode::InvalidParameters, "distance count != anchor count");
  PmseDetail out;
  for (std::size_t a = 0; a < m; ++a) {
    if (!(dists[a] >= 0.0)) fail(ErrorCode::InvalidParameters, "negative or NaN distance");
    if (dists[a] == 0.0) {
      if (out.anchor_hit != kNone)
        fail(ErrorCode::ZeroDistanceToNonAnchor, "query at zero distance from two anchors");
      out.anchor_hit = a;
    }
  }
  if (out.anchor_hit != kNone) {
    out.value = values[out.anchor_hit];
    return out;
  }
  double best = 0.0;
  for (std::size_t u = 0; u < m; ++u) {
    const double fu = values[u], du = dists[u];
    for (std::size_t v = 0; v < m; ++v) {
      const double gap = values[v] - fu;
      if (!(gap > 0.0)) continue;
      const double r = gap / (dists[v] + du);
      if (r > best) {
        best = r;
        out.u = u;
        out.v = v;
      }
    }
  }
  if (out.u == kNone) {
    out.value = values[0];
    return out;
  }
  out.ratio = best;
  const double lo = values[out.u], hi = values[out.v];
  out.value = std::clamp(lo + best * dists[out.u], lo, hi);
  return out;
}

// Anchor set with values, evaluable anywhere via PMSE.
class Extender {
 public:
  Extender() = default;
  Extender(FiniteMetricSpace anchors, std::vector<double> values)
      : anchors_(std::move(anchors)), values_(std::move(values)) {
    if (values_.empty()) fail(ErrorCode::EmptyAnchors, "extender needs at least one anchor");
    if (values_.size() != anchors_.size()) fail(ErrorCode::InvalidParameters, "anchor value count mismatch");
  }

  static Extender from_indices(const FiniteMetricSpace& space, std::span<const std::size_t> idx,
                               std::span<const double> values) {
    return Extender(space.subspace(idx), std::vector<double>(values.begin(), values.end()));
  }

  const FiniteMetricSpace& anchor_space() const noexcept { return anchors_; }
  const std::vector<double>& anchor_values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  double eval(std::span<const double> dists) const { return pmse_eval_detail(values_, dists).value; }

  // Evaluate at an external coordinate point (coordinate-backed anchors only).
  double eval_at(std::span<const double> q) const {
    std::vector<double> d(values_.size());
    for (std::size_t a = 0; a < d.size(); ++a) d[a] = anchors_.distance_to(q, a);
    return eval(d);
  }

 private:
  FiniteMetricSpace anchors_;
  std::vector<double> values_;
};

inline double pmse_eval(const Extender& e, std::span<const double> dists) { return e.eval(dists); }

inline std::vector<std::size_t> anchor_positions(std::size_t n, std::span<const std::size_t> anchors) {
  std::vector<std::size_t> pos(n, kNone);
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    if (anchors[a] >= n) fail(ErrorCode::InvalidParameters, "anchor index out of range");
    if (pos[anchors[a]] != kNone) fail(ErrorCode::InvalidParameters, "repeated anchor index");
    pos[anchors[a]] = a;
  }
  return pos;
}

// PMSE of anchor values to every point of the space; anchors are copied exactly.
inline std::vector<double> pmse_extend(const FiniteMetricSpace& space, std::span<const std::size_t> anchors,
                                       std::span<const double> anchor_values) {
  if (anchors.empty()) fail(ErrorCode::EmptyAnchors, "no anchors");
  if (anchor_values.size() != anchors.size()) fail(ErrorCode::InvalidParameters, "anchor value count mismatch");
  const std::size_t n = space.size();
  const auto pos = anchor_positions(n, anchors);
  std::vector<double> out(n), d(anchors.size());
  for (std::size_t x = 0; x < n; ++x) {
    if (pos[x] != kNone) {
      out[x] = anchor_values[pos[x]];
      continue;
    }
    for (std::size_t a = 0; a < anchors.size(); ++a) d[a] = space.distance(x, anchors[a]);
    out[x] = pmse_eval_detail(anchor_values, d).value;
  }
  return out;
}

struct PmseReport {
  std::vector<std::size_t> minimality_violations;
  double lip_extended = 0.0;
  double lip_anchor = 0.0;
  bool lip_preserved = true;
  std::vector<std::size_t> monotonicity_violations;
  std::vector<std::size_t> sandwich_violations;

  bool ok() const {
    return minimality_violations.empty() && lip_preserved && monotonicity_violations.empty() &&
           sandwich_violations.empty();
  }
};

// Checks pointwise minimality against f_original, Lipschitz preservation, monotonicity under
// anchor growth (against the sub-anchor set `nested`, default: first half of the anchors),
// and the sandwich f(u*) <= f_A(x) <= f(v*).
inline PmseReport verify_pmse_properties(const FiniteMetricSpace& space, std::span<const std::size_t> anchors,
                                         std::span<const double> f_original,
                                         std::span<const double> f_extended,
                                         std::span<const std::size_t> nested = {}, double tol = 1e-9) {
  PmseReport rep;
  const std::size_t n = space.size();
  auto leq = [tol](double a, double b) { return a <= b + tol * std::max(1.0, std::abs(b)); };

  const auto s_ext = local_slopes(space, f_extended);
  const auto s_orig = local_slopes(space, f_original);
  for (std::size_t x = 0; x < n; ++x)
    if (!leq(s_ext[x], s_orig[x])) rep.minimality_violations.push_back(x);

  rep.lip_extended = *std::max_element(s_ext.begin(), s_ext.end());
  std::vector<double> av(anchors.size());
  for (std::size_t a = 0; a < anchors.size(); ++a) av[a] = f_extended[anchors[a]];
  for (std::size_t a = 0; a < anchors.size(); ++a)
    rep.lip_anchor = std::max(rep.lip_anchor, local_slope(space, f_extended, anchors[a], anchors));
  rep.lip_preserved = std::abs(rep.lip_extended - rep.lip_anchor) <= tol * std::max(1.0, rep.lip_anchor);

  std::vector<std::size_t> sub(nested.begin(), nested.end());
  if (sub.empty()) sub.assign(anchors.begin(), anchors.begin() + (anchors.size() + 1) / 2);
  std::vector<double> sv(sub.size());
  for (std::size_t a = 0; a < sub.size(); ++a) sv[a] = f_extended[sub[a]];
  const auto f_sub = pmse_extend(space, sub, sv);
  const auto s_sub = local_slopes(space, f_sub);
  for (std::size_t x = 0; x < n; ++x)
    if (!leq(s_sub[x], s_ext[x])) rep.monotonicity_violations.push_back(x);

  std::vector<double> d(anchors.size());
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 0; a < anchors.size(); ++a) d[a] = space.distance(x, anchors[a]);
    const auto det = pmse_eval_detail(av, d);
    if (det.u == kNone) continue;
    if (!(av[det.u] <= f_extended[x] && f_extended[x] <= av[det.v])) rep.sandwich_violations.push_back(x);
  }
  return rep;
}

}  // namespace avgslope
