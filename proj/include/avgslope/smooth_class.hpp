#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "avgslope/error.hpp"
#include "avgslope/metric.hpp"
#include "avgslope/nets.hpp"
#include "avgslope/pmse.hpp"
#include "avgslope/slope.hpp"

namespace avgslope {

struct KnapsackItem {
  double weight = 0.0;
  double size = 0.0;
};

// Minimum-weight cover: subset with total size >= demand, weight <= 2 * optimum. Items are scanned
// by increasing weight/size; an item that would complete the demand only yields a candidate
// (current prefix plus it) and is not added, otherwise it joins the prefix.
inline std::vector<std::size_t> min_knapsack_cover_2approx(std::span<const KnapsackItem> items, double demand) {
  if (!std::isfinite(demand)) fail(ErrorCode::InvalidParameters, "demand must be finite");
  for (const auto& it : items)
    if (!(it.weight >= 0.0) || !(it.size >= 0.0) || !std::isfinite(it.weight) || !std::isfinite(it.size))
      fail(ErrorCode::InvalidParameters, "item weights and sizes must be finite and nonnegative");
  if (demand <= 0.0) return {};
  double total = 0.0;
  for (const auto& it : items) total += it.size;
  if (total < demand) fail(ErrorCode::InfeasibleDemand, "total size below demand");

  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < items.size(); ++j)
    if (items[j].size > 0.0) order.push_back(j);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].weight * items[b].size < items[b].weight * items[a].size;
  });
  std::vector<std::size_t> prefix, best;
  double prefix_w = 0.0, best_w = std::numeric_limits<double>::infinity(), left = demand;
  for (std::size_t j : order) {
    if (items[j].size >= left) {
      if (prefix_w + items[j].weight < best_w) {
        best_w = prefix_w + items[j].weight;
        best = prefix;
        best.push_back(j);
      }
      continue;
    }
    prefix.push_back(j);
    prefix_w += items[j].weight;
    left -= items[j].size;
  }
  std::sort(best.begin(), best.end());
  return best;
}

// Audit thresholds: t = n/k, the interval ends, and every jump point s_i / (bL) inside [1, n+1].
inline std::vector<double> slope_audit_grid(std::span<const double> slopes, double L, double b) {
  const double n = static_cast<double>(slopes.size());
  std::vector<double> ts{1.0, n + 1.0};
  for (std::size_t k = 1; k <= slopes.size(); ++k) ts.push_back(n / static_cast<double>(k));
  for (double s : slopes) {
    const double t = s / (b * L);
    if (t >= 1.0 && t <= n + 1.0) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

// max over t in [1, n+1] of t * #{i : slope_i >= b t L} / n; compliant iff <= 1.
inline double slope_audit_of(std::span<const double> slopes, double L, double b) {
  if (!(L > 0.0)) fail(ErrorCode::InvalidParameters, "L must be positive");
  if (!(b >= 1.0)) fail(ErrorCode::InvalidParameters, "audit factor b must be >= 1");
  if (slopes.empty()) return 0.0;
  std::vector<double> sorted(slopes.begin(), slopes.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (double t : slope_audit_grid(slopes, L, b)) {
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), b * t * L);
    const double count = static_cast<double>(sorted.end() - first);
    worst = std::max(worst, t * count / n);
  }
  // At a jump point t = s/(bL) the product b t L may round above s; count against s itself.
  for (auto it = sorted.begin(); it != sorted.end(); ++it) {
    const double t = *it / (b * L);
    if (!(t >= 1.0 && t <= n + 1.0)) continue;
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), *it);
    worst = std::max(worst, t * static_cast<double>(sorted.end() - first) / n);
  }
  return worst;
}

inline double slope_audit(const FiniteMetricSpace& space, std::span<const double> labels, double L, double b) {
  return slope_audit_of(local_slopes(space, labels), L, b);
}

// One entry of the label-split net: a net point together with the sample points of one label
// that it represents. A mixed cell yields two co-located entries with opposite labels.
struct NetEntry {
  std::size_t point = 0;
  int label = 0;
  std::vector<std::size_t> members;
};

struct ClsrpLevel {
  double t = 1.0;
  double radius = 0.0;
  std::vector<std::size_t> net;        // T_i as point indices
  std::vector<NetEntry> entries;       // T_i after the mixed-cell split
  std::vector<std::size_t> active;     // T'_i, indices into entries
  std::vector<double> weights;         // w(p) per active entry
  double demand = 0.0;                 // m' (clamped at 0)
  std::vector<std::size_t> cover;      // C_i, indices into entries
  std::vector<std::size_t> relabel;    // P_i
};

struct RelabelPlan {
  std::vector<std::size_t> relabeled_indices;
  std::vector<double> new_labels;      // aligned with relabeled_indices
  std::vector<double> labels;          // full label vector after relabeling
  std::vector<double> levels_used;
  std::vector<ClsrpLevel> per_level;
};

namespace detail {

inline std::vector<int> binary_labels(const LabeledSample& s) {
  std::vector<int> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = s.labels()[i];
    if (v != 0.0 && v != 1.0) fail(ErrorCode::InvalidLabels, "classification needs labels in {0,1}");
    out[i] = v == 1.0 ? 1 : 0;
  }
  return out;
}

inline ClsrpLevel clsrp_level(const FiniteMetricSpace& space, const std::vector<int>& lab, double t, double L) {
  const std::size_t n = space.size();
  ClsrpLevel lv;
  lv.t = t;
  lv.radius = 1.0 / (2.0 * t * L);
  const NetResult net = build_net(space, lv.radius);
  lv.net = net.center_indices;
  std::vector<std::size_t> slot(n, kNone);
  for (std::size_t c : lv.net) {
    slot[c] = lv.entries.size();
    lv.entries.push_back({c, lab[c], {}});
  }
  std::vector<std::size_t> twin(n, kNone);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t c = net.assignment[x];
    if (lab[x] == lab[c]) {
      lv.entries[slot[c]].members.push_back(x);
      continue;
    }
    if (twin[c] == kNone) {
      twin[c] = lv.entries.size();
      lv.entries.push_back({c, 1 - lab[c], {}});
    }
    lv.entries[twin[c]].members.push_back(x);
  }

  const double reach = 2.0 / (t * L);
  auto dist = [&](const NetEntry& a, const NetEntry& b) {
    return a.point == b.point ? 0.0 : space.distance(a.point, b.point);
  };
  const std::size_t ne = lv.entries.size();
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t q = 0; q < ne; ++q)
      if (lv.entries[q].label != lv.entries[e].label && dist(lv.entries[e], lv.entries[q]) <= reach) {
        lv.active.push_back(e);
        break;
      }

  std::vector<KnapsackItem> items;
  double m = 0.0;
  for (std::size_t e : lv.active) {
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t q : lv.active)
      if (dist(lv.entries[e], lv.entries[q]) <= reach)
        (lv.entries[q].label == 0 ? s0 : s1) += static_cast<double>(lv.entries[q].members.size());
    const double size = static_cast<double>(lv.entries[e].members.size());
    lv.weights.push_back(std::min(s0, s1));
    items.push_back({lv.weights.back(), size});
    m += size;
  }
  lv.demand = std::max(0.0, m - 6.0 * static_cast<double>(n) / (t * L));
  for (std::size_t k : min_knapsack_cover_2approx(items, lv.demand)) lv.cover.push_back(lv.active[k]);
  for (std::size_t e : lv.cover)
    lv.relabel.insert(lv.relabel.end(), lv.entries[e].members.begin(), lv.entries[e].members.end());
  std::sort(lv.relabel.begin(), lv.relabel.end());
  return lv;
}

}  // namespace detail

// Bi-criteria relabeling for the continuous local slope removal problem. Counts are unweighted
// (the problem is stated over the n sample points).
inline RelabelPlan clsrp_bicriteria(const LabeledSample& s, double L) {
  if (!(L > 0.0) || !std::isfinite(L)) fail(ErrorCode::InvalidParameters, "L must be positive and finite");
  const auto lab = detail::binary_labels(s);
  const std::size_t n = s.size();
  RelabelPlan plan;
  plan.labels = s.labels();
  if (n < 2) return plan;
  const auto top = static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
  std::vector<char> drop(n, 0);
  for (int i = 0; i <= top; ++i) {
    const double t = std::ldexp(1.0, i);
    plan.levels_used.push_back(t);
    plan.per_level.push_back(detail::clsrp_level(s.space(), lab, t, L));
    for (std::size_t x : plan.per_level.back().relabel) drop[x] = 1;
  }
  std::vector<std::size_t> kept;
  for (std::size_t x = 0; x < n; ++x) (drop[x] ? plan.relabeled_indices : kept).push_back(x);
  if (plan.relabeled_indices.empty()) return plan;
  if (kept.empty()) {
    std::fill(plan.labels.begin(), plan.labels.end(), 0.5);
  } else {
    std::vector<double> kv(kept.size());
    for (std::size_t a = 0; a < kept.size(); ++a) kv[a] = plan.labels[kept[a]];
    plan.labels = pmse_extend(s.space(), kept, kv);
  }
  for (std::size_t x : plan.relabeled_indices) plan.new_labels.push_back(plan.labels[x]);
  return plan;
}

}  // namespace avgslope
