#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "avgslope/error.hpp"
#include "avgslope/metric.hpp"
#include "avgslope/nets.hpp"
#include "avgslope/pmse.hpp"
#include "avgslope/slope.hpp"

namespace avgslope {

struct ExtensionGuarantees {
  double sample_distortion = 0.0;  // ||f - y||_{L1(mu_n)}
  double distortion_bound = 0.0;   // 3 eps max(1, strong mean of y)
  double weak_distortion_bound = 0.0;  // eps + 2 eps W (1 + ln(2/eps)), W = weak mean of y
  double lip_extension = 0.0;      // lip of the extender (= lip over its anchors)
  double lip_bound = 0.0;          // 2 W / eps
  double sample_strong_mean = 0.0;
  double sample_weak_mean = 0.0;
};

struct ExtensionResult {
  Extender extender;
  std::vector<std::size_t> removed_indices;
  std::vector<std::size_t> net_indices;
  double epsilon = 0.0;
  std::vector<double> sample_values;  // f on the sample points
  ExtensionGuarantees guarantees;
};

namespace detail {

inline double anchor_lip(const FiniteMetricSpace& space, std::span<const std::size_t> idx,
                         std::span<const double> values) {
  double lip = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      lip = std::max(lip, std::abs(values[a] - values[b]) / space.distance(idx[a], idx[b]));
  return lip;
}

}  // namespace detail

// Regression extension: drop the highest-slope points (mass <= eps), take an eps-net of the rest,
// and extend the labels from the net by PMSE.
inline ExtensionResult extend_regression(const LabeledSample& s, double epsilon) {
  const std::size_t n = s.size();
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0,1)");
  if (static_cast<double>(n) * epsilon < 1.0) fail(ErrorCode::EpsilonOutOfRange, "need n >= 1/epsilon");
  const auto& y = s.labels();
  const auto& mu = s.weights();
  const SlopeProfile prof = profile(s.sample(), y);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return prof.local[a] > prof.local[b]; });
  ExtensionResult res;
  res.epsilon = epsilon;
  std::vector<char> removed(n, 0);
  double mass = 0.0;
  for (std::size_t k : order) {
    if (mass + mu[k] > epsilon + 1e-12) break;
    mass += mu[k];
    removed[k] = 1;
    res.removed_indices.push_back(k);
  }
  std::sort(res.removed_indices.begin(), res.removed_indices.end());
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (!removed[i]) rest.push_back(i);

  res.net_indices = build_net_subset(s.space(), epsilon, rest).center_indices;
  std::vector<double> nv(res.net_indices.size());
  for (std::size_t a = 0; a < nv.size(); ++a) nv[a] = y[res.net_indices[a]];
  res.extender = Extender::from_indices(s.space(), res.net_indices, nv);
  res.sample_values = pmse_extend(s.space(), res.net_indices, nv);

  auto& g = res.guarantees;
  for (std::size_t i = 0; i < n; ++i) g.sample_distortion += mu[i] * std::abs(res.sample_values[i] - y[i]);
  g.sample_strong_mean = prof.strong_mean;
  g.sample_weak_mean = prof.weak_mean;
  g.distortion_bound = 3.0 * epsilon * std::max(1.0, prof.strong_mean);
  g.weak_distortion_bound = epsilon + 2.0 * epsilon * prof.weak_mean * (1.0 + std::log(2.0 / epsilon));
  g.lip_extension = detail::anchor_lip(s.space(), res.net_indices, nv);
  g.lip_bound = 2.0 * prof.weak_mean / epsilon;
  return res;
}

// Classification extension: PMSE anchored at every sample point, no distortion.
inline ExtensionResult extend_classification(const LabeledSample& s) {
  const std::size_t n = s.size();
  const auto& y = s.labels();
  for (double v : y)
    if (v != 0.0 && v != 1.0) fail(ErrorCode::InvalidLabels, "classification needs labels in {0,1}");
  const SlopeProfile prof = profile(s.sample(), y);
  if (prof.weak_mean > static_cast<double>(n)) fail(ErrorCode::WeakMeanTooLarge, "weak mean of labels exceeds n");
  ExtensionResult res;
  res.net_indices.resize(n);
  std::iota(res.net_indices.begin(), res.net_indices.end(), std::size_t{0});
  res.extender = Extender(s.space(), y);
  res.sample_values = y;
  auto& g = res.guarantees;
  g.sample_strong_mean = prof.strong_mean;
  g.sample_weak_mean = prof.weak_mean;
  g.lip_extension = prof.lip;
  g.lip_bound = prof.lip;
  return res;
}

// Classification prediction: round half up.
inline int round_label(double v) { return v >= 0.5 ? 1 : 0; }

enum class Adversary { lipschitz, sawtooth, random };

inline const char* adversary_name(Adversary a) {
  switch (a) {
    case Adversary::lipschitz: return "lipschitz";
    case Adversary::sawtooth: return "sawtooth";
    case Adversary::random: return "random";
  }
  return "random";
}

struct GameConfig {
  std::size_t ambient_size = 2000;  // uniform grid on [0,1] with uniform measure
  std::size_t n = 200;              // draws with replacement
  double epsilon = 0.1;
  Adversary adversary = Adversary::sawtooth;
  double sawtooth_period = 0.05;
  double class_period = 0.25;       // binary labels: square wave with this period
  std::uint64_t seed = 1;
  unsigned threads = 0;             // 0: hardware concurrency
};

struct TrialOutcome {
  double regression_ratio = 0.0;      // strong mean of f on the ambient / strong mean of y on the sample
  double classification_ratio = 0.0;
  double sample_strong_mean = 0.0;
  double ambient_strong_mean = 0.0;
  std::size_t distinct_points = 0;
  bool classification_skipped = false;  // labels violated the weak-mean precondition
};

struct GameStatistics {
  std::vector<TrialOutcome> trials;
  double fraction_within_5 = 0.0;
  double regression_median = 0.0, regression_q90 = 0.0, regression_max = 0.0;
  double classification_median = 0.0, classification_max = 0.0;
  double classification_constant = 0.0;  // max ratio / log^2(n)
};

namespace detail {

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double adversary_label(const GameConfig& c, double x, std::mt19937_64& rng) {
  switch (c.adversary) {
    case Adversary::lipschitz: return 0.5 + 0.4 * std::sin(3.0 * x);
    case Adversary::sawtooth: {
      const double ph = std::fmod(x / c.sawtooth_period, 1.0);
      return 1.0 - std::abs(2.0 * ph - 1.0);
    }
    case Adversary::random: return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  return 0.0;
}

inline TrialOutcome run_trial(const GameConfig& c, const FiniteMetricSpace& ambient, const WeightedSample& amb_mu,
                              std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint64_t>(c.seed), static_cast<std::uint64_t>(trial)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, c.ambient_size - 1);
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t k = 0; k < c.n; ++k) ++counts[pick(rng)];
  std::vector<std::size_t> idx;
  std::vector<double> w;
  for (const auto& [i, cnt] : counts) {
    idx.push_back(i);
    w.push_back(static_cast<double>(cnt) / static_cast<double>(c.n));
  }
  const FiniteMetricSpace sample_space = ambient.subspace(idx);
  std::vector<double> y(idx.size()), yb(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    y[a] = adversary_label(c, ambient.point(idx[a])[0], rng);
    yb[a] = std::fmod(ambient.point(idx[a])[0] / c.class_period, 1.0) >= 0.5 ? 1.0 : 0.0;
  }
  TrialOutcome out;
  out.distinct_points = idx.size();
  const WeightedSample sample(sample_space, w);

  const LabeledSample reg(sample, y, LabelKind::real01);
  const ExtensionResult er = extend_regression(reg, c.epsilon);
  std::vector<std::size_t> amb_net;
  for (std::size_t v : er.net_indices) amb_net.push_back(idx[v]);
  const auto f = pmse_extend(ambient, amb_net, er.extender.anchor_values());
  out.sample_strong_mean = profile(sample, y).strong_mean;
  out.ambient_strong_mean = profile(amb_mu, f).strong_mean;
  out.regression_ratio = out.sample_strong_mean > 0.0 ? out.ambient_strong_mean / out.sample_strong_mean : 0.0;

  const LabeledSample cls(sample, yb, LabelKind::binary);
  try {
    const ExtensionResult ec = extend_classification(cls);
    const auto fc = pmse_extend(ambient, idx, ec.extender.anchor_values());
    const double ys = profile(sample, yb).strong_mean;
    out.classification_ratio = ys > 0.0 ? profile(amb_mu, fc).strong_mean / ys : 0.0;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::WeakMeanTooLarge) throw;
    out.classification_skipped = true;
  }
  return out;
}

}  // namespace detail

// Monte-Carlo view of the extension game on a uniform grid ambient. Reports, never asserts.
inline GameStatistics validate_extension_game(const GameConfig& c, std::size_t trials) {
  if (c.ambient_size < 2 || c.n < 1) fail(ErrorCode::InvalidParameters, "ambient and sample must be nonempty");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) fail(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0,1)");
  std::vector<double> grid(c.ambient_size);
  for (std::size_t i = 0; i < c.ambient_size; ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(c.ambient_size - 1);
  const FiniteMetricSpace ambient = FiniteMetricSpace::from_flat_coordinates(grid, 1, MetricTag::euclidean);
  const WeightedSample amb_mu = WeightedSample::uniform(ambient);

  GameStatistics st;
  st.trials.resize(trials);
  unsigned workers = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(trials, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < trials; k += workers) st.trials[k] = detail::run_trial(c, ambient, amb_mu, k);
      });
  }
  std::vector<double> reg, cls;
  std::size_t within = 0;
  for (const auto& t : st.trials) {
    reg.push_back(t.regression_ratio);
    if (!t.classification_skipped) cls.push_back(t.classification_ratio);
    within += t.regression_ratio <= 5.0;
  }
  if (trials == 0) return st;
  st.fraction_within_5 = static_cast<double>(within) / static_cast<double>(trials);
  st.regression_median = detail::quantile(reg, 0.5);
  st.regression_q90 = detail::quantile(reg, 0.9);
  st.regression_max = *std::max_element(reg.begin(), reg.end());
  st.classification_median = detail::quantile(cls, 0.5);
  st.classification_max = cls.empty() ? 0.0 : *std::max_element(cls.begin(), cls.end());
  const double ln = std::log(static_cast<double>(c.n));
  st.classification_constant = st.classification_max / (ln * ln);
  return st;
}

}  // namespace avgslope
