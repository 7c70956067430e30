#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "avgslope/error.hpp"

namespace avgslope {

// Tabular data as read from / written to CSV: coordinates (or distance-matrix rows), optional
// weights and labels.
struct Dataset {
  std::vector<std::vector<double>> rows;
  bool is_matrix = false;
  std::vector<double> weights;  // empty: uniform
  std::vector<double> labels;   // empty: unlabeled
  std::size_t size() const noexcept { return rows.size(); }
  bool operator==(const Dataset&) const = default;
};

namespace datasets {

inline std::vector<double> grid(std::size_t n, double lo, double hi) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

inline Dataset from_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  Dataset d;
  for (double x : xs) d.rows.push_back({x});
  d.labels = ys;
  return d;
}

// 1{x > 1/2} on [0, 1/2 - gamma] u [1/2 + gamma, 1], n/2 grid points per piece.
inline Dataset gapped_step(std::size_t n, double gamma) {
  if (!(gamma > 0.0 && gamma < 0.5) || n < 4) fail(ErrorCode::InvalidParameters, "need gamma in (0,1/2), n >= 4");
  const std::size_t left = n / 2;
  auto xs = grid(left, 0.0, 0.5 - gamma);
  const auto right = grid(n - left, 0.5 + gamma, 1.0);
  std::vector<double> ys(left, 0.0);
  for (double x : right) {
    xs.push_back(x);
    ys.push_back(1.0);
  }
  return from_line(xs, ys);
}

// Margin loss: 1 - x/gamma on [0, gamma], 0 beyond, on a uniform grid of [0,1].
inline Dataset margin_loss(std::size_t n, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0) || n < 2) fail(ErrorCode::InvalidParameters, "need gamma in (0,1), n >= 2");
  const auto xs = grid(n, 0.0, 1.0);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = std::clamp(1.0 - xs[i] / gamma, 0.0, 1.0);
  return from_line(xs, ys);
}

// x^p on a uniform grid of [0,1].
inline Dataset power(std::size_t n, double p) {
  if (!(p > 0.0 && p < 1.0) || n < 2) fail(ErrorCode::InvalidParameters, "need p in (0,1), n >= 2");
  const auto xs = grid(n, 0.0, 1.0);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = std::pow(xs[i], p);
  return from_line(xs, ys);
}

// 1{x > 1/2} plus uniform noise of the given amplitude, clamped to [0,1], on a uniform grid.
inline Dataset noisy_step(std::size_t n, double noise, std::uint64_t seed) {
  if (n < 2 || !(noise >= 0.0)) fail(ErrorCode::InvalidParameters, "need n >= 2, noise >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto xs = grid(n, 0.0, 1.0);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = std::clamp((xs[i] > 0.5 ? 1.0 : 0.0) + noise * U(rng), 0.0, 1.0);
  return from_line(xs, ys);
}

// Two label-homogeneous planar clusters: label 0 in [0,0.15]^2, label 1 in [0.55,0.7]^2.
inline Dataset two_clusters(std::size_t n, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::InvalidParameters, "need n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 0.15);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    const double off = i % 2 ? 0.55 : 0.0;
    d.rows.push_back({off + U(rng), off + U(rng)});
    d.labels.push_back(i % 2 ? 1.0 : 0.0);
  }
  return d;
}

}  // namespace datasets
}  // namespace avgslope
