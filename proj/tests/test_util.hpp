#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "avgslope/metric.hpp"
#include "oracle/oracle.hpp"

namespace testutil {

using avgslope::FiniteMetricSpace;
using avgslope::MetricTag;

inline std::vector<std::vector<double>> random_points(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(d));
  for (auto& p : pts)
    for (auto& v : p) v = U(rng);
  return pts;
}

inline FiniteMetricSpace random_space(std::size_t n, std::size_t d, std::mt19937_64& rng,
                                      MetricTag tag = MetricTag::euclidean) {
  return FiniteMetricSpace::from_coordinates(random_points(n, d, rng), tag);
}

inline std::vector<double> random_values(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

inline std::vector<double> random_bits(std::size_t n, std::mt19937_64& rng) {
  std::bernoulli_distribution B(0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = B(rng) ? 1.0 : 0.0;
  return v;
}

inline std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.05, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) s += x = U(rng);
  for (auto& x : w) x /= s;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) acc += w[i];
  w.back() = 1.0 - acc;
  return w;
}

inline oracle::Matrix matrix_of(const FiniteMetricSpace& s) {
  oracle::Matrix m(s.size(), std::vector<double>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) m[i][j] = i == j ? 0.0 : s.distance(i, j);
  return m;
}

inline FiniteMetricSpace line(const std::vector<double>& xs) {
  std::vector<std::vector<double>> pts;
  for (double x : xs) pts.push_back({x});
  return FiniteMetricSpace::from_coordinates(pts, MetricTag::euclidean);
}

inline std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

}  // namespace testutil
