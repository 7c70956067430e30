#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "avgslope/error.hpp"

namespace avgslope {

enum class MetricTag { euclidean, l1, linf };

inline const char* metric_name(MetricTag t) {
  switch (t) {
    case MetricTag::euclidean: return "euclidean";
    case MetricTag::l1: return "l1";
    case MetricTag::linf: return "linf";
  }
  return "euclidean";
}

inline double coordinate_distance(MetricTag tag, const double* a, const double* b,
                                  std::size_t dim) {
  double acc = 0.0;
  switch (tag) {
    case MetricTag::euclidean:
      for (std::size_t k = 0; k < dim; ++k) {
        const double t = a[k] - b[k];
        acc += t * t;
      }
      return std::sqrt(acc);
    case MetricTag::l1:
      for (std::size_t k = 0; k < dim; ++k) acc += std::abs(a[k] - b[k]);
      return acc;
    case MetricTag::linf:
      for (std::size_t k = 0; k < dim; ++k) acc = std::max(acc, std::abs(a[k] - b[k]));
      return acc;
  }
  return acc;
}

enum class TriangleCheck { automatic, always, never };

// Points with pairwise distances, backed either by coordinates and a metric tag
// or by an explicit matrix. Immutable; copies share storage.
class FiniteMetricSpace {
 public:
  static constexpr std::size_t kEagerTriangleLimit = 512;

  FiniteMetricSpace() : s_(std::make_shared<Storage>()) {}

  static FiniteMetricSpace from_coordinates(const std::vector<std::vector<double>>& pts,
                                            MetricTag tag) {
    const std::size_t dim = pts.empty() ? 0 : pts.front().size();
    std::vector<double> flat;
    flat.reserve(pts.size() * dim);
    for (const auto& p : pts) {
      if (p.size() != dim) fail(ErrorCode::InvalidParameters, "ragged coordinate rows");
      flat.insert(flat.end(), p.begin(), p.end());
    }
    return from_flat_coordinates(std::move(flat), dim, tag);
  }

  static FiniteMetricSpace from_flat_coordinates(std::vector<double> flat, std::size_t dim,
                                                 MetricTag tag) {
    auto s = std::make_shared<Storage>();
    if (dim == 0 && !flat.empty()) fail(ErrorCode::InvalidParameters, "zero dimension");
    s->n = dim == 0 ? 0 : flat.size() / dim;
    if (dim != 0 && flat.size() % dim != 0)
      fail(ErrorCode::InvalidParameters, "coordinate buffer not divisible by dimension");
    s->dim = dim;
    s->tag = tag;
    s->coords = std::move(flat);
    for (double v : s->coords)
      if (!std::isfinite(v)) fail(ErrorCode::InvalidParameters, "non-finite coordinate");
    FiniteMetricSpace out(std::move(s));
    return out;
  }

  static FiniteMetricSpace from_matrix(const std::vector<std::vector<double>>& d,
                                       TriangleCheck check = TriangleCheck::automatic) {
    auto s = std::make_shared<Storage>();
    const std::size_t n = d.size();
    s->n = n;
    s->explicit_matrix = true;
    s->matrix.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i].size() != n) fail(ErrorCode::NonSquareMatrix, "row " + std::to_string(i));
      for (std::size_t j = 0; j < n; ++j) s->matrix[i * n + j] = d[i][j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double v = s->matrix[i * n + j];
        if (!std::isfinite(v)) fail(ErrorCode::InvalidParameters, "non-finite distance");
        if (v < 0.0) fail(ErrorCode::NegativeDistance, pair_str(i, j));
        if (i == j && v != 0.0) fail(ErrorCode::InvalidParameters, "nonzero diagonal at " + std::to_string(i));
        if (v != s->matrix[j * n + i]) fail(ErrorCode::AsymmetricMatrix, pair_str(i, j));
      }
    }
    FiniteMetricSpace out(std::move(s));
    const bool run = check == TriangleCheck::always ||
                     (check == TriangleCheck::automatic && n <= kEagerTriangleLimit);
    if (run) out.check_triangle();
    return out;
  }

  std::size_t size() const noexcept { return s_->n; }
  std::size_t dimension() const noexcept { return s_->dim; }
  bool is_explicit() const noexcept { return s_->explicit_matrix; }
  MetricTag tag() const noexcept { return s_->tag; }

  std::span<const double> point(std::size_t i) const {
    return {s_->coords.data() + i * s_->dim, s_->dim};
  }

  double distance(std::size_t i, std::size_t j) const {
    if (s_->explicit_matrix) return s_->matrix[i * s_->n + j];
    if (i == j) return 0.0;
    // Fixed argument order keeps dist(i,j) and dist(j,i) bit-identical.
    if (i > j) std::swap(i, j);
    return coordinate_distance(s_->tag, s_->coords.data() + i * s_->dim,
                               s_->coords.data() + j * s_->dim, s_->dim);
  }

  // Distance from an external coordinate query to point i (coordinate spaces only).
  double distance_to(std::span<const double> q, std::size_t i) const {
    if (s_->explicit_matrix) fail(ErrorCode::SchemaMismatch, "matrix-backed space has no coordinates");
    if (q.size() != s_->dim) fail(ErrorCode::SchemaMismatch, "query dimension mismatch");
    return coordinate_distance(s_->tag, s_->coords.data() + i * s_->dim, q.data(), s_->dim);
  }

  double diameter() const noexcept { return s_->diam; }
  // Minimal positive interpoint distance; 0 when n < 2.
  double min_distance() const noexcept { return s_->min_dist; }

  FiniteMetricSpace subspace(std::span<const std::size_t> idx) const {
    auto s = std::make_shared<Storage>();
    s->n = idx.size();
    s->dim = s_->dim;
    s->tag = s_->tag;
    s->explicit_matrix = s_->explicit_matrix;
    if (s_->explicit_matrix) {
      s->matrix.resize(s->n * s->n);
      for (std::size_t a = 0; a < s->n; ++a)
        for (std::size_t b = 0; b < s->n; ++b)
          s->matrix[a * s->n + b] = s_->matrix[idx[a] * s_->n + idx[b]];
    } else {
      s->coords.reserve(s->n * s->dim);
      for (std::size_t a : idx) {
        auto p = point(a);
        s->coords.insert(s->coords.end(), p.begin(), p.end());
      }
    }
    FiniteMetricSpace out(std::move(s));
    return out;
  }

  // Same space with every distance multiplied by factor > 0.
  FiniteMetricSpace scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) fail(ErrorCode::InvalidParameters, "scale factor must be positive");
    auto s = std::make_shared<Storage>(*s_);
    for (double& v : s->coords) v *= factor;
    for (double& v : s->matrix) v *= factor;
    FiniteMetricSpace out(std::move(s));
    return out;
  }

  // Full O(n^3) triangle inequality check with a small relative tolerance.
  void check_triangle() const {
    const std::size_t n = s_->n;
    const double tol = 1e-12 * std::max(1.0, s_->diam);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const double dij = distance(i, j);
        for (std::size_t k = 0; k < n; ++k)
          if (distance(i, k) > dij + distance(j, k) + tol)
            fail(ErrorCode::TriangleViolation,
                 "d(" + std::to_string(i) + "," + std::to_string(k) + ") via " + std::to_string(j));
      }
  }

 private:
  struct Storage {
    std::size_t n = 0;
    std::size_t dim = 0;
    MetricTag tag = MetricTag::euclidean;
    bool explicit_matrix = false;
    std::vector<double> coords;
    std::vector<double> matrix;
    double diam = 0.0;
    double min_dist = 0.0;
  };

  explicit FiniteMetricSpace(std::shared_ptr<Storage> s) {
    scan_pairs(*s);
    s_ = std::move(s);
  }

  static std::string pair_str(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
  }

  static void scan_pairs(Storage& st) {
    Storage* s = &st;
    double diam = 0.0, mind = 0.0;
    bool have = false;
    for (std::size_t i = 0; i < s->n; ++i)
      for (std::size_t j = i + 1; j < s->n; ++j) {
        const double d = s->explicit_matrix
                             ? s->matrix[i * s->n + j]
                             : coordinate_distance(s->tag, s->coords.data() + i * s->dim,
                                                   s->coords.data() + j * s->dim, s->dim);
        if (!(d > 0.0)) fail(ErrorCode::DuplicatePoints, pair_str(i, j));
        diam = std::max(diam, d);
        if (!have || d < mind) mind = d;
        have = true;
      }
    s->diam = diam;
    s->min_dist = mind;
  }

  std::shared_ptr<const Storage> s_;
};

inline double diameter(const FiniteMetricSpace& s) { return s.diameter(); }

inline double min_interpoint_distance(const FiniteMetricSpace& s) {
  if (s.size() < 2) fail(ErrorCode::TooFewPoints, "need at least 2 points");
  return s.min_distance();
}

inline double aspect_ratio(const FiniteMetricSpace& s) {
  if (s.size() < 2) fail(ErrorCode::TooFewPoints, "need at least 2 points");
  return s.diameter() / s.min_distance();
}

class WeightedSample {
 public:
  WeightedSample() = default;
  WeightedSample(FiniteMetricSpace space, std::vector<double> weights)
      : space_(std::move(space)), weights_(std::move(weights)) {
    if (weights_.size() != space_.size()) fail(ErrorCode::InvalidWeights, "weight count != point count");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::InvalidWeights, "negative or non-finite weight");
      sum += w;
    }
    if (!weights_.empty() && std::abs(sum - 1.0) > 1e-12)
      fail(ErrorCode::InvalidWeights, "weights must sum to 1");
  }

  static WeightedSample uniform(FiniteMetricSpace space) {
    const std::size_t n = space.size();
    return WeightedSample(std::move(space), std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0));
  }

  const FiniteMetricSpace& space() const noexcept { return space_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return space_.size(); }

 private:
  FiniteMetricSpace space_;
  std::vector<double> weights_;
};

enum class LabelKind { real01, binary };

class LabeledSample {
 public:
  LabeledSample() = default;
  LabeledSample(WeightedSample sample, std::vector<double> labels, LabelKind kind)
      : sample_(std::move(sample)), labels_(std::move(labels)), kind_(kind) {
    if (labels_.size() != sample_.size()) fail(ErrorCode::InvalidLabels, "label count != point count");
    for (double y : labels_) {
      if (kind_ == LabelKind::binary && y != 0.0 && y != 1.0)
        fail(ErrorCode::InvalidLabels, "binary labels must be 0 or 1");
      if (!(y >= 0.0 && y <= 1.0)) fail(ErrorCode::InvalidLabels, "labels must lie in [0,1]");
    }
  }

  const WeightedSample& sample() const noexcept { return sample_; }
  const FiniteMetricSpace& space() const noexcept { return sample_.space(); }
  const std::vector<double>& weights() const noexcept { return sample_.weights(); }
  const std::vector<double>& labels() const noexcept { return labels_; }
  LabelKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return sample_.size(); }

 private:
  WeightedSample sample_;
  std::vector<double> labels_;
  LabelKind kind_ = LabelKind::real01;
};

}  // namespace avgslope
