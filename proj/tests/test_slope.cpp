#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "avgslope/datasets.hpp"
#include "avgslope/slope.hpp"
#include "test_util.hpp"

using namespace avgslope;

namespace {

std::vector<double> step_at_zero(const std::vector<double>& xs) {
  std::vector<double> f;
  for (double x : xs) f.push_back(x > 0.0 ? 1.0 : 0.0);
  return f;
}

FiniteMetricSpace space_of(const Dataset& d) { return FiniteMetricSpace::from_coordinates(d.rows, MetricTag::euclidean); }

}  // namespace

TEST(Slope, ConstantIsZero) {
  std::mt19937_64 rng(1);
  const auto s = testutil::random_space(7, 2, rng);
  const std::vector<double> f(7, 0.3);
  const auto p = profile(WeightedSample::uniform(s), f);
  for (double v : p.local) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(p.strong_mean, 0.0);
  EXPECT_EQ(p.weak_mean, 0.0);
  EXPECT_EQ(p.lip, 0.0);
}

TEST(Slope, TwoPoints) {
  const auto s = testutil::line({0.0, 1.0});
  const std::vector<double> f{0.0, 1.0};
  const std::size_t all[] = {0, 1};
  EXPECT_EQ(local_slope(s, f, 0, all), 1.0);
  EXPECT_EQ(local_slope(s, f, 1, all), 1.0);
}

TEST(Slope, EmptyWitnessSetIsZero) {
  const auto s = testutil::line({0.0, 1.0});
  const std::vector<double> f{0.0, 1.0};
  const std::size_t self[] = {0};
  EXPECT_EQ(local_slope(s, f, 0, self), 0.0);
  const auto p = profile(WeightedSample::uniform(testutil::line({0.5})), std::vector<double>{0.2});
  EXPECT_EQ(p.local, std::vector<double>{0.0});
}

TEST(Slope, MatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rep % 15;
    const auto s = testutil::random_space(n, 1 + rep % 3, rng);
    const auto f = testutil::random_values(n, rng);
    const auto w = testutil::random_weights(n, rng);
    const auto p = profile(WeightedSample(s, w), f);
    const auto o = oracle::slopes(testutil::matrix_of(s), f);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(p.local[i], o[i], 1e-12 * std::max(1.0, o[i]));
    EXPECT_NEAR(p.strong_mean, oracle::strong_mean(o, w), 1e-9 * std::max(1.0, p.strong_mean));
    EXPECT_NEAR(p.weak_mean, oracle::weak_mean(o, w), 1e-9 * std::max(1.0, p.weak_mean));
  }
}

TEST(Slope, SubsetSlopeMatchesBruteForce) {
  std::mt19937_64 rng(3);
  const auto s = testutil::random_space(5, 2, rng);
  const auto f = testutil::random_values(5, rng);
  const std::size_t all[] = {0, 1, 2, 3, 4};
  const auto m = testutil::matrix_of(s);
  for (std::size_t i = 0; i < 5; ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < 5; ++j)
      if (j != i) best = std::max(best, std::abs(f[i] - f[j]) / m[i][j]);
    EXPECT_DOUBLE_EQ(local_slope(s, f, i, all), best);
  }
}

TEST(Slope, StepOnTenPointGrid) {
  const auto xs = testutil::uniform_grid(10);
  const auto p = profile(WeightedSample::uniform(testutil::line(xs)), step_at_zero(xs));
  const std::vector<double> expected{9, 9, 4.5, 3, 2.25, 1.8, 1.5, 9.0 / 7, 1.125, 1};
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(p.local[i], expected[i], 1e-12);
  EXPECT_NEAR(p.strong_mean, 3.4460714285714286, 1e-12);
  EXPECT_NEAR(p.weak_mean, 1.8, 1e-12);
  EXPECT_EQ(p.lip, 9.0);
}

TEST(Slope, StepWeakMeanTendsToOneWhenOriginMassVanishes) {
  double prev = 1e9;
  for (std::size_t n : {50, 200, 800}) {
    const auto xs = testutil::uniform_grid(n);
    std::vector<double> w(n);
    const double w0 = 1.0 / static_cast<double>(n * n);
    w[0] = w0;
    for (std::size_t i = 1; i < n; ++i) w[i] = (1.0 - w0) / static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) acc += w[i];
    w[n - 1] = 1.0 - acc;
    const auto p = profile(WeightedSample(testutil::line(xs), w), step_at_zero(xs));
    const double gap = std::abs(p.weak_mean - 1.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 0.01);
}

TEST(Slope, LevelCurveConsistent) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 3 + rep;
    const auto s = testutil::random_space(n, 2, rng);
    const auto f = testutil::random_values(n, rng);
    const auto w = testutil::random_weights(n, rng);
    const auto p = profile(WeightedSample(s, w), f);
    for (std::size_t k = 1; k < p.level_curve.size(); ++k) {
      EXPECT_LT(p.level_curve[k - 1].t, p.level_curve[k].t);
      EXPECT_GE(p.level_curve[k - 1].mass, p.level_curve[k].mass);
    }
    for (const auto& lp : p.level_curve) {
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (p.local[i] >= lp.t) mass += w[i];
      EXPECT_NEAR(lp.mass, mass, 1e-12);
    }
    double lip = 0.0;
    for (double v : p.local) lip = std::max(lip, v);
    EXPECT_EQ(p.lip, lip);
  }
}

TEST(Slope, ChainAndLogCorollary) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + rep % 20;
    const auto s = testutil::random_space(n, 1 + rep % 3, rng);
    const auto f = rep % 2 ? testutil::random_values(n, rng) : testutil::random_bits(n, rng);
    const auto p = profile(WeightedSample::uniform(s), f);
    EXPECT_LE(p.weak_mean, p.strong_mean * (1 + 1e-12));
    EXPECT_LE(p.strong_mean, p.lip * (1 + 1e-12));
    EXPECT_LE(p.strong_mean, 2.0 * std::log(static_cast<double>(n)) * p.weak_mean * (1 + 1e-12));
  }
}

TEST(Slope, WeakMeanEqualsDenseScan) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 4 + rep;
    const auto s = testutil::random_space(n, 2, rng);
    const auto f = testutil::random_values(n, rng);
    const auto w = testutil::random_weights(n, rng);
    const auto p = profile(WeightedSample(s, w), f);
    double best = 0.0;
    for (int k = 1; k <= 20000; ++k) {
      const double t = p.lip * k / 20000.0;
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (p.local[i] >= t) mass += w[i];
      best = std::max(best, t * mass);
    }
    // The dense grid approaches the sup from below.
    EXPECT_GE(p.weak_mean + 1e-9, best);
    EXPECT_LE(p.weak_mean, best + p.lip / 20000.0 + 1e-9);
  }
}

TEST(Slope, RestrictionNeverIncreasesSlope) {
  std::mt19937_64 rng(7);
  const auto s = testutil::random_space(12, 2, rng);
  const auto f = testutil::random_values(12, rng);
  const auto full = local_slopes(s, f);
  const std::vector<std::size_t> sub{0, 2, 3, 7, 9};
  for (std::size_t i : sub) EXPECT_LE(local_slope(s, f, i, sub), full[i]);
}

TEST(Slope, ClassMembership) {
  std::mt19937_64 rng(8);
  const auto s = testutil::random_space(5, 2, rng);
  const auto p0 = profile(WeightedSample::uniform(s), std::vector<double>(5, 0.1));
  EXPECT_EQ(class_membership(p0, 0.01), SmoothnessClass::lip);

  const auto gs = datasets::gapped_step(1000, 0.1);
  const auto pg = profile(WeightedSample::uniform(space_of(gs)), gs.labels);
  EXPECT_NEAR(pg.lip, 5.0, 1e-9);
  EXPECT_NEAR(pg.strong_mean, 2.7465, 0.01);
  EXPECT_EQ(class_membership(pg, 3.0), SmoothnessClass::strong);

  const auto xs = testutil::uniform_grid(1000);
  const auto ps = profile(WeightedSample::uniform(testutil::line(xs)), step_at_zero(xs));
  EXPECT_EQ(class_membership(ps, 2.0), SmoothnessClass::weak);
  EXPECT_EQ(class_membership(ps, 1.5), SmoothnessClass::none);
  EXPECT_THROW(class_membership(ps, 0.0), Error);
}

TEST(Slope, LevelSet) {
  std::mt19937_64 rng(9);
  const auto s = testutil::random_space(15, 2, rng);
  const auto f = testutil::random_values(15, rng);
  const auto p = profile(WeightedSample::uniform(s), f);
  EXPECT_TRUE(level_set(p, p.lip * 1.01).empty());
  std::size_t positive = 0;
  for (double v : p.local) positive += v > 0.0;
  EXPECT_EQ(level_set(p, 1e-300).size(), positive);
  const double t = p.strong_mean;
  const auto o = oracle::slopes(testutil::matrix_of(s), f);
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < 15; ++i)
    if (o[i] >= t) expected.push_back(i);
  EXPECT_EQ(level_set(p, t), expected);
  EXPECT_THROW(level_set(p, 0.0), Error);
}

TEST(Slope, MarkovCheck) {
  const auto xs = testutil::uniform_grid(10);
  const auto p = profile(WeightedSample::uniform(testutil::line(xs)), step_at_zero(xs));
  EXPECT_TRUE(check_markov(p, p.weak_mean));
  EXPECT_FALSE(check_markov(p, 1.0));
  const auto c = profile(WeightedSample::uniform(testutil::line(xs)), std::vector<double>(10, 0.0));
  for (double L : {1e-6, 1.0, 100.0}) EXPECT_TRUE(check_markov(c, L));
}
