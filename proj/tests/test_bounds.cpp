#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "avgslope/bounds.hpp"
#include "test_util.hpp"

using namespace avgslope;

TEST(Bounds, LipCover) {
  EXPECT_NEAR(lip_cover_bound(0.5, 1.0, 1.0).value, 32.0 * std::log(16.0), 1e-12);
  EXPECT_NEAR(lip_cover_bound(0.5, 1.0, 1.0).value, 88.72, 0.01);
  const auto c = lip_cover_bound(8.0, 1.0, 1.0);
  EXPECT_EQ(c.value, 0.0);
  EXPECT_TRUE(c.clamped);
  EXPECT_FALSE(lip_cover_bound(0.5, 1.0, 1.0).clamped);
  for (double t = 4.0; t > 1e-3; t /= 2.0)
    EXPECT_GE(lip_cover_bound(t / 2.0, 1.5, 2.0).value, lip_cover_bound(t, 1.5, 2.0).value);
  EXPECT_NEAR(lip_cover_bound(0.5, 1.0, 1.0, 2.0).value, 64.0 * std::log(16.0), 1e-12);
  EXPECT_THROW(lip_cover_bound(0.0, 1.0, 1.0), Error);
  EXPECT_THROW(lip_cover_bound(0.5, -1.0, 1.0), Error);
  EXPECT_NEAR(lip_cover_bound_from_covering(0.5, 32.0).value, 88.72, 0.01);
}

TEST(Bounds, AmbientCover) {
  EXPECT_NEAR(ambient_cover_bound(0.5, 1.0, 1.0).value, 1024.0 * std::log(32.0), 1e-9);
  EXPECT_NEAR(ambient_cover_bound(0.5, 1.0, 1.0).value, 3548.9, 0.1);
  EXPECT_EQ(ambient_cover_bound(16.0, 1.0, 1.0).value, 0.0);
  EXPECT_TRUE(ambient_cover_bound(16.0, 1.0, 1.0).clamped);
  for (double t : {0.1, 1.0, 10.0, 20.0}) EXPECT_GE(ambient_cover_bound(t, 3.0, 2.0).value, 0.0);
}

TEST(Bounds, EmpiricalCover) {
  EXPECT_NEAR(empirical_cover_bound(1.0, 0.5, 1.0, 1.0).value, 8.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(empirical_cover_bound(1.0, 0.5, 1.0, 1.0).value, 5.545, 1e-3);
  const auto z = empirical_cover_bound(2.0, 0.5, 1.0, 1.0);
  EXPECT_EQ(z.value, 0.0);
  EXPECT_TRUE(z.clamped);
  const double e0 = empirical_eps0(1e8, 1.0, 1.0);
  EXPECT_NEAR(e0, 0.1, 1e-12);
  const auto b = empirical_cover_bound(1.0, e0, 1.0, 1.0);
  EXPECT_TRUE(std::isfinite(b.value));
  EXPECT_NEAR(b.value, 1000.0 * std::log(10.0), 1e-6);
  EXPECT_THROW(empirical_cover_bound(1.0, 0.5, 1.0, 0.5), Error);
  EXPECT_NEAR(empirical_cover_bound(1.0, 0.5, 1.0, 1.0, 2.0).value, 16.0 * std::log(2.0), 1e-12);
}

TEST(Bounds, DistanceAdditiveTerm) {
  const auto a = distance_additive_terms(256.0, 1.0, 1.0, 0.05);
  EXPECT_NEAR(a.t1, 6.25, 1e-12);
  EXPECT_NEAR(a.t2, 7.5, 1e-12);
  EXPECT_NEAR(a.t3, (6.0 + std::pow(2.0, 0.25)) / 2.0, 1e-12);
  EXPECT_NEAR(a.t4, std::pow(162.0 / 256.0 * std::log(40.0), 0.25), 1e-12);
  EXPECT_NEAR(distance_additive_term(256.0, 1.0, 1.0, 0.05).value, a.t1 + a.t2 + a.t3 + a.t4, 1e-12);
  double prev = 1e300;
  for (double n = 10.0; n <= 1e12; n *= 10.0) {
    const double v = distance_additive_term(n, 1.0, 1.0, 0.05).value;
    EXPECT_LT(v, prev);
    prev = v;
    if (n >= 100.0) {
      const auto t = distance_additive_terms(n, 1.0, 1.0, 0.05);
      EXPECT_GT(t.t2, t.t1);
      EXPECT_GT(t.t2, t.t3);
      EXPECT_GT(t.t2, t.t4);
    }
  }
  EXPECT_LT(distance_additive_term(1e40, 1.0, 1.0, 0.05).value, 1e-3);
  EXPECT_THROW(distance_additive_term(0.5, 1.0, 1.0, 0.05), Error);
  EXPECT_THROW(distance_additive_term(10.0, 1.0, 1.0, 1.0), Error);
}

TEST(Bounds, Generalization) {
  EXPECT_NEAR(generalization_terms(100.0, 1.0, 1.0, 0.05, 1.0).t3, 3.0 * std::sqrt(std::log(40.0) / 200.0), 1e-12);
  const auto g = generalization_terms(1e4, 4.0, 1.0, 0.05, 1.0);
  EXPECT_NEAR(g.t1, 2.0 / std::pow(1e4, 0.125), 1e-12);
  EXPECT_NEAR(g.t2, std::sqrt(2.0) / std::pow(1e4, 5.0 / 16.0), 1e-12);
  const double reg = generalization_bound(1e4, 4.0, 1.0, 0.05).value;
  EXPECT_NEAR(reg, g.t1 + g.t2 + g.t3, 1e-12);
  EXPECT_EQ(generalization_bound(1e4, 4.0, 1.0, 0.05, 1.0, TaskKind::classification).value, reg);
  EXPECT_EQ(generalization_bound(1e4, 4.0, 1.0, 0.05, 1.0, TaskKind::classification).name,
            "generalization_classification");
  double prev = 1e300;
  for (double n : {1e2, 1e3, 1e4}) {
    const double v = generalization_bound(n, 4.0, 1.0, 0.05).value;
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(Bounds, TotalVariation) {
  EXPECT_NEAR(tv_bound(4.0, 100.0, 0.05).value, 0.2 + std::sqrt(2.0 * std::log(40.0) / 100.0), 1e-12);
  EXPECT_NEAR(tv_bound(4.0, 100.0, 0.05).value, 0.4716, 1e-4);
  const auto v = tv_bound(50.0, 50.0, 0.01);
  EXPECT_GE(v.value, 1.0);
  EXPECT_EQ(v.notes, "vacuous");
  EXPECT_THROW(tv_bound(0.5, 10.0, 0.05), Error);
}

TEST(Bounds, TotalVariationMonteCarlo) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> cell(0, 3);
  const double bound = tv_bound(4.0, 100.0, 0.05).value;
  int within = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    double counts[4] = {0, 0, 0, 0};
    for (int k = 0; k < 100; ++k) counts[cell(rng)] += 1.0;
    double l1 = 0.0;
    for (double c : counts) l1 += std::abs(c / 100.0 - 0.25);
    within += l1 <= bound;
  }
  EXPECT_GE(within, 950);
}

TEST(Bounds, WeakStrongLog) {
  const std::vector<double> v{1, 2, 4, 8}, w(4, 0.25);
  const auto c = weak_strong_log_check(v, w);
  EXPECT_DOUBLE_EQ(c.lhs, 3.75);
  EXPECT_DOUBLE_EQ(c.weak, 2.0);
  EXPECT_NEAR(c.rhs, 4.0 * std::log(4.0), 1e-12);
  EXPECT_NEAR(c.rhs, 5.545, 1e-3);
  EXPECT_TRUE(c.holds());
  const auto pm = weak_strong_log_check(std::vector<double>{3.0}, std::vector<double>{1.0});
  EXPECT_TRUE(pm.degenerate);
  EXPECT_EQ(pm.rhs, 0.0);
  EXPECT_THROW(weak_strong_log_check(std::vector<double>{1.0, 2.0}, std::vector<double>{0.5, 0.6}), Error);

  std::mt19937_64 rng(2);
  std::exponential_distribution<double> E(1.0);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 2 + rep % 30;
    std::vector<double> vals(n);
    for (auto& x : vals) x = rep % 3 ? E(rng) : std::exp(5.0 * E(rng));
    const auto ws = testutil::random_weights(n, rng);
    const auto r = weak_strong_log_check(vals, ws);
    EXPECT_FALSE(r.degenerate);
    EXPECT_TRUE(r.holds()) << r.lhs << " > " << r.rhs;
  }
}

TEST(Bounds, CoverEstimate) {
  const std::vector<double> mu(5, 0.2);
  const std::vector<std::vector<double>> same(7, std::vector<double>(5, 0.3));
  EXPECT_EQ(empirical_cover_estimate(same, mu, 0.1), 1u);
  const std::vector<std::vector<double>> two{std::vector<double>(5, 0.0), std::vector<double>(5, 1.0)};
  EXPECT_EQ(empirical_cover_estimate(two, mu, 0.4), 2u);
  EXPECT_EQ(empirical_cover_estimate(two, mu, 1.0), 1u);
}

TEST(Bounds, SampledBankCoverBelowAmbientBound) {
  const auto s = testutil::line(testutil::uniform_grid(64));
  const auto ws = WeightedSample::uniform(s);
  for (double L : {2.0, 4.0}) {
    const auto st = sample_weak_lip(ws, L, 200, 3);
    ASSERT_EQ(st.bank.size(), 200u);
    for (const auto& f : st.bank) EXPECT_LE(profile(ws, f).weak_mean, L);
    for (double t : {0.2, 0.3}) {
      const auto cover = empirical_cover_estimate(st.bank, ws.weights(), t);
      EXPECT_GE(cover, 1u);
      EXPECT_LE(std::log(static_cast<double>(cover)), ambient_cover_bound(t, L, 1.0, 1.0).value);
    }
  }
  const auto again = sample_weak_lip(ws, 2.0, 20, 3);
  EXPECT_EQ(again.bank, std::vector<std::vector<double>>(sample_weak_lip(ws, 2.0, 20, 3).bank));
}
