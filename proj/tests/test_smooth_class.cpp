#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "avgslope/datasets.hpp"
#include "avgslope/smooth_class.hpp"
#include "test_util.hpp"

using namespace avgslope;

namespace {

double weight_of(const std::vector<KnapsackItem>& items, const std::vector<std::size_t>& pick) {
  double w = 0.0;
  for (std::size_t k : pick) w += items[k].weight;
  return w;
}

double size_of(const std::vector<KnapsackItem>& items, const std::vector<std::size_t>& pick) {
  double s = 0.0;
  for (std::size_t k : pick) s += items[k].size;
  return s;
}

LabeledSample binary_sample(const FiniteMetricSpace& s, std::vector<double> y) {
  return LabeledSample(WeightedSample::uniform(s), std::move(y), LabelKind::binary);
}

}  // namespace

TEST(Knapsack, ZeroDemandIsEmpty) {
  const std::vector<KnapsackItem> items{{1, 1}, {2, 2}};
  EXPECT_TRUE(min_knapsack_cover_2approx(items, 0.0).empty());
}

TEST(Knapsack, TwoLightItems) {
  const std::vector<KnapsackItem> items{{1, 3}, {1, 3}, {5, 6}};
  const auto pick = min_knapsack_cover_2approx(items, 6.0);
  EXPECT_EQ(pick, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(weight_of(items, pick), 2.0);
}

TEST(Knapsack, InfeasibleDemand) {
  const std::vector<KnapsackItem> items{{1, 1}};
  try {
    min_knapsack_cover_2approx(items, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleDemand);
  }
}

TEST(Knapsack, WithinTwiceExhaustiveOptimum) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> W(0.0, 10.0), S(0.1, 5.0);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t k = 1 + rep % 12;
    std::vector<KnapsackItem> items;
    std::vector<oracle::Item> oitems;
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      items.push_back({std::round(W(rng)), std::round(S(rng))});
      oitems.push_back({items.back().weight, items.back().size});
      total += items.back().size;
    }
    if (total == 0.0) continue;
    const double demand = std::uniform_real_distribution<double>(0.0, total)(rng);
    const auto pick = min_knapsack_cover_2approx(items, demand);
    const auto opt = oracle::knapsack_cover(oitems, demand);
    EXPECT_GE(size_of(items, pick), demand);
    double ow = 0.0;
    for (std::size_t j : opt) ow += oitems[j].weight;
    EXPECT_LE(weight_of(items, pick), 2.0 * ow + 1e-12);
  }
}

TEST(SlopeAudit, ConstantLabelsAreCompliant) {
  std::mt19937_64 rng(2);
  const auto s = testutil::random_space(10, 2, rng);
  EXPECT_EQ(slope_audit(s, std::vector<double>(10, 1.0), 1.0, 6.0), 0.0);
  EXPECT_THROW(slope_audit(s, std::vector<double>(10, 1.0), 1.0, 0.5), Error);
}

TEST(SlopeAudit, AlternatingLabelsViolate) {
  const auto xs = testutil::uniform_grid(20);
  std::vector<double> y;
  for (std::size_t i = 0; i < xs.size(); ++i) y.push_back(static_cast<double>(i % 2));
  EXPECT_GT(slope_audit(testutil::line(xs), y, 1.0, 1.0), 1.0);
}

TEST(SlopeAudit, MatchesOracle) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rep % 15;
    const auto s = testutil::random_space(n, 1 + rep % 2, rng);
    const auto y = rep % 2 ? testutil::random_bits(n, rng) : testutil::random_values(n, rng);
    const double L = 0.5 + 0.5 * (rep % 6), b = 1.0 + rep % 3;
    EXPECT_NEAR(slope_audit(s, y, L, b), oracle::audit(testutil::matrix_of(s), y, L, b), 1e-12);
  }
}

TEST(Clsrp, HomogeneousLabelsNoPlan) {
  std::mt19937_64 rng(4);
  const auto s = testutil::random_space(12, 2, rng);
  const auto plan = clsrp_bicriteria(binary_sample(s, std::vector<double>(12, 0.0)), 1.0);
  EXPECT_TRUE(plan.relabeled_indices.empty());
  EXPECT_EQ(plan.labels, std::vector<double>(12, 0.0));
}

TEST(Clsrp, SeparatedClustersNoPlan) {
  const auto d = datasets::two_clusters(60, 7);
  const auto s = FiniteMetricSpace::from_coordinates(d.rows, MetricTag::euclidean);
  for (double L : {2.0, 4.0}) {
    const auto plan = clsrp_bicriteria(binary_sample(s, d.labels), L);
    EXPECT_TRUE(plan.relabeled_indices.empty()) << L;
  }
}

TEST(Clsrp, IsolatedFlippedPoint) {
  std::vector<double> xs;
  for (int k = 0; k < 9; ++k) xs.push_back(0.01 * k);
  xs.push_back(1.0);
  std::vector<double> y(10, 0.0);
  y[9] = 1.0;
  const auto s = testutil::line(xs);
  const double L = 2.0;
  const auto plan = clsrp_bicriteria(binary_sample(s, y), L);
  EXPECT_LE(plan.relabeled_indices.size(), 1u);
  if (!plan.relabeled_indices.empty()) {
    EXPECT_EQ(plan.relabeled_indices.front(), 9u);
  }
  EXPECT_LE(oracle::clsrp(testutil::matrix_of(s), y, L).size(), 1u);
}

TEST(Clsrp, NetSplitIsHomogeneous) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 10 + rep;
    const auto s = testutil::random_space(n, 2, rng);
    const auto y = testutil::random_bits(n, rng);
    const auto plan = clsrp_bicriteria(binary_sample(s, y), 1.0 + rep % 4);
    std::vector<double> relabeled(n, 0.0);
    for (const auto& lv : plan.per_level) {
      std::vector<int> seen(n, 0);
      for (const auto& e : lv.entries)
        for (std::size_t x : e.members) {
          EXPECT_EQ(y[x], static_cast<double>(e.label));
          ++seen[x];
        }
      for (std::size_t x = 0; x < n; ++x) EXPECT_EQ(seen[x], 1);
      for (std::size_t x : lv.relabel) relabeled[x] = 1.0;
    }
    std::size_t count = 0;
    for (double v : relabeled) count += v > 0.0;
    EXPECT_EQ(plan.relabeled_indices.size(), count);
    for (std::size_t a = 0; a < plan.relabeled_indices.size(); ++a)
      EXPECT_EQ(plan.labels[plan.relabeled_indices[a]], plan.new_labels[a]);
  }
}

TEST(Clsrp, PostPlanAuditWithFactorSix) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> UL(1.0, 4.0);
  int failures = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 4 + rep % 7;
    const auto s = testutil::random_space(n, 1 + rep % 2, rng);
    const auto y = testutil::random_bits(n, rng);
    const double L = UL(rng);
    const auto plan = clsrp_bicriteria(binary_sample(s, y), L);
    const double audit = slope_audit(s, plan.labels, L, 6.0);
    if (audit > 1.0) ++failures;
    EXPECT_LE(audit, 1.0) << "rep " << rep << " n " << n << " L " << L;
  }
  std::printf("b=6 audit failures: %d / 200\n", failures);
}

TEST(Clsrp, RelabelCountCompetitiveness) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> UL(1.0, 4.0);
  double worst = 0.0;
  int zero_opt_nonempty = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 4 + rep % 7;
    const auto s = testutil::random_space(n, 2, rng);
    const auto y = testutil::random_bits(n, rng);
    const double L = UL(rng);
    const auto plan = clsrp_bicriteria(binary_sample(s, y), L);
    const auto opt = oracle::clsrp(testutil::matrix_of(s), y, L);
    if (opt.empty()) {
      zero_opt_nonempty += !plan.relabeled_indices.empty();
      continue;
    }
    const double C = static_cast<double>(plan.relabeled_indices.size()) /
                     (std::log(static_cast<double>(n)) * static_cast<double>(opt.size()));
    worst = std::max(worst, C);
  }
  std::printf("relabel ratio C = |P| / (ln n |P*|) <= %.3f; nonempty plans with empty optimum: %d\n", worst,
              zero_opt_nonempty);
  EXPECT_TRUE(std::isfinite(worst));
}

TEST(Clsrp, RejectsBadInput) {
  const auto s = testutil::line({0.0, 1.0});
  EXPECT_THROW(clsrp_bicriteria(binary_sample(s, {0.0, 1.0}), 0.0), Error);
  const LabeledSample real(WeightedSample::uniform(s), {0.0, 0.5}, LabelKind::real01);
  EXPECT_THROW(clsrp_bicriteria(real, 1.0), Error);
}
