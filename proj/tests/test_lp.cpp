#include <gtest/gtest.h>

#include <random>

#include "avgslope/lp.hpp"
#include "avgslope/pc_solver.hpp"
#include "oracle/oracle.hpp"

using namespace avgslope;

TEST(Lp, SingleLowerBound) {
  LinearProgram lp;
  lp.add_var(1.0);
  lp.add_row({{0, 1.0}}, RowSense::ge, 1.0);
  const auto s = exact_lp_solve(lp);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
  EXPECT_NEAR(s.x[0], 1.0, 1e-12);
}

TEST(Lp, EqualityAndUpperBounds) {
  // min -x - y  s.t. x + y = 1.5, x <= 1, y <= 1
  LinearProgram lp;
  lp.add_var(-1.0, 1.0);
  lp.add_var(-2.0, 1.0);
  lp.add_row({{0, 1.0}, {1, 1.0}}, RowSense::eq, 1.5);
  const auto s = exact_lp_solve(lp);
  EXPECT_NEAR(s.x[0], 0.5, 1e-9);
  EXPECT_NEAR(s.x[1], 1.0, 1e-9);
  EXPECT_LE(s.max_residual, 1e-9);
}

TEST(Lp, InfeasibleAndUnbounded) {
  LinearProgram a;
  a.add_var(1.0);
  a.add_row({{0, 1.0}}, RowSense::ge, 2.0);
  a.add_row({{0, 1.0}}, RowSense::le, 1.0);
  try {
    exact_lp_solve(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
  }
  LinearProgram b;
  b.add_var(-1.0);
  b.add_row({{0, 1.0}}, RowSense::ge, 1.0);
  try {
    exact_lp_solve(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unbounded);
  }
}

TEST(Lp, TwoVariablePolytopesMatchVertexEnumeration) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.1, 2.0), C(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    LinearProgram lp;
    const double c0 = C(rng), c1 = C(rng);
    lp.add_var(c0);
    lp.add_var(c1);
    const int m = 2 + rep % 5;
    for (int r = 0; r < m; ++r) {
      A.push_back({U(rng), U(rng)});
      b.push_back(U(rng));
      lp.add_row({{0, A.back()[0]}, {1, A.back()[1]}}, RowSense::le, b.back());
    }
    const auto v = oracle::lp2_vertices(A, b, c0, c1);
    ASSERT_TRUE(v.found);
    const auto s = exact_lp_solve(lp);
    EXPECT_NEAR(s.objective, v.value, 1e-9);
    EXPECT_LE(s.max_residual, 1e-7);
  }
}

TEST(Lp, DegenerateRedundantRowsTerminate) {
  // Many copies of the same constraints through the optimal vertex.
  LinearProgram lp;
  lp.add_var(-1.0);
  lp.add_var(-1.0);
  for (int k = 0; k < 30; ++k) {
    lp.add_row({{0, 1.0}, {1, 1.0}}, RowSense::le, 1.0);
    lp.add_row({{0, 1.0 + k}, {1, 1.0}}, RowSense::le, 1.0 + k);
    lp.add_row({{0, 1.0}}, RowSense::le, 1.0);
  }
  const auto s = exact_lp_solve(lp);
  EXPECT_NEAR(s.objective, -1.0, 1e-9);
  EXPECT_LE(s.max_residual, 1e-9);
}

TEST(Lp, DualRouteAgreesWithPrimal) {
  // Covering LP with rows far exceeding variables takes the dual route.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  LinearProgram lp;
  for (int j = 0; j < 4; ++j) lp.add_var(1.0 + j);
  std::vector<std::vector<double>> rows;
  for (int r = 0; r < 20; ++r) {
    std::vector<std::pair<std::size_t, double>> c;
    for (std::size_t j = 0; j < 4; ++j) c.push_back({j, U(rng)});
    lp.add_row(c, RowSense::ge, 1.0);
  }
  const auto s = exact_lp_solve(lp);
  EXPECT_EQ(s.method, "dual-simplex-tableau");
  EXPECT_LE(s.max_residual, 1e-7);
  // Same program with one extra variable per row forces the primal route.
  LinearProgram p = lp;
  for (int r = 0; r < 20; ++r) p.add_var(1e6);
  for (std::size_t r = 0; r < 20; ++r) p.rows[r].coefs.push_back({4 + r, 1.0});
  const auto q = exact_lp_solve(p);
  EXPECT_EQ(q.method, "primal-simplex-tableau");
  EXPECT_NEAR(q.objective, s.objective, 1e-7);
}

namespace {

// min x0 + 2 x1 + 3 x2 ... with random covering rows and x0 + x0~ = 1.
PackingCoveringForm random_pc(std::mt19937_64& rng, LinearProgram& lp) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  PackingCoveringForm f;
  f.num_vars = 5;
  f.cost = {1.0, 2.0, 3.0, 0.5, 0.0};
  f.upper = {1.0, 1.0, 1.0, 1.0, 1.0};
  f.complements.push_back({0, 4});
  PackingCoveringForm::Group g;
  g.coefs = {{3, 1.0}};
  g.cap = 0.5;
  f.packing.push_back(g);
  for (int r = 0; r < 6; ++r) {
    LpRow row;
    for (std::size_t j = 0; j < 4; ++j) row.coefs.push_back({j, 0.2 + U(rng)});
    row.rhs = 0.5 + U(rng) * 0.5;
    f.covering.push_back(row);
  }
  for (std::size_t j = 0; j < 5; ++j) lp.add_var(f.cost[j], f.upper[j]);
  lp.add_row({{0, 1.0}, {4, 1.0}}, RowSense::eq, 1.0);
  lp.add_row(g.coefs, RowSense::le, g.cap);
  for (const auto& r : f.covering) lp.add_row(r.coefs, RowSense::ge, r.rhs);
  return f;
}

}  // namespace

TEST(PcSolver, WithinFactorOfExact) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    LinearProgram lp;
    const auto f = random_pc(rng, lp);
    const double opt = exact_lp_solve(lp).objective;
    for (double c : {0.5, 0.1}) {
      const auto s = approx_pc_solve(f, c);
      EXPECT_LE(s.objective, (1.0 + c) * opt + 1e-9);
      EXPECT_LE(s.lower_bound, opt + 1e-9);
      EXPECT_LE(lp_residual(lp, s.x), 1e-7);
    }
  }
}

TEST(PcSolver, RejectsBadInput) {
  PackingCoveringForm f;
  f.num_vars = 1;
  f.cost = {-1.0};
  f.upper = {1.0};
  EXPECT_THROW(approx_pc_solve(f, 0.1), Error);
  f.cost = {1.0};
  EXPECT_THROW(approx_pc_solve(f, 0.0), Error);
}
