// Copyright 2026 The CGA Simulator Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "cga/qp_projection.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "cga/errors.h"

namespace cga {
namespace {

GradientStack Stack(std::vector<double> g, std::vector<std::vector<double>> rows) {
  GradientStack s;
  s.g = Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
  s.G.resize(static_cast<Eigen::Index>(rows.size()), s.dim());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t k = 0; k < rows[r].size(); ++k) {
      s.G(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
    }
  }
  return s;
}

GradientStack RandomStack(std::mt19937_64& rng, int d, int m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GradientStack s;
  s.g = Eigen::VectorXd::NullaryExpr(d, [&] { return u(rng); });
  s.G = Eigen::MatrixXd::NullaryExpr(m, d, [&] { return u(rng); });
  return s;
}

// Single constraint: minimising 0.5 a u^2 + b u over u >= 0 gives
// u* = max(0, -b / a) with a = ||G||^2, b = G g.
double OneConstraintDual(const GradientStack& s) {
  const double a = s.G.row(0).squaredNorm();
  const double b = s.G.row(0).dot(s.g);
  return std::max(0.0, -b / a);
}

TEST(SolveDualTest, OneDimensionalExample) {
  GradientStack s = Stack({1, 0}, {{-1, 0}});
  DualSolution sol = SolveDual(s, 1e-8, 1000);
  ASSERT_EQ(sol.u.size(), 1);
  EXPECT_NEAR(sol.u[0], OneConstraintDual(s), 1e-8);
  EXPECT_NEAR(sol.u[0], 1.0, 1e-8);
  EXPECT_TRUE(sol.converged);
  EXPECT_LE(sol.residual, 1e-8);
}

TEST(SolveDualTest, AlreadyFeasibleGivesZero) {
  DualSolution sol = SolveDual(Stack({1, 1}, {{1, 0}}), 1e-8, 1000);
  EXPECT_EQ(sol.u[0], 0.0);
}

TEST(SolveDualTest, DecoupledExample) {
  GradientStack s = Stack({0, -1}, {{0, 1}, {1, 0}});
  DualSolution sol = SolveDual(s, 1e-8, 1000);
  EXPECT_NEAR(sol.u[0], 1.0, 1e-8);
  EXPECT_NEAR(sol.u[1], 0.0, 1e-8);
  // Cross-check against enumeration: both routes give z = 0.
  EXPECT_NEAR((RecoverProjection(s, sol.u) - BruteForceOracle(s)).norm(), 0.0, 1e-8);
}

TEST(SolveDualTest, EmptyStack) {
  GradientStack s = Stack({3}, {});
  DualSolution sol = SolveDual(s, 1e-8, 10);
  EXPECT_EQ(sol.u.size(), 0);
  EXPECT_EQ(sol.residual, 0.0);
  EXPECT_TRUE(sol.converged);
}

TEST(SolveDualTest, RejectsBadInput) {
  GradientStack nan = Stack({std::numeric_limits<double>::quiet_NaN(), 0}, {{1, 0}});
  EXPECT_THROW(SolveDual(nan, 1e-8, 10), QpError);
  GradientStack inf = Stack({1, 0}, {{std::numeric_limits<double>::infinity(), 0}});
  EXPECT_THROW(ProjectGradient(inf), QpError);
  GradientStack ok = Stack({1, 0}, {{-1, 0}});
  EXPECT_THROW(SolveDual(ok, 0.0, 10), QpError);
  EXPECT_THROW(SolveDual(ok, 1e-8, 0), QpError);
  GradientStack ragged;
  ragged.g = Eigen::VectorXd::Ones(3);
  ragged.G = Eigen::MatrixXd::Ones(1, 2);
  EXPECT_THROW(SolveDual(ragged, 1e-8, 10), QpError);
}

TEST(SolveDualTest, NonConvergenceIsReported) {
  // Nearly parallel constraints make plain projected gradient slow; a single
  // iteration cannot reach the tolerance.
  GradientStack s = Stack({1, 0.3, -0.2}, {{-1, 0.01, 0}, {-1, 0, 0.02}, {0.5, -1, 0}});
  DualSolution sol = SolveDual(s, 1e-12, 1);
  EXPECT_FALSE(sol.converged);
  EXPECT_GT(sol.residual, 1e-12);
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_TRUE((sol.u.array() >= 0.0).all());
}

TEST(RecoverProjectionTest, Examples) {
  GradientStack a = Stack({1, 0}, {{-1, 0}});
  EXPECT_EQ(RecoverProjection(a, Eigen::VectorXd::Constant(1, 1.0)),
            Eigen::Vector2d(0, 0));
  GradientStack b = Stack({0.3, -2}, {});
  EXPECT_EQ(RecoverProjection(b, Eigen::VectorXd(0)), b.g);
  GradientStack c = Stack({0, -1}, {{0, 1}, {1, 0}});
  EXPECT_EQ(RecoverProjection(c, Eigen::Vector2d(1, 0)), Eigen::Vector2d(0, 0));
  EXPECT_THROW(RecoverProjection(c, Eigen::VectorXd::Ones(3)), QpError);
}

TEST(ProjectGradientTest, FastPathReturnsInputBitIdentically) {
  GradientStack s = Stack({1, 1}, {{1, 0}});
  Projection p = ProjectGradient(s);
  EXPECT_TRUE(p.fast_path);
  EXPECT_EQ(p.z, s.g);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    GradientStack r = RandomStack(rng, 5, 3);
    if ((r.G * r.g).minCoeff() < 0.0) continue;
    Projection q = ProjectGradient(r);
    EXPECT_TRUE(q.fast_path);
    EXPECT_EQ(std::memcmp(q.z.data(), r.g.data(), sizeof(double) * 5), 0);
  }
}

TEST(ProjectGradientTest, Examples) {
  Projection p = ProjectGradient(Stack({1, 0}, {{-1, 0}}));
  EXPECT_FALSE(p.fast_path);
  EXPECT_NEAR(p.z.norm(), 0.0, 1e-8);
  EXPECT_GE(p.kkt.primal_feasibility, -1e-8);
  EXPECT_TRUE(p.kkt.Within(1e-8));

  Projection empty = ProjectGradient(Stack({3}, {}));
  EXPECT_TRUE(empty.fast_path);
  EXPECT_EQ(empty.z[0], 3.0);

  Projection zero = ProjectGradient(Stack({0, 0}, {{-1, 0}}));
  EXPECT_TRUE(zero.fast_path);
  EXPECT_EQ(zero.z, Eigen::Vector2d::Zero());
}

TEST(BruteForceOracleTest, Examples) {
  EXPECT_EQ(BruteForceOracle(Stack({1, 0}, {})), Eigen::Vector2d(1, 0));
  EXPECT_NEAR((BruteForceOracle(Stack({0, -1}, {{0, 1}, {1, 0}}))).norm(), 0.0, 1e-12);
  EXPECT_NEAR((BruteForceOracle(Stack({1, 0}, {{-1, 0}}))).norm(), 0.0, 1e-12);
  EXPECT_EQ(BruteForceOracle(Stack({1, 1}, {{1, 0}})), Eigen::Vector2d(1, 1));
  std::mt19937_64 rng(1);
  EXPECT_THROW(BruteForceOracle(RandomStack(rng, 3, 11)), QpError);
}

TEST(BruteForceOracleTest, MatchesSolverOnSpecExamples) {
  for (const GradientStack& s : {Stack({1, 1}, {{1, 0}}), Stack({1, 0}, {{-1, 0}}),
                                 Stack({3}, {}), Stack({0, -1}, {{0, 1}, {1, 0}})}) {
    EXPECT_NEAR((ProjectGradient(s).z - BruteForceOracle(s)).norm(), 0.0, 1e-6);
  }
}

// Property: random instances agree with exhaustive enumeration and satisfy
// the KKT bounds.
TEST(ProjectGradientTest, OracleEquivalenceAndKkt) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 5), cons(0, 4);
  const double tol = 1e-8;
  for (int trial = 0; trial < 500; ++trial) {
    GradientStack s = RandomStack(rng, dim(rng), cons(rng));
    SCOPED_TRACE(trial);
    Projection p = ProjectGradient(s, {.tol = tol});
    const Eigen::VectorXd oracle = BruteForceOracle(s);
    EXPECT_NEAR(PrimalObjective(s, p.z), PrimalObjective(s, oracle), 1e-6);
    EXPECT_GE(p.kkt.primal_feasibility, -10 * tol);
    EXPECT_GE(p.kkt.dual_feasibility, 0.0);
    EXPECT_LE(p.kkt.complementary_slackness, 10 * tol);
    EXPECT_LE(p.kkt.stationarity, 1e-12);
    // The projection of g onto the cone satisfies <z, g> = ||z||^2 >= 0.
    EXPECT_GE(p.z.dot(s.g), -1e-9);
    EXPECT_NEAR(p.z.dot(s.g), oracle.dot(s.g), 1e-6);
  }
}

TEST(ProjectGradientTest, ScaleEquivariance) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    GradientStack s = RandomStack(rng, 4, 3);
    const Eigen::VectorXd base = ProjectGradient(s).z;
    for (double c : {0.5, 3.0, 40.0}) {
      GradientStack scaled{c * s.g, c * s.G};
      const Eigen::VectorXd z = ProjectGradient(scaled).z;
      const double denom = std::max(1.0, (c * base).norm());
      EXPECT_LE((z - c * base).norm() / denom, 1e-9) << trial << " c=" << c;
    }
  }
}

TEST(ProjectGradientTest, DegenerateDependentRows) {
  // Duplicate and parallel constraints: multipliers are not unique but the
  // projection is.
  GradientStack s = Stack({1, -1, 0.5}, {{-1, 0, 0}, {-1, 0, 0}, {-2, 0, 0}, {0, 1, 0}});
  Projection p = ProjectGradient(s);
  EXPECT_NEAR((p.z - BruteForceOracle(s)).norm(), 0.0, 1e-7);
  EXPECT_TRUE(p.kkt.Within(1e-8));
}

TEST(DefaultMaxIterationsTest, Formula) {
  EXPECT_EQ(DefaultMaxIterations(4, 5), 200);
  EXPECT_EQ(DefaultMaxIterations(39, 3530), 100000);
  EXPECT_EQ(DefaultMaxIterations(0, 5), 1);
}

}  // namespace
}  // namespace cga
