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

#ifndef CGA_QP_PROJECTION_H_
#define CGA_QP_PROJECTION_H_

#include <Eigen/Core>

namespace cga {

// Self-gradient g (length d) and the stacked neighbour cross-gradients G
// (m x d, one row per neighbour). m == 0 means no constraints.
struct GradientStack {
  Eigen::VectorXd g;
  Eigen::MatrixXd G;

  Eigen::Index dim() const { return g.size(); }
  Eigen::Index constraints() const { return G.rows(); }
};

struct QpOptions {
  double tol = 1e-8;
  // 0 selects the default of 10*m*d capped at 100000.
  int max_iter = 0;
};

int DefaultMaxIterations(Eigen::Index m, Eigen::Index d);

// Nonnegative minimiser of 0.5 u'GG'u + g'G'u.
struct DualSolution {
  Eigen::VectorXd u;
  int iterations = 0;
  // Projected-gradient natural residual ||u - max(0, u - grad)||_inf.
  double residual = 0.0;
  bool converged = true;
};

struct KktReport {
  double primal_feasibility = 0.0;       // min_i (Gz)_i
  double dual_feasibility = 0.0;         // min_i u_i
  double complementary_slackness = 0.0;  // max_i |u_i (Gz)_i|
  double stationarity = 0.0;             // ||z - G'u - g||_2

  // primal >= -10 tol, dual >= 0, slackness <= 10 tol, stationarity <= 1e-12.
  bool Within(double tol) const;
};

struct Projection {
  Eigen::VectorXd z;
  DualSolution dual;
  KktReport kkt;
  bool fast_path = false;
};

// Projected gradient descent on the dual with step 1/L, where L is the
// maximum absolute row sum of GG' (an upper bound on its spectral norm).
// Whenever the set of positive multipliers changes, the reduced system on
// that support is solved directly and accepted if it meets `tol`.
// Throws QpError on non-finite input or bad arguments; non-convergence is
// reported through DualSolution::converged with the best iterate.
DualSolution SolveDual(const GradientStack& stack, double tol, int max_iter);

// z = G'u + g. Throws QpError on dimension mismatch.
Eigen::VectorXd RecoverProjection(const GradientStack& stack,
                                  const Eigen::VectorXd& u);

KktReport ComputeKkt(const GradientStack& stack, const Eigen::VectorXd& z,
                     const Eigen::VectorXd& u);

// min 0.5||z - g||^2 s.t. Gz >= 0. Returns g unchanged (bit-identical) when
// Gg >= -tol already holds, when m == 0, or when g == 0.
Projection ProjectGradient(const GradientStack& stack,
                           const QpOptions& opts = {});

// 0.5||z - g||^2, the primal objective including its constant term.
double PrimalObjective(const GradientStack& stack, const Eigen::VectorXd& z);

// Exhaustive active-set enumeration for m <= 10, used as a test oracle.
// Each subset with linearly independent rows yields the projection of g onto
// the null space of those rows; candidates failing primal feasibility or
// multiplier nonnegativity are discarded and the closest survivor is
// returned. Shares no code with the solver above.
Eigen::VectorXd BruteForceOracle(const GradientStack& stack);

}  // namespace cga

#endif  // CGA_QP_PROJECTION_H_
