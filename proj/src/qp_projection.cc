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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "cga/errors.h"

namespace cga {

namespace {

void CheckStack(const GradientStack& stack) {
  if (stack.dim() < 1) throw QpError("gradient dimension must be >= 1");
  if (stack.constraints() > 0 && stack.G.cols() != stack.dim()) {
    throw QpError("cross-gradient rows have dimension " +
                  std::to_string(stack.G.cols()) + ", expected " +
                  std::to_string(stack.dim()));
  }
  if (!stack.g.allFinite() || !stack.G.allFinite()) {
    throw QpError("non-finite value in QP instance");
  }
}

double NaturalResidual(const Eigen::VectorXd& u, const Eigen::VectorXd& grad) {
  return (u - (u - grad).cwiseMax(0.0)).lpNorm<Eigen::Infinity>();
}

}  // namespace

int DefaultMaxIterations(Eigen::Index m, Eigen::Index d) {
  const long long n = 10LL * m * d;
  return static_cast<int>(std::clamp<long long>(n, 1, 100000));
}

bool KktReport::Within(double tol) const {
  return primal_feasibility >= -10.0 * tol && dual_feasibility >= 0.0 &&
         complementary_slackness <= 10.0 * tol && stationarity <= 1e-12;
}

DualSolution SolveDual(const GradientStack& stack, double tol, int max_iter) {
  CheckStack(stack);
  if (!(tol > 0.0)) throw QpError("tolerance must be positive");
  if (max_iter < 1) throw QpError("max_iter must be >= 1");

  const Eigen::Index m = stack.constraints();
  DualSolution out;
  out.u = Eigen::VectorXd::Zero(m);
  if (m == 0) return out;

  const Eigen::MatrixXd Q = stack.G * stack.G.transpose();
  const Eigen::VectorXd c = stack.G * stack.g;
  const double lipschitz = Q.cwiseAbs().rowwise().sum().maxCoeff();
  if (lipschitz == 0.0) return out;  // G == 0: every u is optimal

  auto dual_objective = [&](const Eigen::VectorXd& v) {
    return 0.5 * v.dot(Q * v) + c.dot(v);
  };

  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd best = u;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd grad = Q * u + c;
    const double residual = NaturalResidual(u, grad);
    if (residual < best_residual) {
      best_residual = residual;
      best = u;
    }
    if (residual <= tol) {
      out.u = u;
      out.iterations = it;
      out.residual = residual;
      return out;
    }

    u = (u - grad / lipschitz).cwiseMax(0.0);

    // Polish: minimise exactly on the current support. When the unconstrained
    // minimiser leaves the orthant, move towards it until the first
    // coordinate hits zero, drop that coordinate and retry. Every move lowers
    // the dual objective, so the polished point replaces the iterate.
    Eigen::VectorXd cur = u;
    for (Eigen::Index pass = 0; pass < m; ++pass) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (cur[i] > 0.0) idx.push_back(i);
      }
      if (idx.empty()) break;
      const auto s = static_cast<Eigen::Index>(idx.size());
      Eigen::MatrixXd qs(s, s);
      Eigen::VectorXd cs(s);
      for (Eigen::Index a = 0; a < s; ++a) {
        cs[a] = -c[idx[a]];
        for (Eigen::Index b = 0; b < s; ++b) qs(a, b) = Q(idx[a], idx[b]);
      }
      const Eigen::VectorXd us = qs.ldlt().solve(cs);
      if (!us.allFinite()) break;
      Eigen::VectorXd target = Eigen::VectorXd::Zero(m);
      for (Eigen::Index a = 0; a < s; ++a) target[idx[a]] = us[a];
      if (us.minCoeff() >= 0.0) {
        cur = target;
        break;
      }
      double step = 1.0;
      Eigen::Index blocking = -1;
      for (Eigen::Index a = 0; a < s; ++a) {
        const Eigen::Index i = idx[a];
        if (target[i] < 0.0) {
          const double t = cur[i] / (cur[i] - target[i]);
          if (t < step) {
            step = t;
            blocking = i;
          }
        }
      }
      cur = (cur + step * (target - cur)).cwiseMax(0.0);
      if (blocking >= 0) cur[blocking] = 0.0;
    }
    if (dual_objective(cur) <= dual_objective(u)) u = cur;
  }

  out.u = best;
  out.iterations = max_iter;
  out.residual = best_residual;
  out.converged = false;
  return out;
}

Eigen::VectorXd RecoverProjection(const GradientStack& stack,
                                  const Eigen::VectorXd& u) {
  if (u.size() != stack.constraints()) {
    throw QpError("dual vector has " + std::to_string(u.size()) +
                  " entries, expected " + std::to_string(stack.constraints()));
  }
  if (u.size() == 0) return stack.g;
  return stack.G.transpose() * u + stack.g;
}

KktReport ComputeKkt(const GradientStack& stack, const Eigen::VectorXd& z,
                     const Eigen::VectorXd& u) {
  KktReport r;
  const Eigen::Index m = stack.constraints();
  if (m > 0) {
    const Eigen::VectorXd gz = stack.G * z;
    r.primal_feasibility = gz.minCoeff();
    r.dual_feasibility = u.minCoeff();
    r.complementary_slackness = u.cwiseProduct(gz).cwiseAbs().maxCoeff();
    r.stationarity = (z - stack.G.transpose() * u - stack.g).norm();
  } else {
    r.stationarity = (z - stack.g).norm();
  }
  return r;
}

Projection ProjectGradient(const GradientStack& stack, const QpOptions& opts) {
  CheckStack(stack);
  const Eigen::Index m = stack.constraints();
  Projection p;
  bool trivial = m == 0 || stack.g.isZero(0.0);
  if (!trivial) trivial = (stack.G * stack.g).minCoeff() >= -opts.tol;
  if (trivial) {
    p.z = stack.g;
    p.dual.u = Eigen::VectorXd::Zero(m);
    p.fast_path = true;
  } else {
    const int max_iter = opts.max_iter > 0
                             ? opts.max_iter
                             : DefaultMaxIterations(m, stack.dim());
    p.dual = SolveDual(stack, opts.tol, max_iter);
    p.z = RecoverProjection(stack, p.dual.u);
  }
  p.kkt = ComputeKkt(stack, p.z, p.dual.u);
  return p;
}

double PrimalObjective(const GradientStack& stack, const Eigen::VectorXd& z) {
  return 0.5 * (z - stack.g).squaredNorm();
}

Eigen::VectorXd BruteForceOracle(const GradientStack& stack) {
  CheckStack(stack);
  const int m = static_cast<int>(stack.constraints());
  const int d = static_cast<int>(stack.dim());
  if (m > 10) throw QpError("brute-force oracle supports at most 10 constraints");

  std::vector<std::vector<double>> rows(m, std::vector<double>(d));
  std::vector<double> g(d);
  for (int k = 0; k < d; ++k) g[k] = stack.g[k];
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < d; ++k) rows[i][k] = stack.G(i, k);
  }
  auto dot = [d](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += a[k] * b[k];
    return s;
  };
  constexpr double kFeasTol = 1e-9;

  std::vector<double> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> active;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) active.push_back(i);
    }
    const int s = static_cast<int>(active.size());

    // Modified Gram-Schmidt basis of the active rows.
    std::vector<std::vector<double>> basis;
    bool independent = true;
    for (int i : active) {
      std::vector<double> q = rows[i];
      const double norm0 = std::sqrt(dot(q, q));
      for (const auto& b : basis) {
        const double proj = dot(q, b);
        for (int k = 0; k < d; ++k) q[k] -= proj * b[k];
      }
      const double norm = std::sqrt(dot(q, q));
      if (norm0 == 0.0 || norm <= 1e-10 * norm0) {
        independent = false;
        break;
      }
      for (double& v : q) v /= norm;
      basis.push_back(std::move(q));
    }
    if (!independent) continue;

    std::vector<double> z = g;
    for (const auto& b : basis) {
      const double proj = dot(g, b);
      for (int k = 0; k < d; ++k) z[k] -= proj * b[k];
    }

    bool feasible = true;
    for (int i = 0; i < m && feasible; ++i) feasible = dot(rows[i], z) >= -kFeasTol;
    if (!feasible) continue;

    // Multipliers from the Gram system (G_S G_S') u = G_S (z - g), solved by
    // Gaussian elimination with partial pivoting.
    if (s > 0) {
      std::vector<double> diff(d);
      for (int k = 0; k < d; ++k) diff[k] = z[k] - g[k];
      std::vector<std::vector<double>> a(s, std::vector<double>(s + 1));
      for (int r = 0; r < s; ++r) {
        for (int c = 0; c < s; ++c) a[r][c] = dot(rows[active[r]], rows[active[c]]);
        a[r][s] = dot(rows[active[r]], diff);
      }
      for (int col = 0; col < s; ++col) {
        int piv = col;
        for (int r = col + 1; r < s; ++r) {
          if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        for (int r = col + 1; r < s; ++r) {
          const double f = a[r][col] / a[col][col];
          for (int c = col; c <= s; ++c) a[r][c] -= f * a[col][c];
        }
      }
      std::vector<double> u(s);
      for (int r = s - 1; r >= 0; --r) {
        double acc = a[r][s];
        for (int c = r + 1; c < s; ++c) acc -= a[r][c] * u[c];
        u[r] = acc / a[r][r];
      }
      if (*std::min_element(u.begin(), u.end()) < -kFeasTol) continue;
    }

    double obj = 0.0;
    for (int k = 0; k < d; ++k) obj += 0.5 * (z[k] - g[k]) * (z[k] - g[k]);
    if (obj < best_obj) {
      best_obj = obj;
      best = std::move(z);
    }
  }
  if (best.empty()) throw QpError("oracle found no feasible active set");
  return Eigen::Map<const Eigen::VectorXd>(best.data(), d);
}

}  // namespace cga
