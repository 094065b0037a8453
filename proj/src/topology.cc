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

#include "cga/topology.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <Eigen/Eigenvalues>

#include "cga/errors.h"

namespace cga {

GraphKind ParseGraphKind(std::string_view name) {
  if (name == "full") return GraphKind::kFullyConnected;
  if (name == "ring") return GraphKind::kRing;
  if (name == "bipartite") return GraphKind::kBipartite;
  throw TopologyError("unknown topology '" + std::string(name) +
                      "' (expected full, ring or bipartite)");
}

std::string_view GraphKindName(GraphKind kind) {
  switch (kind) {
    case GraphKind::kFullyConnected:
      return "full";
    case GraphKind::kRing:
      return "ring";
    case GraphKind::kBipartite:
      return "bipartite";
  }
  return "unknown";
}

namespace {

bool SameSide(int n, int i, int j) { return (i < n / 2) == (j < n / 2); }

bool EdgeOf(GraphKind kind, int n, int i, int j) {
  if (i == j) return true;
  switch (kind) {
    case GraphKind::kFullyConnected:
      return true;
    case GraphKind::kRing:
      return (i + 1) % n == j || (j + 1) % n == i;
    case GraphKind::kBipartite:
      return !SameSide(n, i, j);
  }
  return false;
}

void Validate(GraphKind kind, const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  if (MaxStochasticityError(w) > 1e-12) {
    throw TopologyError("mixing matrix is not doubly stochastic");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (w(i, j) < 0.0 || w(i, j) > 1.0 || w(i, j) != w(j, i)) {
        throw TopologyError("mixing matrix entry out of range or asymmetric");
      }
      if (w(i, j) > 0.0 && !EdgeOf(kind, n, i, j)) {
        throw TopologyError("mixing matrix weight outside the graph");
      }
    }
  }
}

}  // namespace

bool MixingMatrix::IsGraphEdge(int i, int j) const {
  return EdgeOf(kind_, n_agents(), i, j);
}

int MixingMatrix::OffDiagonalNonzeros() const {
  int count = 0;
  for (int i = 0; i < n_agents(); ++i) {
    for (int j = 0; j < n_agents(); ++j) {
      if (i != j && weights_(i, j) > 0.0) ++count;
    }
  }
  return count;
}

MixingMatrix BuildTopology(GraphKind kind, int n) {
  // A single agent is only meaningful as the trivial complete graph [1].
  if (n < 1 || (n < 2 && kind != GraphKind::kFullyConnected)) {
    throw TopologyError("topology needs at least 2 agents, got " +
                        std::to_string(n));
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  switch (kind) {
    case GraphKind::kFullyConnected:
      w.setConstant(1.0 / n);
      break;
    case GraphKind::kRing:
      if (n < 3) {
        throw TopologyError("ring topology needs at least 3 agents, got " +
                            std::to_string(n));
      }
      for (int i = 0; i < n; ++i) {
        w(i, i) = 1.0 / 3.0;
        w(i, (i + 1) % n) = 1.0 / 3.0;
        w(i, (i + n - 1) % n) = 1.0 / 3.0;
      }
      break;
    case GraphKind::kBipartite: {
      if (n % 2 != 0) {
        throw TopologyError("bipartite topology needs an even agent count, got " +
                            std::to_string(n));
      }
      // Every vertex of K_{n/2,n/2} has degree n/2.
      const double degree = n / 2;
      const double off = 1.0 / (1.0 + degree);
      for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
          if (!SameSide(n, i, j)) {
            w(i, j) = off;
            row += off;
          }
        }
        w(i, i) = 1.0 - row;
      }
      break;
    }
  }
  Validate(kind, w);
  return MixingMatrix(kind, std::move(w));
}

SpectralReport ComputeSpectralReport(const MixingMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m.weights(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  SpectralReport report;
  report.lambda_sorted.assign(ev.data(), ev.data() + ev.size());
  std::reverse(report.lambda_sorted.begin(), report.lambda_sorted.end());
  const auto& l = report.lambda_sorted;
  report.rho_sqrt = l.size() < 2 ? 0.0
                                 : std::max(std::abs(l[1]), std::abs(l.back()));
  return report;
}

std::vector<int> Neighbors(const MixingMatrix& m, int i) {
  if (i < 0 || i >= m.n_agents()) {
    throw TopologyError("agent index " + std::to_string(i) + " out of range");
  }
  std::vector<int> out;
  for (int j = 0; j < m.n_agents(); ++j) {
    if (j != i && m(i, j) > 0.0) out.push_back(j);
  }
  return out;
}

double MaxStochasticityError(const Eigen::MatrixXd& w) {
  double err = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    err = std::max(err, std::abs(w.row(i).sum() - 1.0));
  }
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    err = std::max(err, std::abs(w.col(j).sum() - 1.0));
  }
  return err;
}

}  // namespace cga
