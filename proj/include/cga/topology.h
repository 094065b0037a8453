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

#ifndef CGA_TOPOLOGY_H_
#define CGA_TOPOLOGY_H_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace cga {

enum class GraphKind { kFullyConnected, kRing, kBipartite };

// Accepts "full", "ring", "bipartite".
GraphKind ParseGraphKind(std::string_view name);
std::string_view GraphKindName(GraphKind kind);

// Symmetric doubly stochastic weights over a fixed communication graph.
// Instances are only produced by BuildTopology, which validates every
// invariant before returning.
class MixingMatrix {
 public:
  int n_agents() const { return static_cast<int>(weights_.rows()); }
  GraphKind kind() const { return kind_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  double operator()(int i, int j) const { return weights_(i, j); }

  // True if (i, j) is an edge of the declared graph or i == j.
  bool IsGraphEdge(int i, int j) const;

  // Number of strictly positive off-diagonal entries, i.e. directed
  // messages per round.
  int OffDiagonalNonzeros() const;

 private:
  friend MixingMatrix BuildTopology(GraphKind kind, int n);
  MixingMatrix(GraphKind kind, Eigen::MatrixXd weights)
      : kind_(kind), weights_(std::move(weights)) {}

  GraphKind kind_;
  Eigen::MatrixXd weights_;
};

struct SpectralReport {
  std::vector<double> lambda_sorted;  // descending
  double rho_sqrt = 0.0;              // max(|lambda_2|, |lambda_N|)
};

// Ring: 1/3 on self and both cyclic neighbours (n >= 3).
// FullyConnected: 1/n everywhere (n >= 1; n == 1 gives [1]).
// Bipartite: K_{n/2,n/2} with sides {0..n/2-1} and {n/2..n-1}, Metropolis-
// Hastings weights plus self loops (n >= 2, even).
// Throws TopologyError on invalid n.
MixingMatrix BuildTopology(GraphKind kind, int n);

SpectralReport ComputeSpectralReport(const MixingMatrix& m);

// Ascending j != i with weights(i, j) > 0.
std::vector<int> Neighbors(const MixingMatrix& m, int i);

// Largest absolute deviation of any row or column sum from 1.
double MaxStochasticityError(const Eigen::MatrixXd& w);

}  // namespace cga

#endif  // CGA_TOPOLOGY_H_
