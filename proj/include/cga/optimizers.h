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

#ifndef CGA_OPTIMIZERS_H_
#define CGA_OPTIMIZERS_H_

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cga/neural.h"
#include "cga/qp_projection.h"
#include "cga/topology.h"

namespace cga {

enum class Algorithm { kCga, kCompCga, kDpmsgd };

// Accepts "cga", "compcga", "dpmsgd".
Algorithm ParseAlgorithm(std::string_view name);
std::string_view AlgorithmName(Algorithm algorithm);

struct AgentState {
  FlatParams x;
  Eigen::VectorXd v;
  // Error-feedback memory for the agent's own gradient (CompCGA only).
  Eigen::VectorXd e_self;
  // Error-feedback memory for the cross-gradients this agent computes on
  // behalf of neighbour j, keyed by j (CompCGA only).
  std::map<int, Eigen::VectorXd> e_cross;
};

// x = x0, zero momentum and zero error buffers.
AgentState MakeAgent(const FlatParams& x0);

struct Hyper {
  double alpha0 = 0.01;
  double beta = 0.98;
  double decay = 0.981;
  int batch_size = 128;
  QpOptions qp;

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

// alpha0 * decay^epoch
double StepSize(const Hyper& hyper, int epoch);

struct RoundStats {
  double mean_loss = 0.0;
  // Mean over agents of ||g_tilde - g_self||^2.
  double qp_eps_sq = 0.0;
  double bytes_sent = 0.0;
  int qp_fast_path_count = 0;
  int qp_unconverged_count = 0;
  // Largest |p - delta - e| over all compressions this round.
  double ef_residual = 0.0;
};

// Everything a round reads besides the agent snapshot.
struct RoundContext {
  const ModelSpec* spec = nullptr;
  // The current mini-batch of every agent, indexed by agent.
  std::span<const Batch> batches;
  int round = 0;
  int epoch = 0;
  int threads = 1;
  int float_bits = 64;
};

struct RoundResult {
  std::vector<AgentState> agents;
  RoundStats stats;
};

// Cross-gradient aggregation: per agent, the self-gradient and the gradients
// of every neighbour's loss at this agent's parameters are projected by the
// QP, then v <- beta v - alpha g_tilde and x <- sum_l pi_jl x_l + v. All reads
// come from `agents`, so the round is synchronous.
RoundResult CgaRound(std::span<const AgentState> agents, const MixingMatrix& mixing,
                     const RoundContext& ctx, const Hyper& hyper);

// CGA with every gradient passed through scaled-sign compression with error
// feedback before entering the QP.
RoundResult CompCgaRound(std::span<const AgentState> agents,
                         const MixingMatrix& mixing, const RoundContext& ctx,
                         const Hyper& hyper);

// Momentum decentralized SGD on self-gradients only.
RoundResult DpmsgdRound(std::span<const AgentState> agents,
                        const MixingMatrix& mixing, const RoundContext& ctx,
                        const Hyper& hyper);

RoundResult RunRound(Algorithm algorithm, std::span<const AgentState> agents,
                     const MixingMatrix& mixing, const RoundContext& ctx,
                     const Hyper& hyper);

struct MomentumUpdate {
  FlatParams x;
  Eigen::VectorXd v;
};

// v <- beta v_prev - alpha g, x <- w + v.
MomentumUpdate MomentumStep(const Eigen::VectorXd& w, const Eigen::VectorXd& v_prev,
                            const Eigen::VectorXd& g, double alpha, double beta);

struct Compressed {
  Eigen::VectorXd delta;  // (||p||_1 / d) sgn(p), sgn(0) = 0
  Eigen::VectorXd err;    // p - delta
};

Compressed CompressSign(const Eigen::VectorXd& p);

}  // namespace cga

#endif  // CGA_OPTIMIZERS_H_
