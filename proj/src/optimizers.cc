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

#include "cga/optimizers.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <utility>

#include "cga/comm_cost.h"
#include "cga/errors.h"

namespace cga {

Algorithm ParseAlgorithm(std::string_view name) {
  if (name == "cga") return Algorithm::kCga;
  if (name == "compcga") return Algorithm::kCompCga;
  if (name == "dpmsgd") return Algorithm::kDpmsgd;
  throw SimulationError("unknown algorithm '" + std::string(name) +
                        "' (expected cga, compcga or dpmsgd)");
}

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kCga:
      return "cga";
    case Algorithm::kCompCga:
      return "compcga";
    case Algorithm::kDpmsgd:
      return "dpmsgd";
  }
  return "unknown";
}

AgentState MakeAgent(const FlatParams& x0) {
  AgentState a;
  a.x = x0;
  a.v = Eigen::VectorXd::Zero(x0.size());
  a.e_self = Eigen::VectorXd::Zero(x0.size());
  return a;
}

void Hyper::Validate() const {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw ConfigError("hyper.alpha0", "must be a positive number");
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw ConfigError("hyper.beta", "must lie in [0, 1)");
  }
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw ConfigError("hyper.decay", "must lie in (0, 1]");
  }
  if (batch_size < 1) throw ConfigError("hyper.batch_size", "must be >= 1");
  if (!(qp.tol > 0.0)) throw ConfigError("hyper.qp_tol", "must be positive");
  if (qp.max_iter < 0) throw ConfigError("hyper.qp_max_iter", "must be >= 0");
}

double StepSize(const Hyper& hyper, int epoch) {
  return hyper.alpha0 * std::pow(hyper.decay, epoch);
}

MomentumUpdate MomentumStep(const Eigen::VectorXd& w, const Eigen::VectorXd& v_prev,
                            const Eigen::VectorXd& g, double alpha, double beta) {
  MomentumUpdate u;
  u.v = beta * v_prev - alpha * g;
  u.x = w + u.v;
  return u;
}

Compressed CompressSign(const Eigen::VectorXd& p) {
  const double scale = p.lpNorm<1>() / static_cast<double>(p.size());
  Compressed c;
  c.delta = p.unaryExpr([scale](double v) {
    return v > 0.0 ? scale : (v < 0.0 ? -scale : 0.0);
  });
  c.err = p - c.delta;
  return c;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index writes
// only its own output slot.
template <typename Fn>
void ParallelFor(int n, int threads, Fn&& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = w; i < n; i += workers) fn(i);
        } catch (...) {
          errors[static_cast<size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void CheckRound(std::span<const AgentState> agents, const MixingMatrix& mixing,
                const RoundContext& ctx) {
  if (ctx.spec == nullptr) throw SimulationError("round context has no model");
  const auto n = static_cast<int>(agents.size());
  if (n != mixing.n_agents()) {
    throw SimulationError(std::to_string(n) + " agents but mixing matrix is " +
                          std::to_string(mixing.n_agents()) + "x" +
                          std::to_string(mixing.n_agents()));
  }
  if (static_cast<int>(ctx.batches.size()) != n) {
    throw SimulationError("need one batch per agent");
  }
  const Eigen::Index d = ctx.spec->ParamCount();
  for (const auto& a : agents) {
    if (a.x.size() != d || a.v.size() != d || a.e_self.size() != d) {
      throw SimulationError("agent state dimension mismatch");
    }
  }
}

Eigen::VectorXd MixParameters(std::span<const AgentState> agents,
                              const MixingMatrix& mixing, int j) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(agents[j].x.size());
  for (int l = 0; l < mixing.n_agents(); ++l) {
    const double pi = mixing(j, l);
    if (pi > 0.0) w += pi * agents[l].x;
  }
  return w;
}

std::string Where(const RoundContext& ctx, int agent) {
  return "round " + std::to_string(ctx.round) + ", agent " + std::to_string(agent);
}

struct AgentWork {
  AgentState next;
  std::vector<std::pair<int, Eigen::VectorXd>> cross_errors;  // (holder l, e^{jl})
  double loss = 0.0;
  double eps_sq = 0.0;
  bool fast_path = false;
  bool converged = true;
  double ef_residual = 0.0;
};

double EfResidual(const Eigen::VectorXd& p, const Compressed& c) {
  return (p - c.delta - c.err).lpNorm<Eigen::Infinity>();
}

enum class Mode { kPlain, kCompressed, kSelfOnly };

AgentWork StepAgent(std::span<const AgentState> agents, const MixingMatrix& mixing,
                    const RoundContext& ctx, const Hyper& hyper, int j, Mode mode) {
  const ModelSpec& spec = *ctx.spec;
  const AgentState& self = agents[j];
  AgentWork work;
  work.next = self;

  LossGrad own = LossAndGrad(spec, self.x, ctx.batches[j]);
  work.loss = own.loss;

  Eigen::VectorXd g_tilde;
  Eigen::VectorXd p_self;
  Compressed c_self;
  if (mode == Mode::kSelfOnly) {
    g_tilde = own.grad;
  } else {
    const std::vector<int> nbrs = Neighbors(mixing, j);
    GradientStack stack;
    if (mode == Mode::kCompressed) {
      p_self = own.grad + self.e_self;
      c_self = CompressSign(p_self);
      work.ef_residual = EfResidual(p_self, c_self);
      stack.g = c_self.delta;
    } else {
      stack.g = own.grad;
    }
    stack.G.resize(static_cast<Eigen::Index>(nbrs.size()), own.grad.size());
    for (size_t r = 0; r < nbrs.size(); ++r) {
      const int l = nbrs[r];
      // Gradient of neighbour l's loss at this agent's parameters.
      Eigen::VectorXd cross = LossAndGrad(spec, self.x, ctx.batches[l]).grad;
      if (mode == Mode::kCompressed) {
        const auto& held = agents[l].e_cross;
        auto it = held.find(j);
        Eigen::VectorXd p = it == held.end() ? cross : Eigen::VectorXd(cross + it->second);
        Compressed c = CompressSign(p);
        work.ef_residual = std::max(work.ef_residual, EfResidual(p, c));
        stack.G.row(static_cast<Eigen::Index>(r)) = c.delta.transpose();
        work.cross_errors.emplace_back(l, std::move(c.err));
      } else {
        stack.G.row(static_cast<Eigen::Index>(r)) = cross.transpose();
      }
    }
    Projection proj = ProjectGradient(stack, hyper.qp);
    work.fast_path = proj.fast_path;
    work.converged = proj.dual.converged;
    g_tilde = std::move(proj.z);
  }

  work.eps_sq = (g_tilde - own.grad).squaredNorm();
  const Eigen::VectorXd w = MixParameters(agents, mixing, j);
  MomentumUpdate step =
      MomentumStep(w, self.v, g_tilde, StepSize(hyper, ctx.epoch), hyper.beta);
  work.next.x = std::move(step.x);
  work.next.v = std::move(step.v);
  if (mode == Mode::kCompressed) work.next.e_self = std::move(c_self.err);
  return work;
}

RoundResult Run(std::span<const AgentState> agents, const MixingMatrix& mixing,
                const RoundContext& ctx, const Hyper& hyper, Mode mode,
                Algorithm algorithm) {
  CheckRound(agents, mixing, ctx);
  const int n = static_cast<int>(agents.size());
  std::vector<AgentWork> work(static_cast<size_t>(n));
  ParallelFor(n, ctx.threads, [&](int j) {
    try {
      work[static_cast<size_t>(j)] = StepAgent(agents, mixing, ctx, hyper, j, mode);
    } catch (const SimulationError&) {
      throw;
    } catch (const Error& e) {
      throw SimulationError(Where(ctx, j) + ": " + e.what());
    }
  });

  RoundResult out;
  out.agents.reserve(static_cast<size_t>(n));
  for (auto& w : work) out.agents.push_back(std::move(w.next));
  RoundStats& s = out.stats;
  for (int j = 0; j < n; ++j) {
    auto& w = work[static_cast<size_t>(j)];
    for (auto& [holder, err] : w.cross_errors) {
      out.agents[static_cast<size_t>(holder)].e_cross[j] = std::move(err);
    }
    s.mean_loss += w.loss;
    s.qp_eps_sq += w.eps_sq;
    s.qp_fast_path_count += w.fast_path ? 1 : 0;
    s.qp_unconverged_count += w.converged ? 0 : 1;
    s.ef_residual = std::max(s.ef_residual, w.ef_residual);
  }
  s.mean_loss /= n;
  s.qp_eps_sq /= n;
  s.bytes_sent = CommCost(algorithm, ctx.spec->ParamCount(),
                          mixing.OffDiagonalNonzeros(), ctx.float_bits);
  return out;
}

}  // namespace

RoundResult CgaRound(std::span<const AgentState> agents, const MixingMatrix& mixing,
                     const RoundContext& ctx, const Hyper& hyper) {
  return Run(agents, mixing, ctx, hyper, Mode::kPlain, Algorithm::kCga);
}

RoundResult CompCgaRound(std::span<const AgentState> agents,
                         const MixingMatrix& mixing, const RoundContext& ctx,
                         const Hyper& hyper) {
  return Run(agents, mixing, ctx, hyper, Mode::kCompressed, Algorithm::kCompCga);
}

RoundResult DpmsgdRound(std::span<const AgentState> agents,
                        const MixingMatrix& mixing, const RoundContext& ctx,
                        const Hyper& hyper) {
  return Run(agents, mixing, ctx, hyper, Mode::kSelfOnly, Algorithm::kDpmsgd);
}

RoundResult RunRound(Algorithm algorithm, std::span<const AgentState> agents,
                     const MixingMatrix& mixing, const RoundContext& ctx,
                     const Hyper& hyper) {
  switch (algorithm) {
    case Algorithm::kCga:
      return CgaRound(agents, mixing, ctx, hyper);
    case Algorithm::kCompCga:
      return CompCgaRound(agents, mixing, ctx, hyper);
    case Algorithm::kDpmsgd:
      return DpmsgdRound(agents, mixing, ctx, hyper);
  }
  throw SimulationError("unknown algorithm");
}

}  // namespace cga
