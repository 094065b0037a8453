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
//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cga/comm_cost.h"
#include "cga/datasets.h"
#include "cga/neural.h"
#include "cga/optimizers.h"
#include "cga/qp_projection.h"
#include "cga/simulator.h"
#include "cga/topology.h"
#include "oracles.h"

namespace cga {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void Report(int id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

bool BitEqual(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<size_t>(a.size())) == 0;
}

void QpOracleEquivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> dim(1, 5), rows(0, 4);
  double worst_gap = 0.0;
  int kkt_failures = 0;
  for (int t = 0; t < 200; ++t) {
    const GradientStack s = testing::RandomQp(rng, dim(rng), rows(rng));
    QpOptions opts;
    const Projection p = ProjectGradient(s, opts);
    const double gap =
        std::abs(PrimalObjective(s, p.z) - PrimalObjective(s, BruteForceOracle(s)));
    worst_gap = std::max(worst_gap, gap);
    if (!p.kkt.Within(opts.tol)) ++kkt_failures;
  }
  const double secs = Seconds(start);
  Report(1, worst_gap <= 1e-6 && kkt_failures == 0 && secs < 5.0,
         Fmt("200 QP instances, max objective gap %.3g (<= 1e-6), KKT failures %d, %.2fs "
             "(< 5s)",
             worst_gap, kkt_failures, secs));
}

void GradientCorrectness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260102);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const testing::MlpInstance inst = testing::RandomMlp(rng);
    const FlatParams analytic = LossAndGrad(inst.spec, inst.params, inst.batch).grad;
    const FlatParams numeric = testing::FiniteDifferenceGrad(inst.spec, inst.params, inst.batch);
    worst = std::max(worst, testing::MaxRelativeError(analytic, numeric));
  }
  const double secs = Seconds(start);
  Report(2, worst < 1e-4 && secs < 30.0,
         Fmt("20 MLP instances, max relative gradient error %.3g (< 1e-4), %.2fs (< 30s)",
             worst, secs));
}

void TopologySpectra() {
  const double ring4 = ComputeSpectralReport(BuildTopology(GraphKind::kRing, 4)).rho_sqrt;
  const double ring3 = ComputeSpectralReport(BuildTopology(GraphKind::kRing, 3)).rho_sqrt;
  double full_worst = 0.0, stoch_worst = 0.0;
  for (int n = 1; n <= 32; ++n) {
    const MixingMatrix full = BuildTopology(GraphKind::kFullyConnected, n);
    full_worst = std::max(full_worst, ComputeSpectralReport(full).rho_sqrt);
    for (GraphKind k : {GraphKind::kFullyConnected, GraphKind::kRing, GraphKind::kBipartite}) {
      if (k == GraphKind::kRing && n < 3) continue;
      if (k == GraphKind::kBipartite && (n < 2 || n % 2 != 0)) continue;
      const Eigen::MatrixXd w = BuildTopology(k, n).weights();
      const double rows = (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
      const double cols = (w.colwise().sum().array() - 1.0).abs().maxCoeff();
      stoch_worst = std::max({stoch_worst, rows, cols});
    }
  }
  const bool ok = std::abs(ring4 - 1.0 / 3.0) <= 1e-9 && ring3 <= 1e-9 &&
                  full_worst <= 1e-9 && stoch_worst <= 1e-12;
  Report(3, ok,
         Fmt("ring(4) rho_sqrt %.12f (1/3 +- 1e-9), ring(3) %.3g, full n<=32 max %.3g "
             "(<= 1e-9), doubly stochastic error %.3g (<= 1e-12)",
             ring4, ring3, full_worst, stoch_worst));
}

void TrajectoryEquivalences() {
  const Dataset data = SynthBlobs(4, 5, 40, 0.2, 11);
  const ModelSpec spec{{5, 12, 4}, Activation::kReLU, 5};
  Hyper hyper;
  hyper.alpha0 = 0.05;
  hyper.beta = 0.9;
  hyper.decay = 0.97;
  std::vector<size_t> all(data.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto batch_for = [&](int round) {
    return Minibatches(data, all, 16, round / 10, 77)[static_cast<size_t>(round % 10)];
  };

  // CGA with one agent against a hand-written momentum SGD loop.
  bool single_ok = true;
  {
    const MixingMatrix solo = BuildTopology(GraphKind::kFullyConnected, 1);
    std::vector<AgentState> agents = {MakeAgent(InitParams(spec))};
    FlatParams x = agents[0].x;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
    for (int round = 0; round < 100 && single_ok; ++round) {
      std::vector<Batch> b = {batch_for(round)};
      RoundContext ctx;
      ctx.spec = &spec;
      ctx.batches = b;
      ctx.round = round + 1;
      ctx.epoch = round / 10;
      agents = CgaRound(agents, solo, ctx, hyper).agents;
      const FlatParams g = LossAndGrad(spec, x, b[0]).grad;
      v = hyper.beta * v - StepSize(hyper, ctx.epoch) * g;
      x = x + v;
      single_ok = BitEqual(agents[0].x, x);
    }
  }

  // Identical starts and batches: every projection is a no-op.
  bool sym_ok = true;
  {
    const MixingMatrix ring = BuildTopology(GraphKind::kRing, 5);
    std::vector<AgentState> cga(5, MakeAgent(InitParams(spec)));
    std::vector<AgentState> dp = cga;
    for (int round = 0; round < 50 && sym_ok; ++round) {
      std::vector<Batch> b(5, batch_for(round));
      RoundContext ctx;
      ctx.spec = &spec;
      ctx.batches = b;
      ctx.round = round + 1;
      ctx.epoch = round / 10;
      cga = CgaRound(cga, ring, ctx, hyper).agents;
      dp = DpmsgdRound(dp, ring, ctx, hyper).agents;
      for (int j = 0; j < 5; ++j) sym_ok = sym_ok && BitEqual(cga[j].x, dp[j].x);
    }
  }
  Report(4, single_ok && sym_ok,
         Fmt("CGA(N=1) == momentum SGD over 100 rounds: %s; symmetric CGA == DPMSGD over "
             "50 rounds: %s",
             single_ok ? "bit-exact" : "differs", sym_ok ? "bit-exact" : "differs"));
}

// The blob experiment. Class spread is not pinned by the criterion; 0.15
// keeps the ten classes separable by a small MLP.
ExperimentConfig BlobExperiment(Algorithm alg, uint64_t seed) {
  ExperimentConfig cfg;
  cfg.algorithm = alg;
  cfg.topology = GraphKind::kFullyConnected;
  cfg.n_agents = 5;
  cfg.dataset.n_classes = 10;
  cfg.dataset.dim = 16;
  cfg.dataset.per_class = 200;
  cfg.dataset.test_per_class = 50;
  cfg.dataset.spread = 0.15;
  cfg.partition = PartitionMode::kNonIidByClass;
  cfg.hidden = {64, 32};
  cfg.hyper.alpha0 = 0.01;
  cfg.hyper.beta = 0.98;
  cfg.hyper.decay = 0.981;
  cfg.hyper.batch_size = 32;
  cfg.epochs = 30;
  cfg.master_seed = seed;
  return cfg;
}

struct Run {
  ExperimentResult result;
  std::string csv;
  double seconds = 0.0;
};

Run Execute(const ExperimentConfig& cfg) {
  Run run;
  std::ostringstream os;
  CsvMetricsWriter writer(os);
  const auto start = Clock::now();
  run.result = RunExperiment(cfg, std::ref(writer));
  run.seconds = Seconds(start);
  run.csv = os.str();
  return run;
}

double EndOfEpochConsensus(const ExperimentResult& r, int epoch) {
  return r.records[static_cast<size_t>((epoch + 1) * r.rounds_per_epoch - 1)].consensus_error;
}

void BlobCriteria() {
  const Run cga = Execute(BlobExperiment(Algorithm::kCga, 1));
  const Run dp = Execute(BlobExperiment(Algorithm::kDpmsgd, 1));
  const Run comp = Execute(BlobExperiment(Algorithm::kCompCga, 1));

  for (uint64_t seed : {2u, 3u}) {
    const double a = RunExperiment(BlobExperiment(Algorithm::kCga, seed)).final_accuracy;
    const double b = RunExperiment(BlobExperiment(Algorithm::kDpmsgd, seed)).final_accuracy;
    const double c = RunExperiment(BlobExperiment(Algorithm::kCompCga, seed)).final_accuracy;
    std::printf("[INFO] seed %llu: cga %.4f dpmsgd %.4f compcga %.4f\n",
                static_cast<unsigned long long>(seed), a, b, c);
  }

  const double acc_cga = cga.result.final_accuracy;
  const double acc_dp = dp.result.final_accuracy;
  const double acc_comp = comp.result.final_accuracy;
  const double secs = cga.seconds + dp.seconds;
  Report(5, acc_cga >= 0.90 && acc_cga - acc_dp >= 0.10 && secs < 300.0,
         Fmt("seed 1: CGA accuracy %.4f (>= 0.90), DPMSGD %.4f, gap %.4f (>= 0.10), %.1fs "
             "(< 300s)",
             acc_cga, acc_dp, acc_cga - acc_dp, secs));

  double ef_worst = 0.0;
  for (const auto& r : comp.result.records) ef_worst = std::max(ef_worst, r.ef_residual);
  Report(6, std::abs(acc_comp - acc_cga) <= 0.10 && ef_worst == 0.0,
         Fmt("CompCGA accuracy %.4f vs CGA %.4f (|diff| <= 0.10), max |p - delta - e| over "
             "%zu rounds %.3g (== 0)",
             acc_comp, acc_cga, comp.result.records.size(), ef_worst));

  bool comm_ok = cga.result.bytes_per_round == 2.0 * dp.result.bytes_per_round &&
                 comp.result.bytes_per_round == cga.result.bytes_per_round / 64.0;
  for (GraphKind k : {GraphKind::kFullyConnected, GraphKind::kRing, GraphKind::kBipartite}) {
    for (int64_t m : {1, 3530, 1000003}) {
      for (int bits : {16, 32, 64}) {
        const int64_t nb = BuildTopology(k, 6).OffDiagonalNonzeros();
        const double c = CommCost(Algorithm::kCga, m, nb, bits);
        comm_ok = comm_ok && c == 2.0 * CommCost(Algorithm::kDpmsgd, m, nb, bits) &&
                  CommCost(Algorithm::kCompCga, m, nb, bits) == c / bits;
      }
    }
  }
  Report(7, comm_ok,
         Fmt("per-round cost cga %.0f, dpmsgd %.0f, compcga %.0f (b = 64); cga == 2 dpmsgd "
             "and compcga == cga / b on all topologies and widths",
             cga.result.bytes_per_round, dp.result.bytes_per_round,
             comp.result.bytes_per_round));

  ExperimentConfig again = BlobExperiment(Algorithm::kCga, 1);
  const Run repeat = Execute(again);
  again.threads = 4;
  const Run threaded = Execute(again);
  Report(8, repeat.csv == cga.csv && threaded.csv == cga.csv,
         Fmt("CGA metrics CSV (%zu bytes): rerun %s, 4 threads %s", cga.csv.size(),
             repeat.csv == cga.csv ? "identical" : "differs",
             threaded.csv == cga.csv ? "identical" : "differs"));

  const double first = EndOfEpochConsensus(cga.result, 0);
  const double last = cga.result.records.back().consensus_error;
  Report(9, last < first,
         Fmt("CGA consensus error end of epoch 1 %.4g, final %.4g (final < epoch 1)", first,
             last));
}

}  // namespace
}  // namespace cga

int main() {
  cga::QpOracleEquivalence();
  cga::GradientCorrectness();
  cga::TopologySpectra();
  cga::TrajectoryEquivalences();
  cga::BlobCriteria();
  std::printf("%d criteria failed\n", cga::failures);
  return cga::failures == 0 ? 0 : 1;
}
