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

#include "cga/simulator.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cga/comm_cost.h"
#include "cga/errors.h"
#include "cga/rng.h"

namespace cga {

double CommCost(Algorithm algorithm, int64_t model_size, int64_t nonzeros,
                int float_bits) {
  if (model_size < 1 || nonzeros < 0 || float_bits < 1) {
    throw SimulationError("communication cost needs positive model size and "
                          "float width and a nonnegative edge count");
  }
  const double payload = static_cast<double>(model_size) * static_cast<double>(nonzeros);
  switch (algorithm) {
    case Algorithm::kCga:
      return 2.0 * payload;
    case Algorithm::kDpmsgd:
      return payload;
    case Algorithm::kCompCga:
      return 2.0 * payload / float_bits;
  }
  throw SimulationError("unknown algorithm");
}

double ConsensusError(std::span<const AgentState> agents) {
  if (agents.empty()) return 0.0;
  const FlatParams mean = ConsensusParams(agents);
  double total = 0.0;
  for (const auto& a : agents) total += (mean - a.x).squaredNorm();
  return total / static_cast<double>(agents.size());
}

FlatParams ConsensusParams(std::span<const AgentState> agents) {
  if (agents.empty()) throw SimulationError("no agents");
  FlatParams sum = FlatParams::Zero(agents.front().x.size());
  for (const auto& a : agents) sum += a.x;
  return sum / static_cast<double>(agents.size());
}

double EvaluateConsensus(const ModelSpec& spec, std::span<const AgentState> agents,
                         std::span<const Batch> local_tests) {
  if (local_tests.empty()) throw SimulationError("no local test sets");
  const FlatParams mean = ConsensusParams(agents);
  double total = 0.0;
  for (size_t i = 0; i < local_tests.size(); ++i) {
    if (local_tests[i].size() == 0) {
      throw SimulationError("agent " + std::to_string(i) + " has an empty test set");
    }
    total += PredictAccuracy(spec, mean, local_tests[i]);
  }
  return total / static_cast<double>(local_tests.size());
}

LoadedData LoadData(const ExperimentConfig& cfg) {
  const DatasetSource& src = cfg.dataset;
  LoadedData out;
  switch (src.kind) {
    case DatasetSource::Kind::kSynthetic: {
      const uint64_t seed = src.seed.value_or(DeriveSeed(cfg.master_seed, "data"));
      out.train = SynthBlobs(src.n_classes, src.dim, src.per_class, src.spread, seed);
      out.test = SynthBlobs(src.n_classes, src.dim, src.test_per_class, src.spread,
                            DeriveSeed(seed, "test"));
      break;
    }
    case DatasetSource::Kind::kIdx:
      out.train = LoadIdx(src.train_images, src.train_labels);
      out.test = LoadIdx(src.test_images, src.test_labels);
      break;
    case DatasetSource::Kind::kCsv:
      out.train = LoadCsv(src.train_csv);
      out.test = LoadCsv(src.test_csv);
      MinMaxScale(out.train, out.test);
      break;
  }
  if (out.train.dim() != out.test.dim()) {
    throw DataError("train and test feature dimensions differ");
  }
  // A test label outside the training classes cannot be predicted.
  out.test.n_classes = std::max(out.test.n_classes, out.train.n_classes);
  out.train.n_classes = out.test.n_classes;
  return out;
}

ModelSpec ResolveModel(const ExperimentConfig& cfg, const Dataset& train) {
  ModelSpec spec;
  spec.layer_sizes.push_back(static_cast<int>(train.dim()));
  spec.layer_sizes.insert(spec.layer_sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  spec.layer_sizes.push_back(train.n_classes);
  spec.seed = cfg.model_seed.value_or(DeriveSeed(cfg.master_seed, "model"));
  spec.Validate();
  return spec;
}

Partition PartitionFor(const ExperimentConfig& cfg, const Dataset& train) {
  return MakePartition(train, cfg.n_agents, cfg.partition,
                       DeriveSeed(cfg.master_seed, "partition"));
}

namespace {

double MeanFullLoss(const ModelSpec& spec, std::span<const AgentState> agents,
                    const Dataset& train, const Partition& partition) {
  double total = 0.0;
  for (size_t a = 0; a < agents.size(); ++a) {
    total += Loss(spec, agents[a].x, train.Gather(partition.assignments[a]));
  }
  return total / static_cast<double>(agents.size());
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& cfg, const MetricsSink& sink) {
  if (cfg.epochs < 0) throw SimulationError("epochs must be >= 0");
  cfg.hyper.Validate();

  const LoadedData data = LoadData(cfg);
  const MixingMatrix mixing = BuildTopology(cfg.topology, cfg.n_agents);
  const Partition partition = PartitionFor(cfg, data.train);
  size_t smallest = std::numeric_limits<size_t>::max();
  for (int a = 0; a < partition.n_agents(); ++a) {
    if (partition.assignments[a].empty()) {
      throw SimulationError("agent " + std::to_string(a) + " received no training data");
    }
    smallest = std::min(smallest, partition.assignments[a].size());
  }

  std::vector<Batch> local_tests;
  for (const auto& idx : MirrorTestSets(data.test, LabelSets(data.train, partition))) {
    local_tests.push_back(data.test.Gather(idx));
  }

  const ModelSpec spec = ResolveModel(cfg, data.train);
  const FlatParams x0 = InitParams(spec);
  std::vector<AgentState> agents(static_cast<size_t>(cfg.n_agents), MakeAgent(x0));

  ExperimentResult result;
  const auto bs = static_cast<size_t>(cfg.hyper.batch_size);
  result.rounds_per_epoch = static_cast<int>((smallest + bs - 1) / bs);
  result.bytes_per_round = CommCost(cfg.algorithm, spec.ParamCount(),
                                    mixing.OffDiagonalNonzeros(), cfg.float_bits);
  const int eval_every = cfg.eval_every > 0 ? cfg.eval_every : result.rounds_per_epoch;

  auto emit = [&](const MetricsRecord& r) {
    result.records.push_back(r);
    if (sink) sink(r);
  };

  if (cfg.epochs == 0) {
    MetricsRecord r;
    r.mean_train_loss = MeanFullLoss(spec, agents, data.train, partition);
    r.consensus_error = ConsensusError(agents);
    r.test_accuracy = EvaluateConsensus(spec, agents, local_tests);
    result.final_accuracy = *r.test_accuracy;
    emit(r);
    result.consensus = ConsensusParams(agents);
    return result;
  }

  const int total_rounds = cfg.epochs * result.rounds_per_epoch;
  int round = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::vector<Batch>> epoch_batches;
    for (int a = 0; a < cfg.n_agents; ++a) {
      epoch_batches.push_back(
          Minibatches(data.train, partition.assignments[a], cfg.hyper.batch_size, epoch,
                      DeriveSeed(cfg.master_seed, "batches", static_cast<uint64_t>(a))));
    }
    for (int r = 0; r < result.rounds_per_epoch; ++r) {
      ++round;
      std::vector<Batch> current;
      current.reserve(epoch_batches.size());
      for (const auto& b : epoch_batches) current.push_back(b[static_cast<size_t>(r)]);

      RoundContext ctx;
      ctx.spec = &spec;
      ctx.batches = current;
      ctx.round = round;
      ctx.epoch = epoch;
      ctx.threads = cfg.threads;
      ctx.float_bits = cfg.float_bits;
      RoundResult next = RunRound(cfg.algorithm, agents, mixing, ctx, cfg.hyper);
      agents = std::move(next.agents);

      MetricsRecord rec;
      rec.round = round;
      rec.epoch = epoch;
      rec.mean_train_loss = next.stats.mean_loss;
      rec.consensus_error = ConsensusError(agents);
      rec.qp_eps_sq = next.stats.qp_eps_sq;
      rec.cumulative_bytes = static_cast<double>(round) * result.bytes_per_round;
      rec.ef_residual = next.stats.ef_residual;
      rec.qp_fast_path_count = next.stats.qp_fast_path_count;
      rec.qp_unconverged_count = next.stats.qp_unconverged_count;
      if (round % eval_every == 0 || round == total_rounds) {
        rec.test_accuracy = EvaluateConsensus(spec, agents, local_tests);
        result.final_accuracy = *rec.test_accuracy;
      }
      emit(rec);
    }
  }
  result.consensus = ConsensusParams(agents);
  return result;
}

namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string FormatMetricsRow(const MetricsRecord& r) {
  std::string row = std::to_string(r.round) + "," + std::to_string(r.epoch) + "," +
                    Num(r.mean_train_loss) + "," + Num(r.consensus_error) + ",";
  if (r.test_accuracy) row += Num(*r.test_accuracy);
  row += "," + Num(r.qp_eps_sq) + "," + Num(r.cumulative_bytes);
  return row;
}

CsvMetricsWriter::CsvMetricsWriter(std::ostream& os) : os_(os) {
  os_ << kMetricsHeader << '\n';
  os_.flush();
}

void CsvMetricsWriter::operator()(const MetricsRecord& r) {
  os_ << FormatMetricsRow(r) << '\n';
  os_.flush();
}

}  // namespace cga
