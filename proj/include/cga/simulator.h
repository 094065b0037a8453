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

#ifndef CGA_SIMULATOR_H_
#define CGA_SIMULATOR_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cga/datasets.h"
#include "cga/neural.h"
#include "cga/optimizers.h"
#include "cga/topology.h"

namespace cga {

struct DatasetSource {
  enum class Kind { kSynthetic, kIdx, kCsv };
  Kind kind = Kind::kSynthetic;

  // Synthetic blobs.
  int n_classes = 10;
  int dim = 16;
  int per_class = 200;
  int test_per_class = 50;
  double spread = 0.3;
  std::optional<uint64_t> seed;  // derived from the master seed when absent

  // File sources.
  std::filesystem::path train_images, train_labels, test_images, test_labels;
  std::filesystem::path train_csv, test_csv;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kCga;
  GraphKind topology = GraphKind::kFullyConnected;
  int n_agents = 5;
  DatasetSource dataset;
  PartitionMode partition = PartitionMode::kNonIidByClass;
  // Hidden layer widths; input and output sizes come from the data.
  std::vector<int> hidden = {64, 32};
  std::optional<uint64_t> model_seed;
  Hyper hyper;
  int epochs = 1;
  uint64_t master_seed = 0;
  // Evaluate every this many rounds; 0 evaluates at the end of each epoch.
  // The last round is always evaluated.
  int eval_every = 0;
  int float_bits = 64;
  // Worker threads for per-agent work. Does not affect results.
  int threads = 1;
};

struct MetricsRecord {
  int round = 0;
  int epoch = 0;
  double mean_train_loss = 0.0;
  double consensus_error = 0.0;
  std::optional<double> test_accuracy;
  double qp_eps_sq = 0.0;
  double cumulative_bytes = 0.0;

  // Diagnostics that are not part of the CSV.
  double ef_residual = 0.0;
  int qp_fast_path_count = 0;
  int qp_unconverged_count = 0;
};

using MetricsSink = std::function<void(const MetricsRecord&)>;

struct ExperimentResult {
  std::vector<MetricsRecord> records;
  FlatParams consensus;
  double final_accuracy = 0.0;
  int rounds_per_epoch = 0;
  double bytes_per_round = 0.0;
};

// Train and test data as configured; synthetic test blobs use a seed derived
// from the training seed. CSV features are min-max scaled on the training set.
struct LoadedData {
  Dataset train;
  Dataset test;
};
LoadedData LoadData(const ExperimentConfig& cfg);

// Input and output sizes filled in from the data.
ModelSpec ResolveModel(const ExperimentConfig& cfg, const Dataset& train);

Partition PartitionFor(const ExperimentConfig& cfg, const Dataset& train);

// Builds the topology and partition, starts every agent from one shared
// initialisation, runs epochs x rounds_per_epoch synchronous rounds and emits
// one record per round (a single round-0 record when epochs == 0). Fully
// determined by the config. Errors carry round and agent context.
ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const MetricsSink& sink = {});

// (1/N) sum_i ||x_bar - x_i||^2 with x_bar the coordinatewise mean.
double ConsensusError(std::span<const AgentState> agents);

FlatParams ConsensusParams(std::span<const AgentState> agents);

// Mean of the consensus model's accuracy on each agent's local test set.
double EvaluateConsensus(const ModelSpec& spec, std::span<const AgentState> agents,
                         std::span<const Batch> local_tests);

inline constexpr const char* kMetricsHeader =
    "round,epoch,mean_train_loss,consensus_error,test_accuracy,qp_eps_sq,"
    "cumulative_bytes";

std::string FormatMetricsRow(const MetricsRecord& r);

// Writes the header and then one flushed row per record.
class CsvMetricsWriter {
 public:
  explicit CsvMetricsWriter(std::ostream& os);
  void operator()(const MetricsRecord& r);

 private:
  std::ostream& os_;
};

}  // namespace cga

#endif  // CGA_SIMULATOR_H_
