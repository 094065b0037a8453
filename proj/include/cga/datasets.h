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

#ifndef CGA_DATASETS_H_
#define CGA_DATASETS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "cga/neural.h"

namespace cga {

struct Dataset {
  RowMatrix inputs;  // n x dim, features in [0, 1]
  std::vector<int> labels;
  int n_classes = 0;

  size_t size() const { return labels.size(); }
  Eigen::Index dim() const { return inputs.cols(); }
  // Throws DataError on label/shape inconsistencies.
  void Validate() const;
  Batch Gather(std::span<const size_t> indices) const;
  Batch All() const;
};

enum class PartitionMode { kIid, kNonIidByClass };

// Accepts "iid" and "noniid".
PartitionMode ParsePartitionMode(std::string_view name);
std::string_view PartitionModeName(PartitionMode mode);

struct Partition {
  std::vector<std::vector<size_t>> assignments;  // one ascending list per agent
  PartitionMode mode = PartitionMode::kIid;

  int n_agents() const { return static_cast<int>(assignments.size()); }
};

// Gaussian blobs around unit-separated class means. Class c < dim is centred
// on 0.15 + e_c/sqrt(2); later classes use normalised pairs of axes. Values
// are clamped to [0, 1]. Samples are ordered class-major.
Dataset SynthBlobs(int n_classes, int dim, int per_class, double spread,
                   uint64_t seed);

// MNIST-style IDX files: big-endian, magic 0x00000803 (uint8 images) and
// 0x00000801 (uint8 labels). Pixels are divided by 255.
Dataset LoadIdx(const std::filesystem::path& images,
                const std::filesystem::path& labels);

// One sample per line: label, then features. A first line whose label field
// is not an integer is treated as a header. n_classes = max label + 1.
Dataset LoadCsv(const std::filesystem::path& path);

// Rescales every feature of both sets to [0, 1] using the first set's range.
void MinMaxScale(Dataset& fit, Dataset& other);

// IID: seeded global shuffle dealt round-robin.
// NonIidByClass, N <= C: agent i holds classes [iC/N, (i+1)C/N).
// NonIidByClass, N > C: classes receive N/C or N/C+1 agents (earlier classes
// take the remainder); each class is shuffled and cut into that many
// contiguous chunks, and chunks go to a seeded permutation of the agents.
Partition MakePartition(const Dataset& data, int n_agents, PartitionMode mode,
                        uint64_t seed);

// Disjoint exact cover of [0, n).
bool IsExactCover(const Partition& p, size_t n);

// Sorted distinct labels held by each agent.
std::vector<std::vector<int>> LabelSets(const Dataset& data, const Partition& p);

// For each agent, the indices of `test` whose label the agent holds in
// training. This is how local test sets mirror the training partition.
std::vector<std::vector<size_t>> MirrorTestSets(
    const Dataset& test, const std::vector<std::vector<int>>& label_sets);

// Per-epoch shuffled index batches; the last short batch is kept.
std::vector<std::vector<size_t>> MinibatchIndices(std::span<const size_t> indices,
                                                  int batch_size, int epoch,
                                                  uint64_t seed);

std::vector<Batch> Minibatches(const Dataset& data, std::span<const size_t> indices,
                               int batch_size, int epoch, uint64_t seed);

}  // namespace cga

#endif  // CGA_DATASETS_H_
