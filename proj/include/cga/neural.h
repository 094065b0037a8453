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

#ifndef CGA_NEURAL_H_
#define CGA_NEURAL_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace cga {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Model parameters as a single point in R^d. Layout per layer: weights
// (fan_out x fan_in, row-major), then biases (fan_out).
using FlatParams = Eigen::VectorXd;

enum class Activation { kReLU };

struct ModelSpec {
  std::vector<int> layer_sizes;  // input, hidden..., output
  Activation activation = Activation::kReLU;
  uint64_t seed = 0;

  // Throws ModelError if fewer than two layers or a non-positive size.
  void Validate() const;
  int input_dim() const { return layer_sizes.front(); }
  int n_classes() const { return layer_sizes.back(); }
  Eigen::Index ParamCount() const;
};

struct Batch {
  RowMatrix inputs;         // B x input_dim
  std::vector<int> labels;  // B entries in [0, n_classes)

  Eigen::Index size() const { return inputs.rows(); }
};

struct DenseLayer {
  RowMatrix weights;  // fan_out x fan_in
  Eigen::VectorXd bias;
};

// Glorot-uniform weights from a counter-based stream keyed by spec.seed,
// zero biases.
FlatParams InitParams(const ModelSpec& spec);

std::vector<DenseLayer> Unflatten(const ModelSpec& spec, const FlatParams& params);
FlatParams Flatten(const ModelSpec& spec, const std::vector<DenseLayer>& layers);

struct LossGrad {
  double loss = 0.0;
  FlatParams grad;
};

// Mean softmax cross-entropy over the batch and its exact gradient.
LossGrad LossAndGrad(const ModelSpec& spec, const FlatParams& params,
                     const Batch& batch);

// Loss only; used by finite-difference checks and diagnostics.
double Loss(const ModelSpec& spec, const FlatParams& params, const Batch& batch);

// Fraction of samples whose argmax (lowest index on ties) equals the label.
double PredictAccuracy(const ModelSpec& spec, const FlatParams& params,
                       const Batch& data);

// Checkpoint: "CGAP", uint32 version, uint64 d, then d float64, all
// little-endian.
void WriteCheckpoint(const std::filesystem::path& path, const FlatParams& params);
FlatParams ReadCheckpoint(const std::filesystem::path& path);

}  // namespace cga

#endif  // CGA_NEURAL_H_
