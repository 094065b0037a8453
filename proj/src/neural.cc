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

#include "cga/neural.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <string>

#include "cga/errors.h"
#include "cga/rng.h"

namespace cga {

namespace {

constexpr char kMagic[4] = {'C', 'G', 'A', 'P'};
constexpr uint32_t kCheckpointVersion = 1;

void CheckInputs(const ModelSpec& spec, const FlatParams& params,
                 const Batch& batch) {
  spec.Validate();
  if (params.size() != spec.ParamCount()) {
    throw ModelError("parameter vector has " + std::to_string(params.size()) +
                     " entries, model expects " +
                     std::to_string(spec.ParamCount()));
  }
  if (batch.size() < 1) throw ModelError("empty batch");
  if (batch.inputs.cols() != spec.input_dim()) {
    throw ModelError("batch inputs have " + std::to_string(batch.inputs.cols()) +
                     " features, model expects " +
                     std::to_string(spec.input_dim()));
  }
  if (static_cast<Eigen::Index>(batch.labels.size()) != batch.size()) {
    throw ModelError("label count does not match batch size");
  }
  for (int y : batch.labels) {
    if (y < 0 || y >= spec.n_classes()) {
      throw ModelError("label " + std::to_string(y) + " out of range");
    }
  }
  if (!params.allFinite() || !batch.inputs.allFinite()) {
    throw ModelError("non-finite parameters or inputs");
  }
}

using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;

struct Forward {
  std::vector<RowMatrix> activations;  // a_0 = inputs, ..., a_L = logits
};

Forward RunForward(const ModelSpec& spec, const FlatParams& params,
                   const RowMatrix& inputs) {
  const auto& sizes = spec.layer_sizes;
  const size_t layers = sizes.size() - 1;
  Forward f;
  f.activations.reserve(layers + 1);
  f.activations.push_back(inputs);
  Eigen::Index offset = 0;
  for (size_t l = 0; l < layers; ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    ConstRowMap w(params.data() + offset, out, in);
    offset += static_cast<Eigen::Index>(in) * out;
    Eigen::Map<const Eigen::RowVectorXd> b(params.data() + offset, out);
    offset += out;
    RowMatrix z = f.activations.back() * w.transpose();
    z.rowwise() += b;
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    f.activations.push_back(std::move(z));
  }
  return f;
}

// Row-wise log-softmax of the logits.
RowMatrix LogSoftmax(const RowMatrix& logits) {
  RowMatrix out = logits;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double mx = out.row(r).maxCoeff();
    out.row(r).array() -= mx;
    const double lse = std::log(out.row(r).array().exp().sum());
    out.row(r).array() -= lse;
  }
  return out;
}

}  // namespace

void ModelSpec::Validate() const {
  if (layer_sizes.size() < 2) {
    throw ModelError("model needs at least an input and an output layer");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw ModelError("layer sizes must be positive");
  }
}

Eigen::Index ModelSpec::ParamCount() const {
  Eigen::Index d = 0;
  for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    d += static_cast<Eigen::Index>(layer_sizes[l] + 1) * layer_sizes[l + 1];
  }
  return d;
}

FlatParams InitParams(const ModelSpec& spec) {
  spec.Validate();
  FlatParams p = FlatParams::Zero(spec.ParamCount());
  const CounterRng rng(DeriveSeed(spec.seed, "init"));
  Eigen::Index offset = 0;
  for (size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
    const int in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    const Eigen::Index count = static_cast<Eigen::Index>(in) * out;
    for (Eigen::Index k = 0; k < count; ++k) {
      const auto counter = static_cast<uint64_t>(offset + k);
      p[offset + k] = limit * (2.0 * rng.Uniform(counter) - 1.0);
    }
    offset += count + out;
  }
  return p;
}

std::vector<DenseLayer> Unflatten(const ModelSpec& spec, const FlatParams& params) {
  spec.Validate();
  if (params.size() != spec.ParamCount()) {
    throw ModelError("parameter vector does not match the model");
  }
  std::vector<DenseLayer> layers;
  Eigen::Index offset = 0;
  for (size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
    const int in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
    DenseLayer layer;
    layer.weights = ConstRowMap(params.data() + offset, out, in);
    offset += static_cast<Eigen::Index>(in) * out;
    layer.bias = params.segment(offset, out);
    offset += out;
    layers.push_back(std::move(layer));
  }
  return layers;
}

FlatParams Flatten(const ModelSpec& spec, const std::vector<DenseLayer>& layers) {
  spec.Validate();
  if (layers.size() + 1 != spec.layer_sizes.size()) {
    throw ModelError("layer count does not match the model");
  }
  FlatParams p(spec.ParamCount());
  Eigen::Index offset = 0;
  for (size_t l = 0; l < layers.size(); ++l) {
    const int in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
    if (layers[l].weights.rows() != out || layers[l].weights.cols() != in ||
        layers[l].bias.size() != out) {
      throw ModelError("layer " + std::to_string(l) + " has the wrong shape");
    }
    RowMap(p.data() + offset, out, in) = layers[l].weights;
    offset += static_cast<Eigen::Index>(in) * out;
    p.segment(offset, out) = layers[l].bias;
    offset += out;
  }
  return p;
}

LossGrad LossAndGrad(const ModelSpec& spec, const FlatParams& params,
                     const Batch& batch) {
  CheckInputs(spec, params, batch);
  const auto& sizes = spec.layer_sizes;
  const size_t layers = sizes.size() - 1;
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  Forward f = RunForward(spec, params, batch.inputs);
  const RowMatrix logp = LogSoftmax(f.activations.back());

  LossGrad out;
  out.grad = FlatParams::Zero(params.size());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < batch.size(); ++r) loss -= logp(r, batch.labels[r]);
  out.loss = loss * inv_b;

  // dL/dlogits = (softmax - onehot) / B
  RowMatrix delta = logp.array().exp();
  for (Eigen::Index r = 0; r < batch.size(); ++r) delta(r, batch.labels[r]) -= 1.0;
  delta *= inv_b;

  // Offsets of each layer's block, walked backwards.
  std::vector<Eigen::Index> offsets(layers);
  Eigen::Index offset = 0;
  for (size_t l = 0; l < layers; ++l) {
    offsets[l] = offset;
    offset += static_cast<Eigen::Index>(sizes[l] + 1) * sizes[l + 1];
  }

  for (size_t l = layers; l-- > 0;) {
    const int in = sizes[l], out_dim = sizes[l + 1];
    const RowMatrix& a_prev = f.activations[l];
    RowMap(out.grad.data() + offsets[l], out_dim, in) = delta.transpose() * a_prev;
    out.grad.segment(offsets[l] + static_cast<Eigen::Index>(in) * out_dim,
                     out_dim) = delta.colwise().sum().transpose();
    if (l == 0) break;
    ConstRowMap w(params.data() + offsets[l], out_dim, in);
    RowMatrix back = delta * w;
    // ReLU derivative: a_prev holds post-activation values of layer l-1.
    delta = back.cwiseProduct((a_prev.array() > 0.0).cast<double>().matrix());
  }
  return out;
}

double Loss(const ModelSpec& spec, const FlatParams& params, const Batch& batch) {
  CheckInputs(spec, params, batch);
  Forward f = RunForward(spec, params, batch.inputs);
  const RowMatrix logp = LogSoftmax(f.activations.back());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < batch.size(); ++r) loss -= logp(r, batch.labels[r]);
  return loss / static_cast<double>(batch.size());
}

double PredictAccuracy(const ModelSpec& spec, const FlatParams& params,
                       const Batch& data) {
  CheckInputs(spec, params, data);
  Forward f = RunForward(spec, params, data.inputs);
  const RowMatrix& logits = f.activations.back();
  Eigen::Index correct = 0;
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    int arg = 0;
    for (int c = 1; c < logits.cols(); ++c) {
      if (logits(r, c) > logits(r, arg)) arg = c;
    }
    if (arg == data.labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

template <typename T>
void PutLe(std::ostream& os, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  os.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <typename T>
T GetLe(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bits;
  if (!is.read(reinterpret_cast<char*>(bits.data()), sizeof(T))) {
    throw ModelError("checkpoint truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

void WriteCheckpoint(const std::filesystem::path& path, const FlatParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ModelError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  PutLe<uint32_t>(os, kCheckpointVersion);
  PutLe<uint64_t>(os, static_cast<uint64_t>(params.size()));
  for (Eigen::Index i = 0; i < params.size(); ++i) PutLe<double>(os, params[i]);
  if (!os) throw ModelError("write failed for " + path.string());
}

FlatParams ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ModelError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4)) throw ModelError("checkpoint truncated");
  if (!std::equal(magic, magic + 4, kMagic)) {
    throw ModelError("bad checkpoint magic in " + path.string());
  }
  const auto version = GetLe<uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw ModelError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto d = GetLe<uint64_t>(is);
  FlatParams p(static_cast<Eigen::Index>(d));
  for (uint64_t i = 0; i < d; ++i) p[static_cast<Eigen::Index>(i)] = GetLe<double>(is);
  return p;
}

}  // namespace cga
