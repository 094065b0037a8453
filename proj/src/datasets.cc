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

#include "cga/datasets.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "cga/errors.h"
#include "cga/rng.h"

namespace cga {

void Dataset::Validate() const {
  if (n_classes < 1) throw DataError("dataset needs at least one class");
  if (static_cast<Eigen::Index>(labels.size()) != inputs.rows()) {
    throw DataError("label count does not match sample count");
  }
  if (labels.size() < static_cast<size_t>(n_classes)) {
    throw DataError("dataset has fewer samples than classes");
  }
  for (int y : labels) {
    if (y < 0 || y >= n_classes) {
      throw DataError("label " + std::to_string(y) + " out of range");
    }
  }
}

Batch Dataset::Gather(std::span<const size_t> indices) const {
  Batch b;
  b.inputs.resize(static_cast<Eigen::Index>(indices.size()), dim());
  b.labels.reserve(indices.size());
  for (size_t r = 0; r < indices.size(); ++r) {
    b.inputs.row(static_cast<Eigen::Index>(r)) =
        inputs.row(static_cast<Eigen::Index>(indices[r]));
    b.labels.push_back(labels[indices[r]]);
  }
  return b;
}

Batch Dataset::All() const { return Batch{inputs, labels}; }

PartitionMode ParsePartitionMode(std::string_view name) {
  if (name == "iid") return PartitionMode::kIid;
  if (name == "noniid") return PartitionMode::kNonIidByClass;
  throw DataError("unknown partition mode '" + std::string(name) +
                  "' (expected iid or noniid)");
}

std::string_view PartitionModeName(PartitionMode mode) {
  return mode == PartitionMode::kIid ? "iid" : "noniid";
}

Dataset SynthBlobs(int n_classes, int dim, int per_class, double spread,
                   uint64_t seed) {
  if (n_classes < 2 || dim < 2 || per_class < 1 || !(spread > 0.0)) {
    throw DataError("synthetic blobs need n_classes >= 2, dim >= 2, "
                    "per_class >= 1 and spread > 0");
  }
  const long long capacity = dim + static_cast<long long>(dim) * (dim - 1) / 2;
  if (n_classes > capacity) {
    throw DataError("too many classes for " + std::to_string(dim) +
                    " dimensions");
  }
  // Axis sets: singletons first, then pairs in lexicographic order.
  std::vector<std::vector<int>> axes;
  for (int i = 0; i < dim && static_cast<int>(axes.size()) < n_classes; ++i) {
    axes.push_back({i});
  }
  for (int i = 0; i < dim && static_cast<int>(axes.size()) < n_classes; ++i) {
    for (int j = i + 1; j < dim && static_cast<int>(axes.size()) < n_classes; ++j) {
      axes.push_back({i, j});
    }
  }

  constexpr double kOffset = 0.15;
  const double scale = 1.0 / std::sqrt(2.0);
  Dataset data;
  data.n_classes = n_classes;
  const Eigen::Index n = static_cast<Eigen::Index>(n_classes) * per_class;
  data.inputs.resize(n, dim);
  data.labels.resize(static_cast<size_t>(n));
  const CounterRng rng(DeriveSeed(seed, "blobs"));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(i / per_class);
    data.labels[static_cast<size_t>(i)] = c;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Constant(dim, kOffset);
    const double level = scale / std::sqrt(static_cast<double>(axes[c].size()));
    for (int a : axes[c]) mean[a] += level;
    for (int k = 0; k < dim; ++k) {
      const auto counter = static_cast<uint64_t>(i) * dim + k;
      data.inputs(i, k) = std::clamp(mean[k] + spread * rng.Normal(counter), 0.0, 1.0);
    }
  }
  return data;
}

namespace {

uint32_t ReadBe32(std::istream& is, const std::string& what) {
  std::array<unsigned char, 4> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw IdxError(IdxError::Kind::kTruncated, what + ": truncated header");
  }
  return (uint32_t{b[0]} << 24) | (uint32_t{b[1]} << 16) | (uint32_t{b[2]} << 8) |
         uint32_t{b[3]};
}

std::vector<unsigned char> ReadPayload(std::istream& is, size_t bytes,
                                       const std::string& what) {
  std::vector<unsigned char> buf(bytes);
  if (bytes > 0 && !is.read(reinterpret_cast<char*>(buf.data()),
                            static_cast<std::streamsize>(bytes))) {
    throw IdxError(IdxError::Kind::kTruncated, what + ": truncated payload");
  }
  return buf;
}

std::ifstream OpenBinary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IdxError(IdxError::Kind::kIo, "cannot open " + path.string());
  return is;
}

}  // namespace

Dataset LoadIdx(const std::filesystem::path& images,
                const std::filesystem::path& labels) {
  const std::string img_name = images.string(), lbl_name = labels.string();
  std::ifstream img = OpenBinary(images);
  if (ReadBe32(img, img_name) != 0x00000803u) {
    throw IdxError(IdxError::Kind::kBadMagic, img_name + ": bad image magic");
  }
  const uint32_t n_img = ReadBe32(img, img_name);
  const uint32_t rows = ReadBe32(img, img_name);
  const uint32_t cols = ReadBe32(img, img_name);

  std::ifstream lbl = OpenBinary(labels);
  if (ReadBe32(lbl, lbl_name) != 0x00000801u) {
    throw IdxError(IdxError::Kind::kBadMagic, lbl_name + ": bad label magic");
  }
  const uint32_t n_lbl = ReadBe32(lbl, lbl_name);
  if (n_img != n_lbl) {
    throw IdxError(IdxError::Kind::kCountMismatch,
                   std::to_string(n_img) + " images but " + std::to_string(n_lbl) +
                       " labels");
  }

  const size_t dim = static_cast<size_t>(rows) * cols;
  auto pixels = ReadPayload(img, static_cast<size_t>(n_img) * dim, img_name);
  auto raw_labels = ReadPayload(lbl, n_lbl, lbl_name);

  Dataset data;
  data.inputs.resize(n_img, static_cast<Eigen::Index>(dim));
  for (size_t i = 0; i < pixels.size(); ++i) {
    data.inputs.data()[i] = static_cast<double>(pixels[i]) / 255.0;
  }
  data.labels.assign(raw_labels.begin(), raw_labels.end());
  int max_label = 0;
  for (int y : data.labels) max_label = std::max(max_label, y);
  data.n_classes = max_label + 1;
  data.Validate();
  return data;
}

Dataset LoadCsv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    size_t used = 0;
    int label = 0;
    try {
      label = std::stoi(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != field.size()) {
      if (rows.empty() && labels.empty() && line_no == 1) continue;  // header
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": bad label '" + field + "'");
    }
    std::vector<double> features;
    while (std::getline(ss, field, ',')) {
      try {
        features.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": bad feature '" + field + "'");
      }
    }
    if (!rows.empty() && features.size() != rows.front().size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": inconsistent feature count");
    }
    labels.push_back(label);
    rows.push_back(std::move(features));
  }
  if (rows.empty() || rows.front().empty()) {
    throw DataError(path.string() + ": no samples");
  }
  Dataset data;
  data.inputs.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t k = 0; k < rows[r].size(); ++k) {
      data.inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          rows[r][k];
    }
  }
  data.labels = std::move(labels);
  data.n_classes = *std::max_element(data.labels.begin(), data.labels.end()) + 1;
  data.Validate();
  return data;
}

void MinMaxScale(Dataset& fit, Dataset& other) {
  if (fit.dim() != other.dim()) throw DataError("feature dimensions differ");
  for (Eigen::Index k = 0; k < fit.dim(); ++k) {
    const double lo = fit.inputs.col(k).minCoeff();
    const double hi = fit.inputs.col(k).maxCoeff();
    const double span = hi - lo;
    auto rescale = [&](Dataset& d) {
      for (Eigen::Index r = 0; r < d.inputs.rows(); ++r) {
        double v = span > 0.0 ? (d.inputs(r, k) - lo) / span : 0.0;
        d.inputs(r, k) = std::clamp(v, 0.0, 1.0);
      }
    };
    rescale(other);
    rescale(fit);
  }
}

Partition MakePartition(const Dataset& data, int n_agents, PartitionMode mode,
                        uint64_t seed) {
  if (n_agents < 1) {
    throw DataError("invalid agent count " + std::to_string(n_agents));
  }
  data.Validate();
  const size_t n = data.size();
  const int classes = data.n_classes;
  Partition p;
  p.mode = mode;
  p.assignments.resize(static_cast<size_t>(n_agents));

  if (mode == PartitionMode::kIid) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    Shuffle(order, DeriveSeed(seed, "iid"));
    for (size_t pos = 0; pos < n; ++pos) {
      p.assignments[pos % static_cast<size_t>(n_agents)].push_back(order[pos]);
    }
  } else {
    std::vector<std::vector<size_t>> by_class(static_cast<size_t>(classes));
    for (size_t i = 0; i < n; ++i) by_class[data.labels[i]].push_back(i);

    if (n_agents <= classes) {
      for (int a = 0; a < n_agents; ++a) {
        const int lo = a * classes / n_agents;
        const int hi = (a + 1) * classes / n_agents;
        for (int c = lo; c < hi; ++c) {
          auto& dst = p.assignments[a];
          dst.insert(dst.end(), by_class[c].begin(), by_class[c].end());
        }
      }
    } else {
      const int base = n_agents / classes, extra = n_agents % classes;
      std::vector<size_t> agents(static_cast<size_t>(n_agents));
      std::iota(agents.begin(), agents.end(), size_t{0});
      Shuffle(agents, DeriveSeed(seed, "agents"));
      size_t slot = 0;
      for (int c = 0; c < classes; ++c) {
        const size_t chunks = static_cast<size_t>(base + (c < extra ? 1 : 0));
        std::vector<size_t> members = by_class[c];
        if (members.size() < chunks) {
          throw DataError("class " + std::to_string(c) + " has " +
                          std::to_string(members.size()) +
                          " samples, fewer than its " + std::to_string(chunks) +
                          " agents");
        }
        Shuffle(members, DeriveSeed(seed, "class", static_cast<uint64_t>(c)));
        const size_t q = members.size() / chunks, r = members.size() % chunks;
        size_t begin = 0;
        for (size_t k = 0; k < chunks; ++k) {
          const size_t len = q + (k < r ? 1 : 0);
          auto& dst = p.assignments[agents[slot++]];
          dst.assign(members.begin() + static_cast<std::ptrdiff_t>(begin),
                     members.begin() + static_cast<std::ptrdiff_t>(begin + len));
          begin += len;
        }
      }
    }
  }
  for (auto& a : p.assignments) std::sort(a.begin(), a.end());
  return p;
}

bool IsExactCover(const Partition& p, size_t n) {
  std::vector<char> seen(n, 0);
  size_t total = 0;
  for (const auto& a : p.assignments) {
    for (size_t i : a) {
      if (i >= n || seen[i]) return false;
      seen[i] = 1;
      ++total;
    }
  }
  return total == n;
}

std::vector<std::vector<int>> LabelSets(const Dataset& data, const Partition& p) {
  std::vector<std::vector<int>> out;
  for (const auto& a : p.assignments) {
    std::vector<int> labels;
    for (size_t i : a) labels.push_back(data.labels[i]);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    out.push_back(std::move(labels));
  }
  return out;
}

std::vector<std::vector<size_t>> MirrorTestSets(
    const Dataset& test, const std::vector<std::vector<int>>& label_sets) {
  std::vector<std::vector<size_t>> out;
  for (const auto& labels : label_sets) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < test.size(); ++i) {
      if (std::binary_search(labels.begin(), labels.end(), test.labels[i])) {
        idx.push_back(i);
      }
    }
    out.push_back(std::move(idx));
  }
  return out;
}

std::vector<std::vector<size_t>> MinibatchIndices(std::span<const size_t> indices,
                                                  int batch_size, int epoch,
                                                  uint64_t seed) {
  if (batch_size < 1) throw DataError("batch size must be >= 1");
  if (indices.empty()) throw DataError("cannot batch an empty index list");
  std::vector<size_t> order(indices.begin(), indices.end());
  Shuffle(order, DeriveSeed(seed, "epoch", static_cast<uint64_t>(epoch)));
  std::vector<std::vector<size_t>> out;
  const auto bs = static_cast<size_t>(batch_size);
  for (size_t begin = 0; begin < order.size(); begin += bs) {
    const size_t end = std::min(order.size(), begin + bs);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

std::vector<Batch> Minibatches(const Dataset& data, std::span<const size_t> indices,
                               int batch_size, int epoch, uint64_t seed) {
  std::vector<Batch> out;
  for (const auto& idx : MinibatchIndices(indices, batch_size, epoch, seed)) {
    out.push_back(data.Gather(idx));
  }
  return out;
}

}  // namespace cga
