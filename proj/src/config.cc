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

#include "cga/config.h"

#include <fstream>
#include <set>
#include <string>

#include "cga/errors.h"

namespace cga {

using nlohmann::json;

namespace {

void RejectUnknown(const json& obj, const std::string& prefix,
                   const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

const json& Required(const json& obj, const std::string& prefix,
                     const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(prefix + key, "missing required key");
  return *it;
}

std::string GetString(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

long long GetInt(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<long long>();
}

uint64_t GetSeed(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<long long>() < 0)) {
    throw ConfigError(key, "expected a nonnegative integer");
  }
  return v.get<uint64_t>();
}

double GetReal(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

int GetPositive(const json& v, const std::string& key) {
  const long long x = GetInt(v, key);
  if (x < 1 || x > 1'000'000'000) throw ConfigError(key, "must be a positive integer");
  return static_cast<int>(x);
}

template <typename Fn>
auto Translate(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

DatasetSource ParseDataset(const json& d) {
  const std::string p = "dataset.";
  if (!d.is_object()) throw ConfigError("dataset", "expected an object");
  DatasetSource src;
  const std::string kind = GetString(Required(d, p, "source"), p + "source");
  if (kind == "synthetic") {
    RejectUnknown(d, p, {"source", "n_classes", "dim", "per_class", "test_per_class",
                         "spread", "seed"});
    src.kind = DatasetSource::Kind::kSynthetic;
    if (d.contains("n_classes")) src.n_classes = GetPositive(d["n_classes"], p + "n_classes");
    if (d.contains("dim")) src.dim = GetPositive(d["dim"], p + "dim");
    if (d.contains("per_class")) src.per_class = GetPositive(d["per_class"], p + "per_class");
    if (d.contains("test_per_class")) {
      src.test_per_class = GetPositive(d["test_per_class"], p + "test_per_class");
    }
    if (d.contains("spread")) src.spread = GetReal(d["spread"], p + "spread");
    if (d.contains("seed")) src.seed = GetSeed(d["seed"], p + "seed");
    if (src.n_classes < 2) throw ConfigError(p + "n_classes", "must be >= 2");
    if (src.dim < 2) throw ConfigError(p + "dim", "must be >= 2");
    if (!(src.spread > 0.0)) throw ConfigError(p + "spread", "must be positive");
  } else if (kind == "idx") {
    RejectUnknown(d, p, {"source", "train_images", "train_labels", "test_images",
                         "test_labels"});
    src.kind = DatasetSource::Kind::kIdx;
    src.train_images = GetString(Required(d, p, "train_images"), p + "train_images");
    src.train_labels = GetString(Required(d, p, "train_labels"), p + "train_labels");
    src.test_images = GetString(Required(d, p, "test_images"), p + "test_images");
    src.test_labels = GetString(Required(d, p, "test_labels"), p + "test_labels");
  } else if (kind == "csv") {
    RejectUnknown(d, p, {"source", "train", "test"});
    src.kind = DatasetSource::Kind::kCsv;
    src.train_csv = GetString(Required(d, p, "train"), p + "train");
    src.test_csv = GetString(Required(d, p, "test"), p + "test");
  } else {
    throw ConfigError(p + "source", "expected synthetic, idx or csv");
  }
  return src;
}

}  // namespace

ExperimentConfig ParseConfig(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  RejectUnknown(doc, "", {"algorithm", "topology", "n_agents", "dataset", "partition",
                          "model", "hyper", "epochs", "master_seed", "eval_every",
                          "float_bits", "threads"});
  ExperimentConfig cfg;
  cfg.algorithm = Translate("algorithm", [&] {
    return ParseAlgorithm(GetString(Required(doc, "", "algorithm"), "algorithm"));
  });
  cfg.topology = Translate("topology", [&] {
    return ParseGraphKind(GetString(Required(doc, "", "topology"), "topology"));
  });
  cfg.n_agents = GetPositive(Required(doc, "", "n_agents"), "n_agents");
  Translate("n_agents", [&] { return BuildTopology(cfg.topology, cfg.n_agents).n_agents(); });
  cfg.dataset = ParseDataset(Required(doc, "", "dataset"));
  if (doc.contains("partition")) {
    cfg.partition = Translate("partition", [&] {
      return ParsePartitionMode(GetString(doc["partition"], "partition"));
    });
  }
  if (doc.contains("model")) {
    const json& m = doc["model"];
    if (!m.is_object()) throw ConfigError("model", "expected an object");
    RejectUnknown(m, "model.", {"hidden", "seed"});
    if (m.contains("hidden")) {
      if (!m["hidden"].is_array()) throw ConfigError("model.hidden", "expected an array");
      cfg.hidden.clear();
      for (const auto& h : m["hidden"]) cfg.hidden.push_back(GetPositive(h, "model.hidden"));
    }
    if (m.contains("seed")) cfg.model_seed = GetSeed(m["seed"], "model.seed");
  }
  if (doc.contains("hyper")) {
    const json& h = doc["hyper"];
    if (!h.is_object()) throw ConfigError("hyper", "expected an object");
    RejectUnknown(h, "hyper.", {"alpha0", "beta", "decay", "batch_size", "qp_tol",
                                "qp_max_iter"});
    if (h.contains("alpha0")) cfg.hyper.alpha0 = GetReal(h["alpha0"], "hyper.alpha0");
    if (h.contains("beta")) cfg.hyper.beta = GetReal(h["beta"], "hyper.beta");
    if (h.contains("decay")) cfg.hyper.decay = GetReal(h["decay"], "hyper.decay");
    if (h.contains("batch_size")) {
      cfg.hyper.batch_size = GetPositive(h["batch_size"], "hyper.batch_size");
    }
    if (h.contains("qp_tol")) cfg.hyper.qp.tol = GetReal(h["qp_tol"], "hyper.qp_tol");
    if (h.contains("qp_max_iter")) {
      const long long it = GetInt(h["qp_max_iter"], "hyper.qp_max_iter");
      if (it < 0 || it > 100'000'000) throw ConfigError("hyper.qp_max_iter", "out of range");
      cfg.hyper.qp.max_iter = static_cast<int>(it);
    }
  }
  cfg.hyper.Validate();
  const long long epochs = GetInt(Required(doc, "", "epochs"), "epochs");
  if (epochs < 0 || epochs > 1'000'000) throw ConfigError("epochs", "must be >= 0");
  cfg.epochs = static_cast<int>(epochs);
  if (doc.contains("master_seed")) cfg.master_seed = GetSeed(doc["master_seed"], "master_seed");
  if (doc.contains("eval_every")) {
    const long long e = GetInt(doc["eval_every"], "eval_every");
    if (e < 0 || e > 1'000'000'000) throw ConfigError("eval_every", "must be >= 0");
    cfg.eval_every = static_cast<int>(e);
  }
  if (doc.contains("float_bits")) cfg.float_bits = GetPositive(doc["float_bits"], "float_bits");
  if (doc.contains("threads")) cfg.threads = GetPositive(doc["threads"], "threads");
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("<file>", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return ParseConfig(doc);
}

json ConfigToJson(const ExperimentConfig& cfg) {
  json d;
  const DatasetSource& s = cfg.dataset;
  switch (s.kind) {
    case DatasetSource::Kind::kSynthetic:
      d = {{"source", "synthetic"}, {"n_classes", s.n_classes}, {"dim", s.dim},
           {"per_class", s.per_class}, {"test_per_class", s.test_per_class},
           {"spread", s.spread}};
      if (s.seed) d["seed"] = *s.seed;
      break;
    case DatasetSource::Kind::kIdx:
      d = {{"source", "idx"}, {"train_images", s.train_images.string()},
           {"train_labels", s.train_labels.string()},
           {"test_images", s.test_images.string()},
           {"test_labels", s.test_labels.string()}};
      break;
    case DatasetSource::Kind::kCsv:
      d = {{"source", "csv"}, {"train", s.train_csv.string()},
           {"test", s.test_csv.string()}};
      break;
  }
  json model = {{"hidden", cfg.hidden}};
  if (cfg.model_seed) model["seed"] = *cfg.model_seed;
  return {
      {"algorithm", std::string(AlgorithmName(cfg.algorithm))},
      {"topology", std::string(GraphKindName(cfg.topology))},
      {"n_agents", cfg.n_agents},
      {"dataset", d},
      {"partition", std::string(PartitionModeName(cfg.partition))},
      {"model", model},
      {"hyper",
       {{"alpha0", cfg.hyper.alpha0}, {"beta", cfg.hyper.beta},
        {"decay", cfg.hyper.decay}, {"batch_size", cfg.hyper.batch_size},
        {"qp_tol", cfg.hyper.qp.tol}, {"qp_max_iter", cfg.hyper.qp.max_iter}}},
      {"epochs", cfg.epochs},
      {"master_seed", cfg.master_seed},
      {"eval_every", cfg.eval_every},
      {"float_bits", cfg.float_bits},
      {"threads", cfg.threads},
  };
}

}  // namespace cga
