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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "cga/errors.h"

namespace cga {
namespace {

using nlohmann::json;

json Minimal() {
  return json::parse(R"({
    "algorithm": "compcga",
    "topology": "ring",
    "n_agents": 6,
    "dataset": {"source": "synthetic"},
    "epochs": 3
  })");
}

std::string KeyOf(const json& doc) {
  try {
    ParseConfig(doc);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

TEST(ParseConfigTest, MinimalUsesDefaults) {
  ExperimentConfig cfg = ParseConfig(Minimal());
  EXPECT_EQ(cfg.algorithm, Algorithm::kCompCga);
  EXPECT_EQ(cfg.topology, GraphKind::kRing);
  EXPECT_EQ(cfg.n_agents, 6);
  EXPECT_EQ(cfg.epochs, 3);
  EXPECT_EQ(cfg.partition, PartitionMode::kNonIidByClass);
  EXPECT_EQ(cfg.hidden, (std::vector<int>{64, 32}));
  EXPECT_EQ(cfg.hyper.alpha0, 0.01);
  EXPECT_EQ(cfg.hyper.beta, 0.98);
  EXPECT_EQ(cfg.hyper.decay, 0.981);
  EXPECT_EQ(cfg.hyper.batch_size, 128);
  EXPECT_EQ(cfg.float_bits, 64);
  EXPECT_EQ(cfg.threads, 1);
}

TEST(ParseConfigTest, FullDocument) {
  json doc = Minimal();
  doc["partition"] = "iid";
  doc["model"] = {{"hidden", {16}}, {"seed", 5}};
  doc["hyper"] = {{"alpha0", 0.1}, {"beta", 0.5}, {"decay", 1.0}, {"batch_size", 4},
                  {"qp_tol", 1e-6}, {"qp_max_iter", 50}};
  doc["master_seed"] = 12;
  doc["eval_every"] = 2;
  doc["float_bits"] = 32;
  doc["threads"] = 2;
  doc["dataset"] = {{"source", "synthetic"}, {"n_classes", 3}, {"dim", 4},
                    {"per_class", 10}, {"test_per_class", 5}, {"spread", 0.2},
                    {"seed", 9}};
  ExperimentConfig cfg = ParseConfig(doc);
  EXPECT_EQ(cfg.partition, PartitionMode::kIid);
  EXPECT_EQ(cfg.hidden, (std::vector<int>{16}));
  EXPECT_EQ(cfg.model_seed, 5u);
  EXPECT_EQ(cfg.hyper.qp.tol, 1e-6);
  EXPECT_EQ(cfg.hyper.qp.max_iter, 50);
  EXPECT_EQ(cfg.master_seed, 12u);
  EXPECT_EQ(cfg.dataset.seed, 9u);
  EXPECT_EQ(cfg.dataset.n_classes, 3);

  // Round trip through the canonical form.
  EXPECT_EQ(ConfigToJson(ParseConfig(ConfigToJson(cfg))), ConfigToJson(cfg));
}

TEST(ParseConfigTest, ErrorsNameTheKey) {
  json d = Minimal();
  d.erase("algorithm");
  EXPECT_EQ(KeyOf(d), "algorithm");

  d = Minimal();
  d["algorithm"] = "adam";
  EXPECT_EQ(KeyOf(d), "algorithm");

  d = Minimal();
  d["topology"] = "star";
  EXPECT_EQ(KeyOf(d), "topology");

  d = Minimal();
  d["topology"] = "bipartite";
  d["n_agents"] = 5;
  EXPECT_EQ(KeyOf(d), "n_agents");

  d = Minimal();
  d["n_agents"] = 0;
  EXPECT_EQ(KeyOf(d), "n_agents");

  d = Minimal();
  d["hyper"] = {{"beta", 1.0}};
  EXPECT_EQ(KeyOf(d), "hyper.beta");

  d = Minimal();
  d["hyper"] = {{"batch_size", 2.5}};
  EXPECT_EQ(KeyOf(d), "hyper.batch_size");

  d = Minimal();
  d["hyper"] = {{"momentum", 0.9}};
  EXPECT_EQ(KeyOf(d), "hyper.momentum");

  d = Minimal();
  d["dataset"] = {{"source", "synthetic"}, {"spread", -1.0}};
  EXPECT_EQ(KeyOf(d), "dataset.spread");

  d = Minimal();
  d["dataset"] = {{"source", "parquet"}};
  EXPECT_EQ(KeyOf(d), "dataset.source");

  d = Minimal();
  d["dataset"] = {{"source", "csv"}, {"train", "a.csv"}};
  EXPECT_EQ(KeyOf(d), "dataset.test");

  d = Minimal();
  d["epochs"] = -2;
  EXPECT_EQ(KeyOf(d), "epochs");

  d = Minimal();
  d["learning_rate"] = 0.1;
  EXPECT_EQ(KeyOf(d), "learning_rate");

  d = Minimal();
  d["model"] = {{"hidden", {8, 0}}};
  EXPECT_EQ(KeyOf(d), "model.hidden");

  EXPECT_EQ(KeyOf(json::array()), "<root>");
}

TEST(LoadConfigTest, Files) {
  const auto dir = std::filesystem::temp_directory_path() / "cga_config_test";
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.json";
  std::ofstream(good) << Minimal().dump();
  EXPECT_EQ(LoadConfig(good).n_agents, 6);

  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{\"algorithm\": ";
  try {
    LoadConfig(bad);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "<file>");
  }
  EXPECT_THROW(LoadConfig(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace cga
