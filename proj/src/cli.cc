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

#include "cga/cli.h"

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cga/config.h"
#include "cga/errors.h"
#include "cga/qp_projection.h"
#include "cga/simulator.h"
#include "cga/topology.h"

namespace cga {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

json Vec(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

struct TrainArgs {
  std::string config;
  std::string out = "metrics.csv";
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::string checkpoint;
};

int Train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = LoadConfig(args.config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (args.seed) cfg.master_seed = *args.seed;
  if (args.threads) cfg.threads = *args.threads;

  try {
    std::ofstream csv(args.out, std::ios::trunc);
    if (!csv) {
      err << "cannot open " << args.out << " for writing\n";
      return kExitRuntime;
    }
    CsvMetricsWriter writer(csv);
    ExperimentResult result = RunExperiment(cfg, std::ref(writer));
    if (!args.checkpoint.empty()) WriteCheckpoint(args.checkpoint, result.consensus);
    const MetricsRecord& last = result.records.back();
    json summary = {
        {"algorithm", std::string(AlgorithmName(cfg.algorithm))},
        {"rounds", last.round},
        {"final_test_accuracy", result.final_accuracy},
        {"final_consensus_error", last.consensus_error},
        {"total_bytes", last.cumulative_bytes},
        {"metrics", args.out},
    };
    out << summary.dump() << "\n";
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int TopoInspect(const std::string& kind_name, int n, std::ostream& out,
                std::ostream& err) {
  try {
    const MixingMatrix m = BuildTopology(ParseGraphKind(kind_name), n);
    const SpectralReport report = ComputeSpectralReport(m);
    json rows = json::array();
    for (int i = 0; i < m.n_agents(); ++i) rows.push_back(Vec(m.weights().row(i).transpose()));
    json doc = {
        {"kind", std::string(GraphKindName(m.kind()))},
        {"n_agents", m.n_agents()},
        {"weights", rows},
        {"nonzero_off_diagonal", m.OffDiagonalNonzeros()},
        {"max_stochasticity_error", MaxStochasticityError(m.weights())},
        {"spectral", {{"lambda_sorted", report.lambda_sorted},
                      {"rho_sqrt", report.rho_sqrt}}},
    };
    out << doc.dump() << "\n";
  } catch (const TopologyError& e) {
    err << "topology error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

int PartitionInspect(const std::string& config, std::optional<uint64_t> seed,
                     std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = LoadConfig(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seed) cfg.master_seed = *seed;
  try {
    const LoadedData data = LoadData(cfg);
    const Partition p = PartitionFor(cfg, data.train);
    const auto labels = LabelSets(data.train, p);
    const auto tests = MirrorTestSets(data.test, labels);
    json agents = json::array();
    for (int a = 0; a < p.n_agents(); ++a) {
      agents.push_back({{"agent", a},
                        {"train_size", p.assignments[a].size()},
                        {"test_size", tests[a].size()},
                        {"labels", labels[a]}});
    }
    json doc = {
        {"mode", std::string(PartitionModeName(p.mode))},
        {"n_agents", p.n_agents()},
        {"n_train", data.train.size()},
        {"n_classes", data.train.n_classes},
        {"exact_cover", IsExactCover(p, data.train.size())},
        {"agents", agents},
    };
    out << doc.dump() << "\n";
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

GradientStack ParseInstance(const json& doc) {
  if (!doc.is_object() || !doc.contains("g") || !doc["g"].is_array()) {
    throw QpError("instance needs an array 'g'");
  }
  const auto g = doc["g"].get<std::vector<double>>();
  GradientStack stack;
  stack.g = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
  std::vector<std::vector<double>> rows;
  if (doc.contains("G")) {
    if (!doc["G"].is_array()) throw QpError("'G' must be an array of rows");
    rows = doc["G"].get<std::vector<std::vector<double>>>();
  }
  stack.G.resize(static_cast<Eigen::Index>(rows.size()), stack.dim());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != stack.dim()) {
      throw QpError("row " + std::to_string(r) + " of G has the wrong length");
    }
    for (size_t k = 0; k < rows[r].size(); ++k) {
      stack.G(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
    }
  }
  return stack;
}

int QpCheck(const std::string& path, double tol, std::ostream& out, std::ostream& err) {
  Projection p;
  GradientStack stack;
  QpOptions opts;
  opts.tol = tol;
  try {
    std::ifstream is(path);
    if (!is) throw QpError("cannot open " + path);
    stack = ParseInstance(json::parse(is));
    p = ProjectGradient(stack, opts);
  } catch (const std::exception& e) {
    err << "qp error: " << e.what() << "\n";
    return kExitConfig;
  }
  const bool ok = p.kkt.Within(tol);
  json doc = {
      {"z", Vec(p.z)},
      {"u", Vec(p.dual.u)},
      {"fast_path", p.fast_path},
      {"iterations", p.dual.iterations},
      {"residual", p.dual.residual},
      {"converged", p.dual.converged},
      {"objective", PrimalObjective(stack, p.z)},
      {"kkt", {{"primal_feasibility", p.kkt.primal_feasibility},
               {"dual_feasibility", p.kkt.dual_feasibility},
               {"complementary_slackness", p.kkt.complementary_slackness},
               {"stationarity", p.kkt.stationarity}}},
      {"kkt_ok", ok},
  };
  out << doc.dump() << "\n";
  return ok ? kExitOk : kExitKkt;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized learning simulator (CGA, CompCGA, DPMSGD)", "cga_sim"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Run an experiment and write metrics CSV");
  train_cmd->add_option("--config", train.config, "Experiment JSON")->required();
  train_cmd->add_option("--out", train.out, "Metrics CSV path");
  train_cmd->add_option("--seed", train.seed, "Override master_seed");
  train_cmd->add_option("--threads", train.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--checkpoint", train.checkpoint,
                        "Write the final consensus parameters here");

  std::string kind;
  int n = 0;
  auto add_topo = [&](CLI::App* cmd) {
    cmd->add_option("kind", kind, "full, ring or bipartite")->required();
    cmd->add_option("n", n, "Number of agents")->required();
  };
  auto* topo_cmd = app.add_subcommand("topo-inspect", "Print a mixing matrix and its spectrum");
  add_topo(topo_cmd);
  auto* topo_group = app.add_subcommand("topo", "Topology tools");
  auto* topo_nested = topo_group->add_subcommand("inspect", "Same as topo-inspect");
  add_topo(topo_nested);
  topo_group->require_subcommand(1);

  std::string part_config;
  std::optional<uint64_t> part_seed;
  auto* part_cmd = app.add_subcommand("partition-inspect", "Summarise the data partition");
  part_cmd->add_option("--config", part_config, "Experiment JSON")->required();
  part_cmd->add_option("--seed", part_seed, "Override master_seed");

  std::string instance;
  double tol = QpOptions{}.tol;
  auto add_qp = [&](CLI::App* cmd) {
    cmd->add_option("instance", instance, "JSON file {g: [...], G: [[...]]}")->required();
    cmd->add_option("--tol", tol, "Solver tolerance")->check(CLI::PositiveNumber);
  };
  auto* qp_cmd = app.add_subcommand("qp-check", "Solve one projection and report KKT residuals");
  add_qp(qp_cmd);
  auto* qp_group = app.add_subcommand("qp", "QP tools");
  auto* qp_nested = qp_group->add_subcommand("check", "Same as qp-check");
  add_qp(qp_nested);
  qp_group->require_subcommand(1);

  auto* version_cmd = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  if (*train_cmd) return Train(train, out, err);
  if (*topo_cmd || *topo_nested) return TopoInspect(kind, n, out, err);
  if (*part_cmd) return PartitionInspect(part_config, part_seed, out, err);
  if (*qp_cmd || *qp_nested) return QpCheck(instance, tol, out, err);
  if (*version_cmd) {
    out << json{{"version", kVersion}}.dump() << "\n";
    return kExitOk;
  }
  return kExitConfig;
}

}  // namespace cga
