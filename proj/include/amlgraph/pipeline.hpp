// Copyright 2026 The amlgraph Authors
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

// End-to-end pipeline driven by one configuration file.
//
// Config layout (all sections optional):
//
//   seed = 42                     master seed
//   [topology]   simnet keys
//   [flow]       txflow keys
//   [typology.<name>]             one TypologySpec per section
//   [rules]      sentinel keys
//   [train]      gcnkit keys plus method, split_train, split_val
//   [compress]   strategy, edges
//   [bench]      trials, strategies
//   [infer]      stream, method, batch, verify
//
// Every stage seed is SubSeed(master, "<stage>") unless the section sets
// `seed` explicitly. Artifacts live in the output directory under the names
// in Artifacts.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amlgraph/config.hpp"
#include "amlgraph/gcnkit.hpp"
#include "amlgraph/gstore.hpp"
#include "amlgraph/sentinel.hpp"
#include "amlgraph/simnet.hpp"
#include "amlgraph/txflow.hpp"
#include "amlgraph/typology.hpp"

namespace aml::pipeline {

struct Artifacts {
  static constexpr const char* kAccounts = "accounts.csv";
  static constexpr const char* kTransactions = "transactions.csv";
  static constexpr const char* kSarLabels = "sar_labels.csv";
  static constexpr const char* kInjections = "injections.csv";
  static constexpr const char* kEdges = "edges.csv";
  static constexpr const char* kAlerts = "alerts.csv";
  static constexpr const char* kGraph = "graph.amlg";
  static constexpr const char* kCompressionReport = "compression_report.csv";
  static constexpr const char* kBenchTable = "bench_table.csv";
  static constexpr const char* kCompressionTable = "compression_table.csv";
  static constexpr const char* kInferScores = "infer_scores.csv";
  static constexpr const char* kInferLog = "infer_log.csv";
};

std::string CheckpointName(std::string_view method);   // model_<method>.bin
std::string MetricsName(std::string_view method);      // metrics_<method>.csv
std::string EvaluationName(std::string_view method);   // eval_<method>.csv

struct TrainSettings {
  std::string method = "gcn";  // gcn | fastgcn
  gcnkit::TrainHyper hyper;
  gcnkit::SplitFractions split;
  std::uint64_t split_seed = 0;
};

struct InferSettings {
  std::filesystem::path stream;  // relative paths resolve against out_dir
  std::string method = "gcn";
  std::uint32_t batch = 1;       // transactions per update
  bool verify = false;           // compare with a full forward at the end
};

struct PipelineConfig {
  std::uint64_t master_seed = 0;
  std::filesystem::path out_dir = ".";
  simnet::TopologyConfig topology;
  txflow::FlowConfig flow;
  std::vector<typology::TypologySpec> typologies;
  sentinel::RuleSet rules;
  TrainSettings train;
  gstore::ReorderStrategy compress_strategy = gstore::ReorderStrategy::kBfs;
  std::filesystem::path compress_edges;  // empty: <out>/edges.csv
  std::uint32_t bench_trials = 1;
  std::vector<gstore::ReorderStrategy> bench_strategies = {
      gstore::ReorderStrategy::kIdentity, gstore::ReorderStrategy::kBfs,
      gstore::ReorderStrategy::kDegreeDesc};
  InferSettings infer;

  std::filesystem::path Path(const std::string& name) const { return out_dir / name; }
  void Validate() const;
};

// `seed_override`, when set, replaces the master seed before sub-seeds are
// derived.
PipelineConfig LoadPipelineConfig(const ConfigFile& file, std::filesystem::path out_dir,
                                  std::optional<std::uint64_t> seed_override = std::nullopt);
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path,
                                  std::filesystem::path out_dir,
                                  std::optional<std::uint64_t> seed_override = std::nullopt);

// Lines of human-readable summary printed by the CLI.
using Summary = std::vector<std::string>;

// simnet -> txflow -> typology. Writes accounts, transactions, sar_labels,
// injections and edges.
Summary Generate(const PipelineConfig& config);
Summary ScanLog(const PipelineConfig& config);
// `method` empty means config.train.method.
Summary Train(const PipelineConfig& config, std::string_view method = {});
Summary CompressGraph(const PipelineConfig& config);
Summary Bench(const PipelineConfig& config);
Summary Infer(const PipelineConfig& config);

// Data shared by train, bench and infer, loaded from generated artifacts.
struct Dataset {
  gstore::CsrGraph graph;
  linalg::Matrix features;  // scaled
  gcnkit::TrainSplit split;
  gcnkit::NormalizedAdjacency adj;
};

Dataset LoadDataset(const PipelineConfig& config);

// Scores a trained model on the dataset's split.
gcnkit::DetectionScore Evaluate(const Dataset& data, const gcnkit::GcnModel& model);

}  // namespace aml::pipeline
