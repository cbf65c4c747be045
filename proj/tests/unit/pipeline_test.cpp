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

// End-to-end runs of every command on the small configuration.

#include <gtest/gtest.h>

#include <memory>
#include <sstream>

#include "amlgraph/pipeline.hpp"
#include "oracles.hpp"

namespace aml::pipeline {
namespace {

namespace fs = std::filesystem;

bool HasLine(const Summary& s, const std::string& line) {
  return std::find(s.begin(), s.end(), line) != s.end();
}

// Second line of a two-line CSV, split on commas.
std::vector<std::string> DataRow(const fs::path& path) {
  std::istringstream in(testing::ReadFile(path));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::string> out;
  std::istringstream cells(line);
  for (std::string f; std::getline(cells, f, ',');) out.push_back(f);
  return out;
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    base_ = std::make_unique<testing::TempDir>("pipeline");
    const PipelineConfig c = Config(base_->path());
    generate_ = Generate(c);
    scan_ = ScanLog(c);
  }
  static void TearDownTestSuite() { base_.reset(); }

  static PipelineConfig Config(const fs::path& out, std::optional<std::uint64_t> seed = {}) {
    return LoadPipelineConfig(fs::path(AMLGRAPH_SMALL_CONFIG), out, seed);
  }

  // Fresh directory holding copies of the generated and scanned artifacts.
  static std::unique_ptr<testing::TempDir> CopyOfBase(const std::string& tag) {
    auto dir = std::make_unique<testing::TempDir>(tag);
    for (const char* name : {Artifacts::kAccounts, Artifacts::kTransactions,
                             Artifacts::kSarLabels, Artifacts::kInjections, Artifacts::kEdges,
                             Artifacts::kAlerts}) {
      fs::copy_file(base_->path() / name, dir->path() / name);
    }
    return dir;
  }

  static std::unique_ptr<testing::TempDir> base_;
  static Summary generate_;
  static Summary scan_;
};

std::unique_ptr<testing::TempDir> PipelineTest::base_;
Summary PipelineTest::generate_;
Summary PipelineTest::scan_;

TEST_F(PipelineTest, GenerateSummaryMatchesArtifacts) {
  const PipelineConfig c = Config(base_->path());
  EXPECT_TRUE(HasLine(generate_, "accounts 5000"));
  EXPECT_EQ(testing::CountLines(c.Path(Artifacts::kAccounts)), 5001u);
  EXPECT_EQ(testing::CountLines(c.Path(Artifacts::kSarLabels)), 5001u);
  const auto txs = txflow::ReadTransactionsCsv(c.Path(Artifacts::kTransactions));
  EXPECT_TRUE(HasLine(generate_, "transactions " + std::to_string(txs.size())));
  EXPECT_TRUE(HasLine(generate_, "typology instances 11"));
  const auto edges = gstore::ReadEdgeCsv(c.Path(Artifacts::kEdges), 5000);
  EXPECT_TRUE(HasLine(generate_, "edges " + std::to_string(edges.edge_count())));
}

TEST_F(PipelineTest, ScanSummaryMatchesAlertsFile) {
  const PipelineConfig c = Config(base_->path());
  const auto alerts = sentinel::ReadAlertsCsv(c.Path(Artifacts::kAlerts));
  EXPECT_FALSE(alerts.empty());
  EXPECT_TRUE(HasLine(scan_, "alerts " + std::to_string(alerts.size())));
  EXPECT_EQ(testing::CountLines(c.Path(Artifacts::kAlerts)), alerts.size() + 1);
}

TEST_F(PipelineTest, TrainWritesOneMetricRowPerEpoch) {
  const auto dir = CopyOfBase("train32");
  PipelineConfig c = Config(dir->path());
  c.train.hyper.epochs = 32;
  const Summary s = Train(c, "gcn");
  EXPECT_TRUE(HasLine(s, "epochs 32"));
  EXPECT_EQ(testing::CountLines(c.Path(MetricsName("gcn"))), 33u);

  // Test F1 recomputed from the checkpoint agrees with the evaluation file.
  const Dataset data = LoadDataset(c);
  const gcnkit::GcnModel model = gcnkit::ReadCheckpoint(c.Path(CheckpointName("gcn")));
  const gcnkit::DetectionScore score = Evaluate(data, model);
  const auto row = DataRow(c.Path(EvaluationName("gcn")));
  ASSERT_EQ(row.size(), 8u);
  EXPECT_EQ(row[0], "gcn");
  EXPECT_DOUBLE_EQ(std::stod(row[3]), score.test_f1);
  EXPECT_GT(score.test_f1, 0.0);
}

TEST_F(PipelineTest, ZeroLearningRateKeepsInitialWeights) {
  const auto dir = CopyOfBase("lr0");
  PipelineConfig c = Config(dir->path());
  c.train.hyper.lr = 0.0;
  Train(c, "gcn");
  const gcnkit::GcnModel model = gcnkit::ReadCheckpoint(c.Path(CheckpointName("gcn")));
  EXPECT_EQ(model, gcnkit::InitModel(model.features(), c.train.hyper.hidden,
                                     gcnkit::kClassCount, c.train.hyper.seed));
}

TEST_F(PipelineTest, FastGcnTrainsOnTheSameData) {
  const auto dir = CopyOfBase("fastgcn");
  const PipelineConfig c = Config(dir->path());
  const Summary s = Train(c, "fastgcn");
  EXPECT_TRUE(HasLine(s, "method fastgcn"));
  EXPECT_EQ(testing::CountLines(c.Path(MetricsName("fastgcn"))), c.train.hyper.epochs + 1u);
  EXPECT_TRUE(fs::exists(c.Path(CheckpointName("fastgcn"))));
  EXPECT_THROW(Train(c, "sage"), Error);
}

TEST_F(PipelineTest, CompressReportsRatioWithTwoDecimals) {
  const auto dir = CopyOfBase("compress");
  const PipelineConfig c = Config(dir->path());
  const Summary s = CompressGraph(c);
  EXPECT_TRUE(HasLine(s, "round-trip ok"));
  const auto row = DataRow(c.Path(Artifacts::kCompressionReport));
  ASSERT_EQ(row.size(), 6u);
  EXPECT_EQ(row[0], "bfs");
  const std::string& ratio = row[5];
  ASSERT_GE(ratio.size(), 4u);
  EXPECT_EQ(ratio[ratio.size() - 3], '.');
  EXPECT_TRUE(HasLine(s, "ratio " + ratio));
  EXPECT_GT(std::stod(ratio), 1.0);

  const gstore::CompressedGraph cg = gstore::ReadCompressed(c.Path(Artifacts::kGraph));
  const gstore::CsrGraph g = gstore::ReadEdgeCsv(c.Path(Artifacts::kEdges), 5000);
  EXPECT_EQ(cg.Decode(), gstore::Relabel(g, cg.permutation));
}

TEST_F(PipelineTest, BenchCoversBothMethodsAndAllStrategies) {
  const auto dir = CopyOfBase("bench");
  const PipelineConfig c = Config(dir->path());
  const Summary s = Bench(c);
  const std::string table = testing::ReadFile(c.Path(Artifacts::kBenchTable));
  EXPECT_NE(table.find("\ngcn,0,8,"), std::string::npos);
  EXPECT_NE(table.find("\nfastgcn,0,8,"), std::string::npos);
  EXPECT_EQ(testing::CountLines(c.Path(Artifacts::kBenchTable)), 3u);
  EXPECT_EQ(testing::CountLines(c.Path(Artifacts::kCompressionTable)), 4u);
  EXPECT_TRUE(std::any_of(s.begin(), s.end(), [](const std::string& line) {
    return line.rfind("per-epoch ratio fastgcn/gcn ", 0) == 0;
  }));
}

TEST_F(PipelineTest, InferMatchesFullForward) {
  const auto dir = CopyOfBase("infer");
  const PipelineConfig c = Config(dir->path());
  Train(c, "gcn");
  auto stream = testing::RandomLog(31, 40, 5000, 4);
  txflow::WriteTransactionsCsv(c.Path("stream.csv"), stream);
  const Summary s = Infer(c);
  EXPECT_TRUE(HasLine(s, "stream transactions 40 in 40 batches"));
  EXPECT_TRUE(std::any_of(s.begin(), s.end(), [](const std::string& line) {
    return line.rfind("verify max abs diff ", 0) == 0;
  }));
  EXPECT_EQ(testing::CountLines(c.Path(Artifacts::kInferLog)), 41u);
  EXPECT_EQ(testing::CountLines(c.Path(Artifacts::kInferScores)), 5001u);
}

TEST_F(PipelineTest, FailedCommandLeavesNoPartialOutputs) {
  const auto dir = CopyOfBase("partial");
  const PipelineConfig c = Config(dir->path());
  Train(c, "gcn");
  auto stream = testing::RandomLog(32, 10, 5000, 4);
  stream[7].dst = 5000;  // unknown account, reached after the log is opened
  txflow::WriteTransactionsCsv(c.Path("stream.csv"), stream);
  try {
    Infer(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
    EXPECT_EQ(std::string(e.what()).rfind("deltainfer: ", 0), 0u);
  }
  EXPECT_FALSE(fs::exists(c.Path(Artifacts::kInferLog)));
  EXPECT_FALSE(fs::exists(c.Path(Artifacts::kInferScores)));
  EXPECT_TRUE(fs::exists(c.Path(CheckpointName("gcn"))));
}

TEST_F(PipelineTest, MissingInputsAreIoErrors) {
  testing::TempDir empty("empty");
  try {
    ScanLog(Config(empty.path()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  EXPECT_FALSE(fs::exists(empty / Artifacts::kAlerts));
}

TEST_F(PipelineTest, SameSeedRepeatsEveryArtifact) {
  testing::TempDir a("det_a"), b("det_b"), other("det_c");
  for (const auto* dir : {&a, &b}) {
    const PipelineConfig c = Config(dir->path());
    Generate(c);
    ScanLog(c);
    Train(c, "gcn");
    CompressGraph(c);
  }
  const auto da = testing::RunDigests(a.path());
  EXPECT_EQ(da, testing::RunDigests(b.path()));
  EXPECT_TRUE(da.count(MetricsName("gcn")));
  EXPECT_TRUE(da.count(Artifacts::kGraph));

  const PipelineConfig c = Config(other.path(), 8);
  EXPECT_EQ(c.master_seed, 8u);
  Generate(c);
  EXPECT_NE(testing::RunDigests(other.path()).at(Artifacts::kTransactions),
            da.at(Artifacts::kTransactions));
}

TEST(PipelineConfigTest, RejectsBadValues) {
  auto load = [](const std::string& text) {
    return LoadPipelineConfig(ConfigFile::Parse(text), fs::temp_directory_path());
  };
  EXPECT_NO_THROW(load("seed = 3\n"));
  for (const char* bad : {"[train]\nsampling = bogus\n", "[train]\nmethod = sage\n",
                          "[topology]\naccounts = 0\n", "[compress]\nstrategy = random\n"}) {
    try {
      load(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig) << bad;
    }
  }
}

}  // namespace
}  // namespace aml::pipeline
