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

// Uses only the public C header, the way a foreign caller would.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "amlgraph/amlgraph.h"

namespace {

namespace fs = std::filesystem;

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag)
      : path_(fs::temp_directory_path() / ("amlgraph_capi_" + tag)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

void Write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

TEST(CApiTest, StatusStrings) {
  EXPECT_STREQ(aml_status_string(AML_OK), "ok");
  EXPECT_NE(std::string(aml_status_string(AML_STALE)), "");
  EXPECT_NE(std::string(aml_status_string(static_cast<aml_status>(55))), "");
  EXPECT_NE(std::string(aml_version()), "");
}

TEST(CApiTest, NullArgumentsAreRejected) {
  aml_pipeline* p = nullptr;
  EXPECT_EQ(aml_pipeline_open(nullptr, "/tmp", 0, 0, &p), AML_INVALID_ARGUMENT);
  EXPECT_EQ(p, nullptr);
  EXPECT_NE(std::string(aml_last_error()), "");
  EXPECT_EQ(aml_generate(nullptr), AML_INVALID_ARGUMENT);
  EXPECT_EQ(aml_scan_file(nullptr, nullptr, nullptr), AML_INVALID_ARGUMENT);
  EXPECT_EQ(aml_graph_open("x", nullptr), AML_INVALID_ARGUMENT);
  aml_pipeline_close(nullptr);
  aml_alerts_free(nullptr);
  aml_graph_free(nullptr);
}

TEST(CApiTest, MissingConfigIsAnIoError) {
  aml_pipeline* p = nullptr;
  EXPECT_EQ(aml_pipeline_open("/nonexistent/amlgraph.ini", "/tmp", 0, 0, &p), AML_IO);
  EXPECT_NE(std::string(aml_last_error()).find("amlgraph.ini"), std::string::npos);
}

TEST(CApiTest, BadConfigValueIsAConfigError) {
  ScratchDir dir("badcfg");
  Write(dir / "bad.ini", "[train]\noptimizer = momentum\n");
  aml_pipeline* p = nullptr;
  EXPECT_EQ(aml_pipeline_open((dir / "bad.ini").c_str(), dir.str().c_str(), 0, 0, &p),
            AML_CONFIG);
}

TEST(CApiTest, SeedOverride) {
  ScratchDir dir("seed");
  aml_pipeline* p = nullptr;
  ASSERT_EQ(aml_pipeline_open(AMLGRAPH_SMALL_CONFIG, dir.str().c_str(), 0, 0, &p), AML_OK);
  EXPECT_EQ(aml_pipeline_seed(p), 7u);
  aml_pipeline_close(p);
  ASSERT_EQ(aml_pipeline_open(AMLGRAPH_SMALL_CONFIG, dir.str().c_str(), 1, 99, &p), AML_OK);
  EXPECT_EQ(aml_pipeline_seed(p), 99u);
  aml_pipeline_close(p);
}

TEST(CApiTest, PipelineScanAndCompressedGraph) {
  ScratchDir dir("pipeline");
  aml_pipeline* p = nullptr;
  ASSERT_EQ(aml_pipeline_open(AMLGRAPH_SMALL_CONFIG, dir.str().c_str(), 0, 0, &p), AML_OK);

  // Scanning before generating has no input.
  EXPECT_EQ(aml_scan(p), AML_IO);
  EXPECT_NE(std::string(aml_last_error()).find("transactions.csv"), std::string::npos);

  ASSERT_EQ(aml_generate(p), AML_OK) << aml_last_error();
  EXPECT_NE(std::string(aml_pipeline_summary(p)).find("accounts 5000"), std::string::npos);
  ASSERT_EQ(aml_scan(p), AML_OK) << aml_last_error();
  EXPECT_EQ(aml_train(p, "sage"), AML_CONFIG);
  ASSERT_EQ(aml_compress(p, "degree"), AML_OK) << aml_last_error();
  EXPECT_EQ(aml_compress(p, "random"), AML_CONFIG);
  aml_pipeline_close(p);

  aml_alerts* alerts = nullptr;
  ASSERT_EQ(aml_scan_file((dir / "transactions.csv").c_str(), AMLGRAPH_SMALL_CONFIG, &alerts),
            AML_OK);
  const size_t n = aml_alerts_count(alerts);
  ASSERT_GT(n, 0u);
  aml_alert_info info{};
  for (size_t i = 0; i < n; ++i) {
    ASSERT_EQ(aml_alerts_get(alerts, i, &info), AML_OK);
    EXPECT_LE(info.window_start, info.window_end);
    EXPECT_GE(info.tx_count, 1u);
    EXPECT_LT(info.account_id, 5000u);
  }
  const std::string rule = info.rule;
  EXPECT_TRUE(rule == "over_threshold" || rule == "near_miss" || rule == "velocity");
  EXPECT_EQ(aml_alerts_get(alerts, n, &info), AML_OUT_OF_RANGE);
  aml_alerts_free(alerts);

  aml_graph* g = nullptr;
  ASSERT_EQ(aml_graph_open((dir / "graph.amlg").c_str(), &g), AML_OK);
  EXPECT_EQ(aml_graph_vertex_count(g), 5000u);
  EXPECT_GT(aml_graph_ratio(g), 1.0);
  size_t edges = 0;
  size_t degree = 0;
  std::vector<uint32_t> buf(8);
  for (uint32_t v = 0; v < 5000; ++v) {
    ASSERT_EQ(aml_graph_neighbors(g, v, buf.data(), buf.size(), &degree), AML_OK);
    edges += degree;
  }
  EXPECT_EQ(edges, aml_graph_edge_count(g));
  // Degree order puts the largest row first; a short buffer still reports it.
  ASSERT_EQ(aml_graph_neighbors(g, 0, buf.data(), 1, &degree), AML_OK);
  EXPECT_GT(degree, 1u);
  EXPECT_EQ(aml_graph_neighbors(g, 5000, buf.data(), buf.size(), &degree), AML_OUT_OF_RANGE);
  aml_graph_free(g);
}

TEST(CApiTest, CorruptGraphFileIsRejected) {
  ScratchDir dir("corrupt");
  Write(dir / "g.amlg", "not a graph");
  aml_graph* g = nullptr;
  EXPECT_NE(aml_graph_open((dir / "g.amlg").c_str(), &g), AML_OK);
  EXPECT_EQ(g, nullptr);
}

}  // namespace
