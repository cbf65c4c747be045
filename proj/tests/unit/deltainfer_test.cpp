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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "amlgraph/deltainfer.hpp"
#include "oracles.hpp"

namespace aml::deltainfer {
namespace {

using EdgeList = std::vector<std::pair<VertexId, VertexId>>;

Matrix RandomFeatures(std::size_t n, std::size_t f, std::uint64_t seed) {
  Matrix m(n, f);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  for (double& v : m.data()) v = d(rng);
  return m;
}

IncrementalEngine MakeEngine(const gstore::CsrGraph& g, std::uint64_t seed) {
  return IncrementalEngine(g, RandomFeatures(g.vertex_count, 6, seed),
                           gcnkit::InitModel(6, 8, 2, seed + 1));
}

Matrix FullRecompute(const IncrementalEngine& e) {
  return gcnkit::Forward(gcnkit::NormalizeAdjacency(e.graph().Materialize()), e.features(),
                         e.model());
}

// Closed 2-hop ball around the endpoints, by BFS on the current graph.
std::set<VertexId> Ball(const OverlayGraph& g, std::vector<VertexId> frontier, int hops) {
  std::set<VertexId> seen(frontier.begin(), frontier.end());
  std::vector<VertexId> nbrs;
  for (int h = 0; h < hops; ++h) {
    std::vector<VertexId> next;
    for (VertexId v : frontier) {
      g.Neighbors(v, false, nbrs);
      for (VertexId w : nbrs) {
        if (seen.insert(w).second) next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return seen;
}

gstore::CsrGraph PathGraph(std::uint32_t n) {
  EdgeList edges;
  for (VertexId v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return gstore::BuildCsr(n, edges);
}

TEST(OverlayGraphTest, TracksInsertionsOverTheBase) {
  OverlayGraph g(gstore::BuildCsr(4, EdgeList{{0, 1}, {1, 0}, {2, 2}}));
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g.HasEdge(1, 0));
  EXPECT_FALSE(g.AddEdge(0, 1));
  EXPECT_FALSE(g.AddEdge(3, 3));
  EXPECT_TRUE(g.AddEdge(3, 1));
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.degree(1), 2u);
  std::vector<VertexId> row;
  g.Neighbors(1, true, row);
  EXPECT_EQ(row, (std::vector<VertexId>{0, 1, 3}));
  const gstore::CsrGraph before = g.Materialize();
  g.Compact();
  EXPECT_EQ(g.delta_size(), 0u);
  EXPECT_EQ(g.Materialize(), before);
}

TEST(DeltaInferTest, NoNewTransactionsGiveEmptyDirtySet) {
  IncrementalEngine e = MakeEngine(PathGraph(10), 1);
  const DirtySet none = e.ApplyEdges(EdgeList{});
  EXPECT_TRUE(none.empty());
  const DirtySet repeat = e.ApplyEdges(EdgeList{{3, 4}, {4, 3}, {5, 5}});
  EXPECT_TRUE(repeat.empty());
  EXPECT_EQ(e.epoch(), 0u);
  const auto before = e.Current().probs;
  const RefreshStats stats = e.Refresh(repeat);
  EXPECT_EQ(stats.layer2_rows, 0u);
  EXPECT_EQ(e.Current().probs, before);
}

TEST(DeltaInferTest, PathEdgeDirtiesTheClosedTwoHopBall) {
  IncrementalEngine e = MakeEngine(PathGraph(20), 2);
  const DirtySet d = e.ApplyEdges(EdgeList{{5, 12}});
  // Layer 1: endpoints and their neighbors. Layer 2: one hop further.
  EXPECT_EQ(d.layer1, (std::vector<VertexId>{4, 5, 6, 11, 12, 13}));
  EXPECT_EQ(d.layer2, (std::vector<VertexId>{3, 4, 5, 6, 7, 10, 11, 12, 13, 14}));
  EXPECT_EQ(d.epoch, 1u);
  const RefreshStats stats = e.Refresh(d);
  EXPECT_EQ(stats.layer2_rows, 10u);
  EXPECT_EQ(*e.Current().probs, FullRecompute(e));
}

TEST(DeltaInferTest, RandomBatchesMatchFullRecompute) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t n = 200 + static_cast<std::uint32_t>(rng() % 300);
    IncrementalEngine e = MakeEngine(gstore::BuildCsr(n, testing::RandomEdges(rng(), n, 2 * n)),
                                     rng());
    const auto batch = testing::RandomEdges(rng(), n, 1 + rng() % 20);
    const DirtySet d = e.ApplyEdges(batch);
    e.Refresh(d);
    const Matrix want = FullRecompute(e);
    EXPECT_LE(linalg::MaxAbsDiff(*e.Current().probs, want), 1e-9) << "trial " << trial;
    EXPECT_EQ(*e.Current().probs, want) << "trial " << trial;
  }
}

TEST(DeltaInferTest, RowsRecomputedStayInsideTheBall) {
  std::mt19937_64 rng(4);
  const std::uint32_t n = 2000;
  IncrementalEngine e = MakeEngine(gstore::BuildCsr(n, testing::RandomEdges(5, n, 4000)), 6);
  for (int i = 0; i < 50; ++i) {
    const VertexId u = rng() % n;
    const VertexId v = rng() % n;
    const DirtySet d = e.ApplyEdges(EdgeList{{u, v}});
    if (d.empty()) continue;
    const std::set<VertexId> ball = Ball(e.graph(), {u, v}, 2);
    EXPECT_EQ(std::set<VertexId>(d.layer2.begin(), d.layer2.end()), ball);
    const RefreshStats stats = e.Refresh(d);
    EXPECT_LE(stats.layer2_rows, ball.size());
    EXPECT_LE(stats.layer1_rows, Ball(e.graph(), {u, v}, 1).size());
  }
}

TEST(DeltaInferTest, SequentialUpdatesDoNotDrift) {
  std::mt19937_64 rng(7);
  const std::uint32_t n = 500;
  IncrementalEngine e = MakeEngine(gstore::BuildCsr(n, testing::RandomEdges(8, n, 1000)), 9);
  for (int i = 0; i < 100; ++i) {
    const VertexId u = rng() % n;
    const VertexId v = rng() % n;
    e.Refresh(e.ApplyEdges(EdgeList{{u, v}}));
  }
  EXPECT_LT(linalg::MaxAbsDiff(*e.Current().probs, FullRecompute(e)), 1e-7);
}

TEST(DeltaInferTest, TransactionsAddUndirectedEdges) {
  IncrementalEngine e = MakeEngine(PathGraph(10), 10);
  std::vector<txflow::Transaction> txs(2);
  txs[0].src = 8;
  txs[0].dst = 1;
  txs[1].src = 1;
  txs[1].dst = 8;
  const DirtySet d = e.ApplyTransactions(txs);
  EXPECT_TRUE(e.graph().HasEdge(1, 8));
  EXPECT_EQ(e.graph().edge_count(), 10u);
  e.Refresh(d);
  EXPECT_EQ(*e.Current().probs, FullRecompute(e));
}

TEST(DeltaInferTest, StaleDirtySetIsRejected) {
  IncrementalEngine e = MakeEngine(PathGraph(10), 11);
  const DirtySet first = e.ApplyEdges(EdgeList{{0, 5}});
  const DirtySet second = e.ApplyEdges(EdgeList{{2, 8}});
  try {
    e.Refresh(first);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kStale);
  }
  DirtySet merged = first;
  merged.Merge(second);
  EXPECT_EQ(merged.epoch, 2u);
  EXPECT_TRUE(std::is_sorted(merged.layer2.begin(), merged.layer2.end()));
  EXPECT_EQ(std::adjacent_find(merged.layer2.begin(), merged.layer2.end()), merged.layer2.end());
  e.Refresh(merged);
  EXPECT_EQ(e.Current().epoch, 2u);
  EXPECT_EQ(*e.Current().probs, FullRecompute(e));
}

TEST(DeltaInferTest, UnknownAccountLeavesGraphUntouched) {
  IncrementalEngine e = MakeEngine(PathGraph(10), 12);
  try {
    e.ApplyEdges(EdgeList{{0, 5}, {3, 10}});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kOutOfRange);
  }
  EXPECT_FALSE(e.graph().HasEdge(0, 5));
  EXPECT_EQ(e.epoch(), 0u);
}

TEST(DeltaInferTest, SnapshotsAreImmutableAcrossRefreshes) {
  IncrementalEngine e = MakeEngine(PathGraph(10), 13);
  const Snapshot before = e.Current();
  const Matrix copy = *before.probs;
  e.Refresh(e.ApplyEdges(EdgeList{{0, 9}}));
  EXPECT_EQ(*before.probs, copy);
  EXPECT_NE(*e.Current().probs, copy);
}

TEST(DeltaInferTest, ReadsTransactionStream) {
  testing::TempDir dir("stream");
  std::vector<txflow::Transaction> txs = testing::RandomLog(14, 50, 20, 100);
  txflow::WriteTransactionsCsv(dir / "s.csv", txs);
  EXPECT_EQ(ReadTransactionStream(dir / "s.csv"), txs);
  testing::WriteFile(dir / "bad.csv", "tx_id,src,dst,amount,timestamp\n1,2,x,1.00,0\n");
  try {
    ReadTransactionStream(dir / "bad.csv");
    FAIL();
  } catch (const Error& err) {
    EXPECT_NE(std::string(err.what()).find("bad.csv:2"), std::string::npos);
  }
  EXPECT_THROW(ReadTransactionStream(dir / "missing.csv"), Error);
}

}  // namespace
}  // namespace aml::deltainfer
