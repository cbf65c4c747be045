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

#include <numeric>
#include <random>
#include <set>

#include "amlgraph/gstore.hpp"
#include "amlgraph/simnet.hpp"
#include "oracles.hpp"

namespace aml::gstore {
namespace {

using EdgeList = std::vector<std::pair<VertexId, VertexId>>;

CsrGraph RandomGraph(std::uint64_t seed, std::uint32_t n, std::size_t m) {
  return BuildCsr(n, testing::RandomEdges(seed, n, m));
}

Permutation RandomPermutation(std::uint64_t seed, std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0u);
  std::mt19937_64 rng(seed);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

TEST(GstoreTest, HandBuiltCsr) {
  const EdgeList edges = {{0, 2}, {0, 1}, {0, 2}};
  const CsrGraph g = BuildCsr(3, edges);
  EXPECT_EQ(g.offsets, (std::vector<std::uint64_t>{0, 2, 2, 2}));
  EXPECT_EQ(g.neighbors, (std::vector<VertexId>{1, 2}));
}

TEST(GstoreTest, EmptyEdgeSet) {
  const CsrGraph g = BuildCsr(4, EdgeList{});
  EXPECT_EQ(g.offsets, (std::vector<std::uint64_t>(5, 0)));
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(GstoreTest, OutOfRangeEndpointRejected) {
  try {
    BuildCsr(3, EdgeList{{0, 3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
}

TEST(GstoreTest, CsrMatchesEdgeSet) {
  const auto edges = testing::RandomEdges(1, 2000, 10000);
  const CsrGraph g = BuildCsr(2000, edges);
  const std::set<std::pair<VertexId, VertexId>> want(edges.begin(), edges.end());
  std::set<std::pair<VertexId, VertexId>> got;
  for (VertexId v = 0; v < g.vertex_count; ++v) {
    const auto row = g.row(v);
    EXPECT_TRUE(std::is_sorted(row.begin(), row.end()));
    for (VertexId u : row) got.emplace(v, u);
  }
  EXPECT_EQ(got, want);
  EXPECT_EQ(g.offsets.back(), edges.size());
}

TEST(GstoreTest, IdentityReorder) {
  const CsrGraph g = RandomGraph(2, 50, 200);
  Permutation want(50);
  std::iota(want.begin(), want.end(), 0u);
  EXPECT_EQ(Reorder(g, ReorderStrategy::kIdentity), want);
}

TEST(GstoreTest, StarCenterComesFirstUnderDegreeOrder) {
  EdgeList star;
  for (VertexId v = 0; v < 10; ++v) {
    if (v != 5) star.emplace_back(5, v);
  }
  const CsrGraph g = BuildCsr(10, star);
  EXPECT_EQ(Reorder(g, ReorderStrategy::kDegreeDesc)[5], 0u);
  EXPECT_EQ(Reorder(g, ReorderStrategy::kBfs)[5], 0u);
}

TEST(GstoreTest, BfsVisitsNeighborsInAscendingOldId) {
  // 0 has the highest degree: 0 -> {3, 1}, 1 -> {2}; 4 is unreached.
  const CsrGraph g = BuildCsr(5, EdgeList{{0, 3}, {0, 1}, {1, 2}});
  EXPECT_EQ(Reorder(g, ReorderStrategy::kBfs), (Permutation{0, 1, 3, 2, 4}));
}

TEST(GstoreTest, ReordersAreBijective) {
  const CsrGraph g = RandomGraph(3, 3000, 15000);
  for (ReorderStrategy s :
       {ReorderStrategy::kIdentity, ReorderStrategy::kBfs, ReorderStrategy::kDegreeDesc}) {
    Permutation p = Reorder(g, s);
    EXPECT_TRUE(IsPermutation(p));
    std::sort(p.begin(), p.end());
    for (VertexId i = 0; i < p.size(); ++i) ASSERT_EQ(p[i], i) << ToString(s);
  }
  EXPECT_FALSE(IsPermutation({0, 0, 1}));
  EXPECT_FALSE(IsPermutation({0, 3, 1}));
}

TEST(GstoreTest, ThreeConsecutiveNeighborsTakeThreeBytes) {
  const CsrGraph g = BuildCsr(14, EdgeList{{10, 11}, {10, 12}, {10, 13}});
  const CompressedGraph cg = Compress(g, Reorder(g, ReorderStrategy::kIdentity));
  EXPECT_EQ(cg.index[11] - cg.index[10], 3u);
  EXPECT_EQ(cg.payload.size(), 3u);
  EXPECT_EQ(DecodeNeighbors(cg, 10), (std::vector<VertexId>{11, 12, 13}));
  EXPECT_TRUE(DecodeNeighbors(cg, 3).empty());
  EXPECT_THROW(DecodeNeighbors(cg, 14), Error);
}

TEST(GstoreTest, NegativeFirstDeltaIsZigZagged) {
  const CsrGraph g = BuildCsr(300, EdgeList{{200, 1}, {200, 250}});
  const CompressedGraph cg = Compress(g, Reorder(g, ReorderStrategy::kIdentity));
  // zigzag(1 - 200) = 397 needs two bytes; the gap 249 needs two more.
  EXPECT_EQ(cg.payload.size(), 4u);
  EXPECT_EQ(cg.Neighbors(200), (std::vector<VertexId>{1, 250}));
}

TEST(GstoreTest, VarintAndZigZagPrimitives) {
  for (std::int64_t v : {0LL, 1LL, -1LL, 63LL, -64LL, 1LL << 40, -(1LL << 40)}) {
    EXPECT_EQ(UnZigZag(ZigZag(v)), v);
  }
  EXPECT_EQ(ZigZag(-1), 1u);
  EXPECT_EQ(ZigZag(1), 2u);
  std::vector<std::uint8_t> buf;
  PutVarint(buf, 127);
  EXPECT_EQ(buf.size(), 1u);
  PutVarint(buf, 128);
  EXPECT_EQ(buf.size(), 3u);
  PutVarint(buf, ~0ULL);
  const std::uint8_t* p = buf.data();
  const std::uint8_t* end = buf.data() + buf.size();
  EXPECT_EQ(GetVarint(p, end), 127u);
  EXPECT_EQ(GetVarint(p, end), 128u);
  EXPECT_EQ(GetVarint(p, end), ~0ULL);
  EXPECT_EQ(p, end);
}

TEST(GstoreTest, RandomGraphsRoundTripUnderRandomPermutations) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::uint32_t>(2 + rng() % 300);
    const std::size_t m = rng() % (4 * n);
    const CsrGraph g = RandomGraph(rng(), n, m);
    const Permutation perm = RandomPermutation(rng(), n);
    const CompressedGraph cg = Compress(g, perm);
    const CsrGraph want = Relabel(g, perm);
    ASSERT_EQ(cg.Decode(), want) << "trial " << trial;
    for (VertexId v = 0; v < n; ++v) {
      const auto row = want.row(v);
      ASSERT_EQ(DecodeNeighbors(cg, v), std::vector<VertexId>(row.begin(), row.end()));
    }
  }
}

TEST(GstoreTest, RelabelMovesEveryEdge) {
  const CsrGraph g = RandomGraph(5, 100, 400);
  const Permutation perm = RandomPermutation(6, 100);
  const CsrGraph r = Relabel(g, perm);
  std::set<std::pair<VertexId, VertexId>> want, got;
  for (VertexId v = 0; v < 100; ++v) {
    for (VertexId u : g.row(v)) want.emplace(perm[v], perm[u]);
    for (VertexId u : r.row(v)) got.emplace(v, u);
  }
  EXPECT_EQ(got, want);
}

TEST(GstoreTest, ReportUsesFourByteConvention) {
  const CsrGraph g = BuildCsr(14, EdgeList{{10, 11}, {10, 12}, {10, 13}});
  const auto report = MakeCompressionReport(Compress(g, Reorder(g, ReorderStrategy::kIdentity)));
  EXPECT_EQ(report.raw_bytes, 4u * (3 + 14 + 1));
  EXPECT_EQ(report.compressed_bytes, 3u + 4u * 15);
  EXPECT_DOUBLE_EQ(report.ratio, 72.0 / 63.0);
  const CsrGraph empty = BuildCsr(0, EdgeList{});
  EXPECT_EQ(MakeCompressionReport(Compress(empty, {})).ratio, 1.0);
}

TEST(GstoreTest, BinaryFileRoundTrip) {
  testing::TempDir dir("gstore");
  const CsrGraph g = RandomGraph(7, 500, 3000);
  const CompressedGraph cg = Compress(g, Reorder(g, ReorderStrategy::kBfs));
  WriteCompressed(dir / "g.amlg", cg);
  EXPECT_EQ(testing::ReadFile(dir / "g.amlg").substr(0, 5), "AMLG1");
  const CompressedGraph back = ReadCompressed(dir / "g.amlg");
  EXPECT_EQ(back.permutation, cg.permutation);
  EXPECT_EQ(back.index, cg.index);
  EXPECT_EQ(back.payload, cg.payload);
  EXPECT_EQ(back.Decode(), cg.Decode());

  testing::WriteFile(dir / "bad.amlg", "AMLG2xxxxxxxx");
  EXPECT_THROW(ReadCompressed(dir / "bad.amlg"), Error);
}

TEST(GstoreTest, EdgeCsvRoundTrip) {
  testing::TempDir dir("edges");
  const CsrGraph g = RandomGraph(8, 300, 1200);
  WriteEdgeCsv(dir / "e.csv", g);
  EXPECT_EQ(ReadEdgeCsv(dir / "e.csv", 300), g);
  EXPECT_EQ(testing::CountLines(dir / "e.csv"), 1201u);
}

TEST(GstoreTest, ReorderingDoesNotWidenGapsOnPowerLawGraphs) {
  simnet::TopologyConfig cfg;
  cfg.account_count = 10000;
  cfg.degree_model = simnet::PowerLaw{2.2, 3, 200};
  cfg.seed = 21;
  const auto topo = simnet::GenerateTopology(cfg);
  EdgeList edges;
  for (const auto& e : topo.edges) edges.emplace_back(e.src, e.dst);
  const CsrGraph g = BuildCsr(cfg.account_count, edges);
  const double identity = MeanNeighborGap(g);
  const double bfs = MeanNeighborGap(Relabel(g, Reorder(g, ReorderStrategy::kBfs)));
  const double degree = MeanNeighborGap(Relabel(g, Reorder(g, ReorderStrategy::kDegreeDesc)));
  EXPECT_LE(bfs, identity);
  EXPECT_LE(degree, identity);
}

}  // namespace
}  // namespace aml::gstore
