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

#include "amlgraph/txflow.hpp"
#include "oracles.hpp"

namespace aml::txflow {
namespace {

// `channels` accounts wired as a ring, one channel per account.
simnet::AccountGraph Ring(std::uint32_t channels) {
  simnet::AccountGraph g;
  g.accounts = simnet::PopulateAccounts(channels, {}, 11);
  for (std::uint32_t i = 0; i < channels; ++i) g.edges.push_back({i, (i + 1) % channels});
  return g;
}

FlowConfig Flow(std::uint32_t steps, double rate, std::uint64_t seed) {
  FlowConfig c;
  c.steps = steps;
  c.tx_rate = rate;
  c.seed = seed;
  return c;
}

TEST(TxflowTest, VanishingRateEmitsNothing) {
  EXPECT_TRUE(SimulateFlow(Ring(2), Flow(1, 1e-9, 3)).empty());
}

TEST(TxflowTest, TotalCountMatchesPoissonAggregate) {
  const auto g = Ring(1000);
  const auto [lo, hi] = testing::PoissonInterval(9000.0, 0.999);
  double sum = 0.0;
  constexpr int kTrials = 20;
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto txs = SimulateFlow(g, Flow(100, 0.09, 100 + trial));
    EXPECT_GE(static_cast<double>(txs.size()), lo);
    EXPECT_LE(static_cast<double>(txs.size()), hi);
    sum += static_cast<double>(txs.size());
  }
  // The mean of 20 trials has sd ~21, so 1% (90) is a >4 sigma band.
  EXPECT_NEAR(sum / kTrials, 9000.0, 90.0);
}

TEST(TxflowTest, SameSeedSameLog) {
  const auto g = Ring(200);
  EXPECT_EQ(SimulateFlow(g, Flow(24, 0.3, 5)), SimulateFlow(g, Flow(24, 0.3, 5)));
  EXPECT_NE(SimulateFlow(g, Flow(24, 0.3, 5)), SimulateFlow(g, Flow(24, 0.3, 6)));
}

TEST(TxflowTest, ChannelStreamsDoNotDependOnOtherChannels) {
  // Channel c's stream is seeded by its index, so appending channels leaves
  // the transactions of existing channels untouched.
  auto small = Ring(50);
  auto big = small;
  big.accounts = simnet::PopulateAccounts(60, {}, 11);
  big.edges.push_back({50, 51});
  const auto a = SimulateFlow(small, Flow(10, 0.5, 9));
  auto b = SimulateFlow(big, Flow(10, 0.5, 9));
  std::erase_if(b, [](const Transaction& t) { return t.src >= 50; });
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::tie(a[i].src, a[i].dst, a[i].amount, a[i].timestamp),
              std::tie(b[i].src, b[i].dst, b[i].amount, b[i].timestamp));
  }
}

TEST(TxflowTest, OutputIsSortedWithPositiveCentAmounts) {
  const auto txs = SimulateFlow(Ring(300), Flow(48, 0.2, 1));
  ASSERT_FALSE(txs.empty());
  EXPECT_TRUE(IsSorted(txs));
  for (std::size_t i = 0; i < txs.size(); ++i) {
    EXPECT_EQ(txs[i].tx_id, i);
    EXPECT_GT(txs[i].amount.cents(), 0);
    EXPECT_LT(txs[i].timestamp, 48u);
  }
}

TEST(TxflowTest, InvalidConfigRejected) {
  EXPECT_THROW(Flow(0, 0.1, 1).Validate(), Error);
  EXPECT_THROW(Flow(1, 0.0, 1).Validate(), Error);
  FlowConfig c = Flow(1, 0.1, 1);
  c.amount_model[1][2].sigma = 0.0;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(TxflowTest, AggregateSumsAmountsAndCounts) {
  std::vector<Transaction> txs = {{0, 1, 2, Money::Parse("100.00"), 0},
                                  {1, 1, 2, Money::Parse("50.00"), 1}};
  const auto edges = AggregateEdges(txs, {0, 1});
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0], (WeightedEdge{1, 2, Money::Parse("150.00"), 2}));
}

TEST(TxflowTest, EmptyWindowGivesNoEdges) {
  const auto txs = testing::RandomLog(1, 100, 10, 10);
  EXPECT_TRUE(AggregateEdges(txs, {5, 4}).empty());
}

TEST(TxflowTest, DisjointWindowsAddUpToTheFullLog) {
  const auto txs = testing::RandomLog(2, 2000, 40, 30);
  std::map<std::pair<AccountId, AccountId>, std::pair<std::int64_t, std::uint64_t>> parts;
  for (StepRange w : {StepRange{0, 9}, StepRange{10, 19}, StepRange{20, 29}}) {
    for (const auto& e : AggregateEdges(txs, w)) {
      auto& p = parts[{e.src, e.dst}];
      p.first += e.total.cents();
      p.second += e.count;
    }
  }
  std::map<std::pair<AccountId, AccountId>, std::pair<std::int64_t, std::uint64_t>> whole;
  for (const auto& e : AggregateEdges(txs, {0, 29})) {
    whole[{e.src, e.dst}] = {e.total.cents(), e.count};
  }
  EXPECT_EQ(parts, whole);
}

TEST(TxflowTest, AggregateMatchesHashMapOracle) {
  const auto txs = testing::RandomLog(3, 1000, 30, 20);
  const auto oracle = testing::AggregateOracle(txs, 3, 15);
  const auto edges = AggregateEdges(txs, {3, 15});
  ASSERT_EQ(edges.size(), oracle.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i > 0) {
      EXPECT_LT(std::tie(edges[i - 1].src, edges[i - 1].dst), std::tie(edges[i].src, edges[i].dst));
    }
    const auto it = oracle.find({edges[i].src, edges[i].dst});
    ASSERT_NE(it, oracle.end());
    EXPECT_EQ(edges[i].total.cents(), it->second.first);
    EXPECT_EQ(edges[i].count, it->second.second);
  }
}

TEST(TxflowTest, AggregationConservesTotalAmount) {
  const auto txs = SimulateFlow(Ring(500), Flow(48, 0.1, 4));
  std::int64_t raw = 0;
  for (const auto& t : txs) raw += t.amount.cents();
  std::int64_t agg = 0;
  for (const auto& e : AggregateEdges(txs, {0, 47})) agg += e.total.cents();
  EXPECT_EQ(raw, agg);
}

TEST(TxflowTest, RenumberSortsStablyByStep) {
  std::vector<Transaction> txs = {{7, 0, 1, Money::FromCents(1), 3},
                                  {8, 1, 2, Money::FromCents(2), 1},
                                  {9, 2, 3, Money::FromCents(3), 3}};
  Renumber(txs);
  EXPECT_TRUE(IsSorted(txs));
  EXPECT_EQ(txs[0].amount.cents(), 2);
  EXPECT_EQ(txs[1].amount.cents(), 1);
  EXPECT_EQ(txs[2].amount.cents(), 3);
}

TEST(TxflowTest, CsvRoundTripKeepsFixedPointAmounts) {
  testing::TempDir dir("txflow");
  const auto txs = SimulateFlow(Ring(100), Flow(12, 0.3, 8));
  WriteTransactionsCsv(dir / "tx.csv", txs);
  EXPECT_EQ(ReadTransactionsCsv(dir / "tx.csv"), txs);
  const std::string text = testing::ReadFile(dir / "tx.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), kTransactionsHeader);

  const auto row = ParseTransactionRow("4,1,2,9999.00,17\r\n");
  ASSERT_TRUE(row.has_value());
  EXPECT_EQ(row->amount, Money::FromDollars(9999));
  EXPECT_FALSE(ParseTransactionRow(kTransactionsHeader).has_value());
  EXPECT_FALSE(ParseTransactionRow("").has_value());
  EXPECT_THROW(ParseTransactionRow("1,2,3"), Error);
  EXPECT_THROW(ParseTransactionRow("1,2,3,-5.00,0"), Error);
}

}  // namespace
}  // namespace aml::txflow
