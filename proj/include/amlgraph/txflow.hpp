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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "amlgraph/common.hpp"
#include "amlgraph/config.hpp"
#include "amlgraph/simnet.hpp"

namespace aml::txflow {

// One simulation step is one hour; the 24-step velocity window is a day.
inline constexpr std::uint32_t kSecondsPerStep = 3600;

struct Transaction {
  std::uint64_t tx_id = 0;
  AccountId src = 0;
  AccountId dst = 0;
  Money amount;
  Step timestamp = 0;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct LogNormal {
  double mu = 6.5;
  double sigma = 1.0;
};

struct FlowConfig {
  std::uint32_t steps = 48;
  double tx_rate = 0.05;  // expected transactions per channel per step
  // Amount model indexed [src_type][dst_type].
  std::array<std::array<LogNormal, simnet::kAccountTypeCount>, simnet::kAccountTypeCount>
      amount_model{};
  std::uint64_t seed = 0;

  void Validate() const;
  // Keys: steps, tx_rate, seed, amount_mu, amount_sigma (all pairs) and
  // per-pair overrides amount_mu_<src>_<dst> / amount_sigma_<src>_<dst>.
  static FlowConfig FromSection(const ConfigSection& section);
};

// Channels emit Poisson(tx_rate) transactions per step with lognormal amounts
// rounded to cents. Every channel draws from its own stream seeded by
// SubSeed(seed, channel index), so the result does not depend on the order in
// which channels are simulated. Output is sorted by (timestamp, tx_id).
std::vector<Transaction> SimulateFlow(const simnet::AccountGraph& graph,
                                      const FlowConfig& config);

// Inclusive step range; empty when first > last.
struct StepRange {
  Step first = 0;
  Step last = 0;

  bool empty() const { return first > last; }
  bool Contains(Step s) const { return s >= first && s <= last; }
  friend bool operator==(const StepRange&, const StepRange&) = default;
};

struct WeightedEdge {
  AccountId src = 0;
  AccountId dst = 0;
  Money total;
  std::uint64_t count = 0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

// One edge per (src, dst) pair with transactions in `window`, sorted by
// (src, dst).
std::vector<WeightedEdge> AggregateEdges(const std::vector<Transaction>& txs,
                                         StepRange window);

// Sorts by (timestamp, existing order) and reassigns dense ascending tx_ids.
void Renumber(std::vector<Transaction>& txs);

bool IsSorted(const std::vector<Transaction>& txs);

void WriteTransactionsCsv(const std::filesystem::path& path,
                          const std::vector<Transaction>& txs);
std::vector<Transaction> ReadTransactionsCsv(const std::filesystem::path& path);

inline constexpr std::string_view kTransactionsHeader = "tx_id,src,dst,amount,timestamp";

// Parses one `tx_id,src,dst,amount,timestamp` row. Returns nullopt for blank
// lines and the header line.
std::optional<Transaction> ParseTransactionRow(std::string_view line);

}  // namespace aml::txflow
