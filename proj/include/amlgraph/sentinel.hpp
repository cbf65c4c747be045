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

// Rule-based transaction monitoring.
//
//   over_threshold  amount >= threshold
//   near_miss       near_miss_fraction * threshold <= amount < threshold
//   velocity        >= velocity_count transactions from one debited account,
//                   each >= velocity_amount, spanning at most velocity_window
//                   steps (last - first + 1 <= velocity_window). Only maximal
//                   windows are reported.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "amlgraph/config.hpp"
#include "amlgraph/linalg.hpp"
#include "amlgraph/txflow.hpp"

namespace aml::sentinel {

enum class Rule : std::uint8_t { kOverThreshold, kNearMiss, kVelocity };

std::string_view ToString(Rule r);
Rule ParseRule(std::string_view s);

struct RuleSet {
  Money threshold = Money::FromDollars(10000);
  double near_miss_fraction = 0.95;
  std::uint32_t velocity_count = 5;
  Money velocity_amount = Money::FromDollars(2000);
  std::uint32_t velocity_window = 24;  // steps

  void Validate() const;
  // Smallest amount that counts as a near miss.
  Money NearMissFloor() const;
  // Keys: threshold, near_miss_fraction, velocity_count, velocity_amount,
  // velocity_window.
  static RuleSet FromSection(const ConfigSection& section);
};

struct Alert {
  std::uint64_t alert_id = 0;
  Rule rule = Rule::kOverThreshold;
  AccountId account_id = 0;  // debited account
  std::vector<std::uint64_t> tx_ids;
  txflow::StepRange window;

  friend bool operator==(const Alert&, const Alert&) = default;
};

// Alerts ordered by (rule, first tx_id) with alert_id = position. Throws
// Error(kContract) when `txs` is not sorted by (timestamp, tx_id).
std::vector<Alert> Scan(const std::vector<txflow::Transaction>& txs, const RuleSet& rules);

// Per-account feature columns, in this order.
inline constexpr std::array<std::string_view, 16> kFeatureNames = {
    "in_degree",       "out_degree",      "in_tx_count",      "out_tx_count",
    "in_amount",       "out_amount",      "mean_in_amount",   "mean_out_amount",
    "max_in_amount",   "max_out_amount",  "alerts_over_threshold", "alerts_near_miss",
    "alerts_velocity", "flagged_credits", "active_steps",     "net_flow"};
inline constexpr std::size_t kFeatureCount = kFeatureNames.size();

// Raw (unscaled) features, one row per account. Degrees count distinct
// counterparties; amounts are in dollars; alert counts are keyed on the
// debited account; flagged_credits counts incoming transactions that raised an
// over_threshold or near_miss alert.
linalg::Matrix AlertFeatures(std::size_t account_count,
                             const std::vector<txflow::Transaction>& txs,
                             const std::vector<Alert>& alerts);

// Model input scaling: signed log1p per entry, then per-column z-score
// (constant columns become zero).
linalg::Matrix ScaleFeatures(const linalg::Matrix& raw);

void WriteAlertsCsv(const std::filesystem::path& path, const std::vector<Alert>& alerts);
std::vector<Alert> ReadAlertsCsv(const std::filesystem::path& path);

}  // namespace aml::sentinel
