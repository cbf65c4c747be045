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

#include "amlgraph/sentinel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "csv.hpp"

namespace aml::sentinel {

using txflow::Transaction;

std::string_view ToString(Rule r) {
  switch (r) {
    case Rule::kOverThreshold: return "over_threshold";
    case Rule::kNearMiss: return "near_miss";
    case Rule::kVelocity: return "velocity";
  }
  return "?";
}

Rule ParseRule(std::string_view s) {
  if (s == "over_threshold") return Rule::kOverThreshold;
  if (s == "near_miss") return Rule::kNearMiss;
  if (s == "velocity") return Rule::kVelocity;
  throw Error(ErrorCode::kInvalidArgument, "unknown rule '" + std::string(s) + "'");
}

void RuleSet::Validate() const {
  if (threshold.cents() <= 0) throw Error(ErrorCode::kConfig, "threshold must be positive");
  if (!(near_miss_fraction > 0.0 && near_miss_fraction < 1.0)) {
    throw Error(ErrorCode::kConfig, "near_miss_fraction must lie in (0, 1)");
  }
  if (NearMissFloor() >= threshold) {
    throw Error(ErrorCode::kConfig, "near-miss floor must be below the threshold");
  }
  if (velocity_count < 1) throw Error(ErrorCode::kConfig, "velocity_count must be positive");
  if (velocity_window < 1) throw Error(ErrorCode::kConfig, "velocity_window must be positive");
  if (velocity_amount.cents() <= 0) {
    throw Error(ErrorCode::kConfig, "velocity_amount must be positive");
  }
}

Money RuleSet::NearMissFloor() const {
  // 0.95 * 1'000'000 evaluates to 949999.99999..., hence the slack.
  const double cents = near_miss_fraction * static_cast<double>(threshold.cents());
  return Money::FromCents(static_cast<std::int64_t>(std::ceil(cents - 1e-6)));
}

RuleSet RuleSet::FromSection(const ConfigSection& s) {
  RuleSet r;
  r.threshold = Money::Parse(s.GetString("threshold", r.threshold.ToString()));
  r.near_miss_fraction = s.GetDouble("near_miss_fraction", r.near_miss_fraction);
  r.velocity_count = static_cast<std::uint32_t>(s.GetUint("velocity_count", r.velocity_count));
  r.velocity_amount = Money::Parse(s.GetString("velocity_amount", r.velocity_amount.ToString()));
  r.velocity_window = static_cast<std::uint32_t>(s.GetUint("velocity_window", r.velocity_window));
  r.Validate();
  return r;
}

std::vector<Alert> Scan(const std::vector<Transaction>& txs, const RuleSet& rules) {
  rules.Validate();
  if (!txflow::IsSorted(txs)) {
    throw Error(ErrorCode::kContract, "scan input must be sorted by (timestamp, tx_id)");
  }
  const Money near_floor = rules.NearMissFloor();
  std::vector<Alert> alerts;

  AccountId max_src = 0;
  for (const Transaction& tx : txs) max_src = std::max(max_src, tx.src);
  std::vector<std::vector<const Transaction*>> qualifying(txs.empty() ? 0 : max_src + 1);

  for (const Transaction& tx : txs) {
    if (tx.amount >= rules.threshold) {
      alerts.push_back({0, Rule::kOverThreshold, tx.src, {tx.tx_id}, {tx.timestamp, tx.timestamp}});
    } else if (tx.amount >= near_floor) {
      alerts.push_back({0, Rule::kNearMiss, tx.src, {tx.tx_id}, {tx.timestamp, tx.timestamp}});
    }
    if (tx.amount >= rules.velocity_amount) qualifying[tx.src].push_back(&tx);
  }

  // Two pointers per account: hi(i) is the last index within the window that
  // opens at i. [i, hi(i)] is maximal iff hi(i) > hi(i - 1).
  const Step span = rules.velocity_window - 1;
  for (AccountId a = 0; a < qualifying.size(); ++a) {
    const auto& q = qualifying[a];
    std::size_t hi = 0;
    std::size_t prev_hi = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      hi = std::max(hi, i);
      while (hi + 1 < q.size() && q[hi + 1]->timestamp - q[i]->timestamp <= span) ++hi;
      const bool maximal = i == 0 || hi > prev_hi;
      prev_hi = hi;
      if (!maximal || hi - i + 1 < rules.velocity_count) continue;
      Alert al{0, Rule::kVelocity, a, {}, {q[i]->timestamp, q[hi]->timestamp}};
      for (std::size_t k = i; k <= hi; ++k) al.tx_ids.push_back(q[k]->tx_id);
      alerts.push_back(std::move(al));
    }
  }

  std::stable_sort(alerts.begin(), alerts.end(), [](const Alert& x, const Alert& y) {
    if (x.rule != y.rule) return x.rule < y.rule;
    return x.tx_ids.front() < y.tx_ids.front();
  });
  for (std::size_t i = 0; i < alerts.size(); ++i) alerts[i].alert_id = i;
  return alerts;
}

linalg::Matrix AlertFeatures(std::size_t account_count, const std::vector<Transaction>& txs,
                             const std::vector<Alert>& alerts) {
  enum Col : std::size_t {
    kInDeg, kOutDeg, kInCount, kOutCount, kInAmount, kOutAmount, kMeanIn, kMeanOut,
    kMaxIn, kMaxOut, kAlertOver, kAlertNear, kAlertVelocity, kFlaggedCredits,
    kActiveSteps, kNetFlow
  };
  linalg::Matrix f(account_count, kFeatureCount);
  auto check = [&](AccountId a) {
    if (a >= account_count) {
      throw Error(ErrorCode::kInvalidArgument, "account id " + std::to_string(a) + " out of range");
    }
  };

  std::vector<std::int64_t> in_cents(account_count, 0), out_cents(account_count, 0);
  std::vector<std::int64_t> max_in(account_count, 0), max_out(account_count, 0);
  std::vector<std::pair<AccountId, AccountId>> pairs;  // (account, counterparty)
  std::vector<std::pair<AccountId, AccountId>> in_pairs;
  std::vector<std::pair<AccountId, Step>> active;
  pairs.reserve(txs.size());
  in_pairs.reserve(txs.size());
  active.reserve(2 * txs.size());
  std::unordered_map<std::uint64_t, const Transaction*> by_id;
  by_id.reserve(txs.size());

  for (const Transaction& tx : txs) {
    check(tx.src);
    check(tx.dst);
    by_id.emplace(tx.tx_id, &tx);
    f(tx.src, kOutCount) += 1;
    f(tx.dst, kInCount) += 1;
    out_cents[tx.src] += tx.amount.cents();
    in_cents[tx.dst] += tx.amount.cents();
    max_out[tx.src] = std::max(max_out[tx.src], tx.amount.cents());
    max_in[tx.dst] = std::max(max_in[tx.dst], tx.amount.cents());
    pairs.emplace_back(tx.src, tx.dst);
    in_pairs.emplace_back(tx.dst, tx.src);
    active.emplace_back(tx.src, tx.timestamp);
    active.emplace_back(tx.dst, tx.timestamp);
  }
  auto count_distinct = [&](auto& v, std::size_t col) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (const auto& p : v) f(p.first, col) += 1;
  };
  count_distinct(pairs, kOutDeg);
  count_distinct(in_pairs, kInDeg);
  count_distinct(active, kActiveSteps);

  for (std::size_t a = 0; a < account_count; ++a) {
    f(a, kInAmount) = static_cast<double>(in_cents[a]) / 100.0;
    f(a, kOutAmount) = static_cast<double>(out_cents[a]) / 100.0;
    f(a, kMeanIn) = f(a, kInCount) > 0 ? f(a, kInAmount) / f(a, kInCount) : 0.0;
    f(a, kMeanOut) = f(a, kOutCount) > 0 ? f(a, kOutAmount) / f(a, kOutCount) : 0.0;
    f(a, kMaxIn) = static_cast<double>(max_in[a]) / 100.0;
    f(a, kMaxOut) = static_cast<double>(max_out[a]) / 100.0;
    f(a, kNetFlow) = static_cast<double>(in_cents[a] - out_cents[a]) / 100.0;
  }

  for (const Alert& al : alerts) {
    check(al.account_id);
    switch (al.rule) {
      case Rule::kOverThreshold: f(al.account_id, kAlertOver) += 1; break;
      case Rule::kNearMiss: f(al.account_id, kAlertNear) += 1; break;
      case Rule::kVelocity: f(al.account_id, kAlertVelocity) += 1; break;
    }
    if (al.rule != Rule::kVelocity) {
      for (std::uint64_t id : al.tx_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
          throw Error(ErrorCode::kInvalidArgument, "alert references unknown tx " + std::to_string(id));
        }
        f(it->second->dst, kFlaggedCredits) += 1;
      }
    }
  }
  return f;
}

linalg::Matrix ScaleFeatures(const linalg::Matrix& raw) {
  linalg::Matrix x(raw.rows(), raw.cols());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = raw.data()[i];
    x.data()[i] = std::copysign(std::log1p(std::abs(v)), v);
  }
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
    mean /= static_cast<double>(std::max<std::size_t>(x.rows(), 1));
    double var = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
    var /= static_cast<double>(std::max<std::size_t>(x.rows(), 1));
    const double sd = std::sqrt(var);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      x(r, c) = sd > 1e-12 ? (x(r, c) - mean) / sd : 0.0;
    }
  }
  return x;
}

void WriteAlertsCsv(const std::filesystem::path& path, const std::vector<Alert>& alerts) {
  csv::Writer w(path);
  w.Line("alert_id,rule,account_id,window_start,window_end,tx_ids");
  std::string ids;
  for (const Alert& a : alerts) {
    ids.clear();
    for (std::uint64_t id : a.tx_ids) {
      if (!ids.empty()) ids.push_back(';');
      ids += std::to_string(id);
    }
    w.Row(a.alert_id, ToString(a.rule), a.account_id, a.window.first, a.window.last, ids);
  }
  w.Close();
}

std::vector<Alert> ReadAlertsCsv(const std::filesystem::path& path) {
  csv::Reader r(path, "alert_id,rule,account_id,window_start,window_end,tx_ids");
  std::vector<Alert> out;
  std::vector<std::string_view> f;
  while (r.Next(f, 6)) {
    Alert a;
    a.alert_id = r.ToUint(f[0]);
    a.rule = ParseRule(f[1]);
    a.account_id = r.ToUint<AccountId>(f[2]);
    a.window = {r.ToUint<Step>(f[3]), r.ToUint<Step>(f[4])};
    std::string_view ids = f[5];
    while (!ids.empty()) {
      const std::size_t semi = std::min(ids.find(';'), ids.size());
      a.tx_ids.push_back(r.ToUint(ids.substr(0, semi)));
      ids.remove_prefix(std::min(semi + 1, ids.size()));
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace aml::sentinel
