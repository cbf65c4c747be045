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

#include "amlgraph/txflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "csv.hpp"

namespace aml::txflow {

void FlowConfig::Validate() const {
  if (steps < 1) throw Error(ErrorCode::kConfig, "steps must be >= 1");
  if (!(tx_rate > 0.0) || !std::isfinite(tx_rate)) {
    throw Error(ErrorCode::kConfig, "tx_rate must be a positive real");
  }
  for (const auto& row : amount_model) {
    for (const LogNormal& ln : row) {
      if (!(ln.sigma > 0.0)) throw Error(ErrorCode::kConfig, "amount sigma must be > 0");
      if (!std::isfinite(ln.mu)) throw Error(ErrorCode::kConfig, "amount mu must be finite");
    }
  }
}

FlowConfig FlowConfig::FromSection(const ConfigSection& s) {
  FlowConfig c;
  c.steps = static_cast<std::uint32_t>(s.GetUint("steps", c.steps));
  c.tx_rate = s.GetDouble("tx_rate", c.tx_rate);
  c.seed = s.GetUint("seed", c.seed);
  const LogNormal base{s.GetDouble("amount_mu", 6.5), s.GetDouble("amount_sigma", 1.0)};
  for (std::size_t a = 0; a < simnet::kAccountTypeCount; ++a) {
    for (std::size_t b = 0; b < simnet::kAccountTypeCount; ++b) {
      const std::string suffix =
          std::string(simnet::ToString(static_cast<simnet::AccountType>(a))) + "_" +
          std::string(simnet::ToString(static_cast<simnet::AccountType>(b)));
      c.amount_model[a][b] = {s.GetDouble("amount_mu_" + suffix, base.mu),
                              s.GetDouble("amount_sigma_" + suffix, base.sigma)};
    }
  }
  c.Validate();
  return c;
}

std::vector<Transaction> SimulateFlow(const simnet::AccountGraph& graph,
                                      const FlowConfig& config) {
  config.Validate();
  const auto& accounts = graph.accounts;
  // Per-step buckets keep the merge a counting sort: within a step, emission
  // order is (channel index, draw order).
  std::vector<std::vector<Transaction>> by_step(config.steps);
  std::poisson_distribution<std::uint32_t> arrivals(config.tx_rate);

  for (std::size_t c = 0; c < graph.edges.size(); ++c) {
    const simnet::Edge& e = graph.edges[c];
    if (e.src >= accounts.size() || e.dst >= accounts.size() || e.src == e.dst) {
      throw Error(ErrorCode::kInvalidArgument, "invalid channel " + std::to_string(c));
    }
    Rng rng(SubSeed(config.seed, c));
    const LogNormal& m = config.amount_model[static_cast<std::size_t>(accounts[e.src].account_type)]
                                            [static_cast<std::size_t>(accounts[e.dst].account_type)];
    std::lognormal_distribution<double> amount(m.mu, m.sigma);
    for (Step t = 0; t < config.steps; ++t) {
      const std::uint32_t k = arrivals(rng);
      for (std::uint32_t i = 0; i < k; ++i) {
        const auto cents = static_cast<std::int64_t>(std::llround(amount(rng) * 100.0));
        by_step[t].push_back({0, e.src, e.dst, Money::FromCents(std::max<std::int64_t>(cents, 1)), t});
      }
    }
  }

  std::vector<Transaction> out;
  std::size_t total = 0;
  for (const auto& b : by_step) total += b.size();
  out.reserve(total);
  for (auto& b : by_step) {
    for (Transaction& tx : b) {
      tx.tx_id = out.size();
      out.push_back(tx);
    }
  }
  return out;
}

std::vector<WeightedEdge> AggregateEdges(const std::vector<Transaction>& txs,
                                         StepRange window) {
  std::vector<WeightedEdge> out;
  if (window.empty()) return out;
  std::vector<const Transaction*> in_window;
  for (const Transaction& tx : txs) {
    if (window.Contains(tx.timestamp)) in_window.push_back(&tx);
  }
  std::stable_sort(in_window.begin(), in_window.end(), [](const Transaction* a, const Transaction* b) {
    return std::tie(a->src, a->dst) < std::tie(b->src, b->dst);
  });
  for (const Transaction* tx : in_window) {
    if (out.empty() || out.back().src != tx->src || out.back().dst != tx->dst) {
      out.push_back({tx->src, tx->dst, Money{}, 0});
    }
    out.back().total += tx->amount;
    ++out.back().count;
  }
  return out;
}

void Renumber(std::vector<Transaction>& txs) {
  std::stable_sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
    return a.timestamp < b.timestamp;
  });
  for (std::size_t i = 0; i < txs.size(); ++i) txs[i].tx_id = i;
}

bool IsSorted(const std::vector<Transaction>& txs) {
  for (std::size_t i = 1; i < txs.size(); ++i) {
    const Transaction& a = txs[i - 1];
    const Transaction& b = txs[i];
    if (b.timestamp < a.timestamp || (b.timestamp == a.timestamp && b.tx_id <= a.tx_id)) {
      return false;
    }
  }
  return true;
}

void WriteTransactionsCsv(const std::filesystem::path& path,
                          const std::vector<Transaction>& txs) {
  csv::Writer w(path);
  w.Line(kTransactionsHeader);
  for (const Transaction& tx : txs) {
    w.Row(tx.tx_id, tx.src, tx.dst, tx.amount.ToString(), tx.timestamp);
  }
  w.Close();
}

namespace {

Transaction FromFields(const std::vector<std::string_view>& f, const csv::Reader* r,
                       std::string_view line) {
  auto where = [&]() { return r ? r->Where() : "'" + std::string(line) + "'"; };
  auto to_uint = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw Error(ErrorCode::kIo, where() + ": bad integer '" + std::string(s) + "'");
    }
    return v;
  };
  Transaction tx;
  tx.tx_id = to_uint(f[0]);
  tx.src = static_cast<AccountId>(to_uint(f[1]));
  tx.dst = static_cast<AccountId>(to_uint(f[2]));
  tx.amount = Money::Parse(f[3]);
  tx.timestamp = static_cast<Step>(to_uint(f[4]));
  if (tx.amount.cents() <= 0) throw Error(ErrorCode::kIo, where() + ": amount must be positive");
  return tx;
}

}  // namespace

std::vector<Transaction> ReadTransactionsCsv(const std::filesystem::path& path) {
  csv::Reader r(path, kTransactionsHeader);
  std::vector<Transaction> out;
  std::vector<std::string_view> f;
  while (r.Next(f, 5)) out.push_back(FromFields(f, &r, {}));
  return out;
}

std::optional<Transaction> ParseTransactionRow(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  if (line.empty() || line == kTransactionsHeader) return std::nullopt;
  std::vector<std::string_view> f;
  csv::Reader::Split(line, f);
  if (f.size() != 5) {
    throw Error(ErrorCode::kIo, "transaction row needs 5 fields: '" + std::string(line) + "'");
  }
  return FromFields(f, nullptr, line);
}

}  // namespace aml::txflow
