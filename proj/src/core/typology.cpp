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

#include "amlgraph/typology.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"

namespace aml::typology {

using simnet::SarLabel;
using txflow::Transaction;

std::string_view ToString(Kind k) {
  switch (k) {
    case Kind::kCycle: return "cycle";
    case Kind::kFanIn: return "fan_in";
    case Kind::kFanOut: return "fan_out";
    case Kind::kLayeredChain: return "layered_chain";
    case Kind::kScatterGather: return "scatter_gather";
  }
  return "?";
}

Kind ParseKind(std::string_view s) {
  for (Kind k : kAllKinds) {
    if (ToString(k) == s) return k;
  }
  throw Error(ErrorCode::kConfig, "unknown typology kind '" + std::string(s) + "'");
}

std::uint32_t MinMembers(Kind k) {
  return (k == Kind::kCycle || k == Kind::kScatterGather) ? 3 : 2;
}

std::uint32_t MotifTxCount(Kind k, std::uint32_t m) {
  switch (k) {
    case Kind::kCycle: return m;
    case Kind::kFanIn:
    case Kind::kFanOut:
    case Kind::kLayeredChain: return m - 1;
    case Kind::kScatterGather: return 2 * (m - 2);
  }
  return 0;
}

void TypologySpec::Validate(std::uint32_t horizon) const {
  const std::string what = "typology " + std::string(ToString(kind)) + ": ";
  if (member_count < MinMembers(kind)) {
    throw Error(ErrorCode::kConfig, what + "member_count must be >= " +
                                        std::to_string(MinMembers(kind)));
  }
  if (!(band_low < band_high) || band_low.cents() <= 0) {
    throw Error(ErrorCode::kConfig, what + "amount band needs 0 < low < high");
  }
  if (span.empty() || span.last >= horizon) {
    throw Error(ErrorCode::kConfig, what + "span must lie within [0, " +
                                        std::to_string(horizon) + ")");
  }
  const std::uint32_t width = span.last - span.first + 1;
  if (kind == Kind::kLayeredChain && width < member_count - 1) {
    throw Error(ErrorCode::kConfig, what + "span too short for strictly increasing hops");
  }
  if (kind == Kind::kScatterGather && width < 2) {
    throw Error(ErrorCode::kConfig, what + "span must cover at least two steps");
  }
}

TypologySpec TypologySpec::FromSection(const ConfigSection& s, std::uint32_t horizon) {
  TypologySpec t;
  t.kind = ParseKind(s.GetString("kind"));
  t.member_count = static_cast<std::uint32_t>(s.GetUint("member_count", t.member_count));
  t.band_low = Money::Parse(s.GetString("band_low", t.band_low.ToString()));
  t.band_high = Money::Parse(s.GetString("band_high", t.band_high.ToString()));
  t.span.first = static_cast<Step>(s.GetUint("span_start", 0));
  t.span.last = static_cast<Step>(s.GetUint("span_end", horizon == 0 ? 0 : horizon - 1));
  t.instances = static_cast<std::uint32_t>(s.GetUint("instances", t.instances));
  t.seed = s.GetUint("seed", t.seed);
  t.Validate(horizon);
  return t;
}

namespace {

struct Hop {
  std::size_t from = 0;  // member index
  std::size_t to = 0;
};

std::vector<Hop> MotifHops(Kind kind, std::size_t m) {
  std::vector<Hop> hops;
  switch (kind) {
    case Kind::kCycle:
      for (std::size_t i = 0; i < m; ++i) hops.push_back({i, (i + 1) % m});
      break;
    case Kind::kLayeredChain:
      for (std::size_t i = 0; i + 1 < m; ++i) hops.push_back({i, i + 1});
      break;
    case Kind::kFanIn:
      for (std::size_t i = 0; i + 1 < m; ++i) hops.push_back({i, m - 1});
      break;
    case Kind::kFanOut:
      for (std::size_t i = 1; i < m; ++i) hops.push_back({0, i});
      break;
    case Kind::kScatterGather:
      for (std::size_t i = 1; i + 1 < m; ++i) hops.push_back({0, i});
      for (std::size_t i = 1; i + 1 < m; ++i) hops.push_back({i, m - 1});
      break;
  }
  return hops;
}

// Steps for each hop in MotifHops order.
std::vector<Step> MotifSteps(Kind kind, std::size_t hop_count, std::size_t m,
                             txflow::StepRange span, Rng& rng) {
  std::uniform_int_distribution<Step> any(span.first, span.last);
  std::vector<Step> steps(hop_count);
  switch (kind) {
    case Kind::kCycle:
      for (Step& s : steps) s = any(rng);
      std::sort(steps.begin(), steps.end());
      break;
    case Kind::kLayeredChain: {
      // hop_count distinct steps, ascending (Floyd's sampling).
      std::set<Step> chosen;
      const std::uint64_t width = span.last - span.first + 1;
      for (std::uint64_t j = width - hop_count; j < width; ++j) {
        std::uniform_int_distribution<std::uint64_t> d(0, j);
        const Step t = span.first + static_cast<Step>(d(rng));
        if (!chosen.insert(t).second) chosen.insert(span.first + static_cast<Step>(j));
      }
      steps.assign(chosen.begin(), chosen.end());
      break;
    }
    case Kind::kFanIn:
    case Kind::kFanOut:
      for (Step& s : steps) s = any(rng);
      break;
    case Kind::kScatterGather: {
      const std::size_t mids = m - 2;
      std::uniform_int_distribution<Step> scatter(span.first, span.last - 1);
      for (std::size_t i = 0; i < mids; ++i) {
        steps[i] = scatter(rng);
        std::uniform_int_distribution<Step> gather(steps[i] + 1, span.last);
        steps[mids + i] = gather(rng);
      }
      break;
    }
  }
  return steps;
}

}  // namespace

Injection Inject(simnet::AccountGraph graph, std::vector<Transaction> txs,
                 const TypologySpec& spec, std::uint32_t horizon,
                 std::uint64_t first_instance_id) {
  Injection out;
  if (spec.instances == 0) {
    out.id_map.resize(txs.size());
    std::iota(out.id_map.begin(), out.id_map.end(), 0);
    out.graph = std::move(graph);
    out.txs = std::move(txs);
    return out;
  }
  spec.Validate(horizon);

  std::vector<AccountId> hosts;
  for (const auto& a : graph.accounts) {
    if (a.sar_label == SarLabel::kNormal) hosts.push_back(a.account_id);
  }
  const std::uint64_t needed = static_cast<std::uint64_t>(spec.instances) * spec.member_count;
  if (hosts.size() < needed) {
    throw Error(ErrorCode::kInjection,
                "typology " + std::string(ToString(spec.kind)) + " needs " +
                    std::to_string(needed) + " normal accounts, only " +
                    std::to_string(hosts.size()) + " available (short by " +
                    std::to_string(needed - hosts.size()) + ")");
  }

  Rng rng(spec.seed);
  // Partial Fisher-Yates: the first `needed` hosts are the members.
  for (std::uint64_t i = 0; i < needed; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, hosts.size() - 1);
    std::swap(hosts[i], hosts[pick(rng)]);
  }

  std::set<simnet::Edge> edge_set(graph.edges.begin(), graph.edges.end());
  std::uniform_int_distribution<std::int64_t> amount(spec.band_low.cents(),
                                                     spec.band_high.cents());
  const std::size_t m = spec.member_count;
  const std::vector<Hop> hops = MotifHops(spec.kind, m);
  // Temporary ids: position in the pre-sort log.
  const std::size_t input_size = txs.size();
  for (std::size_t i = 0; i < txs.size(); ++i) txs[i].tx_id = i;

  for (std::uint32_t inst = 0; inst < spec.instances; ++inst) {
    InjectionReport rep;
    rep.instance_id = first_instance_id + inst;
    rep.kind = spec.kind;
    rep.members.assign(hosts.begin() + inst * m, hosts.begin() + (inst + 1) * m);
    const std::vector<Step> steps = MotifSteps(spec.kind, hops.size(), m, spec.span, rng);
    for (std::size_t h = 0; h < hops.size(); ++h) {
      const AccountId src = rep.members[hops[h].from];
      const AccountId dst = rep.members[hops[h].to];
      rep.tx_ids.push_back(txs.size());
      txs.push_back({txs.size(), src, dst, Money::FromCents(amount(rng)), steps[h]});
      edge_set.insert({src, dst});
    }
    for (AccountId a : rep.members) graph.accounts[a].sar_label = SarLabel::kSuspicious;
    out.reports.push_back(std::move(rep));
  }

  // Stable by timestamp: original transactions keep precedence inside a step.
  std::stable_sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
    return a.timestamp < b.timestamp;
  });
  std::vector<std::uint64_t> new_id(txs.size());
  for (std::size_t i = 0; i < txs.size(); ++i) {
    new_id[txs[i].tx_id] = i;
    txs[i].tx_id = i;
  }
  RemapReports(out.reports, new_id);
  new_id.resize(input_size);
  out.id_map = std::move(new_id);
  graph.edges.assign(edge_set.begin(), edge_set.end());
  out.graph = std::move(graph);
  out.txs = std::move(txs);
  return out;
}

void RemapReports(std::vector<InjectionReport>& reports, const std::vector<std::uint64_t>& id_map) {
  for (auto& rep : reports) {
    for (auto& id : rep.tx_ids) {
      if (id >= id_map.size()) {
        throw Error(ErrorCode::kOutOfRange, "report tx_id " + std::to_string(id) + " not in map");
      }
      id = id_map[id];
    }
  }
}

MotifCheck VerifyMotifs(const std::vector<Transaction>& txs,
                        const std::vector<InjectionReport>& reports) {
  std::unordered_map<std::uint64_t, const Transaction*> by_id;
  by_id.reserve(txs.size());
  for (const Transaction& tx : txs) by_id.emplace(tx.tx_id, &tx);

  auto fail = [](const InjectionReport& r, const std::string& why) {
    return MotifCheck{false, "instance " + std::to_string(r.instance_id) + " (" +
                                 std::string(ToString(r.kind)) + "): " + why};
  };

  std::set<AccountId> all_members;
  for (const InjectionReport& r : reports) {
    const std::size_t m = r.members.size();
    if (m < MinMembers(r.kind)) return fail(r, "too few members");
    if (std::set<AccountId>(r.members.begin(), r.members.end()).size() != m) {
      return fail(r, "repeated member");
    }
    for (AccountId a : r.members) {
      if (!all_members.insert(a).second) {
        return fail(r, "account " + std::to_string(a) + " belongs to two instances");
      }
    }
    const auto expected = MotifHops(r.kind, m);
    if (r.tx_ids.size() != expected.size()) {
      return fail(r, "expected " + std::to_string(expected.size()) + " transactions, report lists " +
                         std::to_string(r.tx_ids.size()));
    }
    std::vector<const Transaction*> hop_tx;
    for (std::size_t h = 0; h < expected.size(); ++h) {
      auto it = by_id.find(r.tx_ids[h]);
      if (it == by_id.end()) {
        return fail(r, "tx " + std::to_string(r.tx_ids[h]) + " missing from log");
      }
      const Transaction& tx = *it->second;
      if (tx.src != r.members[expected[h].from] || tx.dst != r.members[expected[h].to]) {
        return fail(r, "tx " + std::to_string(tx.tx_id) + " does not match hop " + std::to_string(h));
      }
      hop_tx.push_back(&tx);
    }
    switch (r.kind) {
      case Kind::kCycle:
      case Kind::kLayeredChain:
        for (std::size_t h = 1; h < hop_tx.size(); ++h) {
          const bool strict = r.kind == Kind::kLayeredChain;
          const Step prev = hop_tx[h - 1]->timestamp, cur = hop_tx[h]->timestamp;
          if (strict ? cur <= prev : cur < prev) {
            return fail(r, "hop " + std::to_string(h) + " goes back in time");
          }
        }
        break;
      case Kind::kScatterGather: {
        const std::size_t mids = m - 2;
        for (std::size_t i = 0; i < mids; ++i) {
          if (hop_tx[mids + i]->timestamp <= hop_tx[i]->timestamp) {
            return fail(r, "gather through member " + std::to_string(r.members[i + 1]) +
                               " precedes its scatter");
          }
        }
        break;
      }
      case Kind::kFanIn:
      case Kind::kFanOut:
        break;
    }
  }
  return {};
}

namespace {

std::string Join(const auto& values) {
  std::string s;
  for (const auto& v : values) {
    if (!s.empty()) s.push_back(';');
    s += std::to_string(v);
  }
  return s;
}

}  // namespace

void WriteSarLabelsCsv(const std::filesystem::path& path,
                       const std::vector<simnet::Account>& accounts,
                       const std::vector<InjectionReport>& reports) {
  std::vector<const InjectionReport*> owner(accounts.size(), nullptr);
  for (const auto& r : reports) {
    for (AccountId a : r.members) owner.at(a) = &r;
  }
  csv::Writer w(path);
  w.Line("account_id,sar_label,instance_id,kind");
  for (const auto& a : accounts) {
    const InjectionReport* r = owner[a.account_id];
    w.Row(a.account_id, simnet::ToString(a.sar_label),
          r ? std::to_string(r->instance_id) : std::string(),
          r ? ToString(r->kind) : std::string_view());
  }
  w.Close();
}

void WriteInjectionReportCsv(const std::filesystem::path& path,
                             const std::vector<InjectionReport>& reports) {
  csv::Writer w(path);
  w.Line("instance_id,kind,members,tx_ids");
  for (const auto& r : reports) {
    w.Row(r.instance_id, ToString(r.kind), Join(r.members), Join(r.tx_ids));
  }
  w.Close();
}

std::vector<InjectionReport> ReadInjectionReportCsv(const std::filesystem::path& path) {
  csv::Reader r(path, "instance_id,kind,members,tx_ids");
  std::vector<InjectionReport> out;
  std::vector<std::string_view> f;
  auto split = [&](std::string_view s, auto& dst) {
    std::size_t start = 0;
    while (start <= s.size() && !s.empty()) {
      const std::size_t semi = std::min(s.find(';', start), s.size());
      dst.push_back(r.ToUint<typename std::decay_t<decltype(dst)>::value_type>(
          s.substr(start, semi - start)));
      start = semi + 1;
    }
  };
  while (r.Next(f, 4)) {
    InjectionReport rep;
    rep.instance_id = r.ToUint(f[0]);
    rep.kind = ParseKind(f[1]);
    split(f[2], rep.members);
    split(f[3], rep.tx_ids);
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace aml::typology
