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

// Laundering typology injection. Each instance picks fresh normal accounts,
// wires them into a motif and emits the motif's transactions; members are
// labeled suspicious.
//
// Member order inside a report encodes the roles:
//   cycle           a0 -> a1 -> ... -> a(m-1) -> a0
//   layered_chain   a0 -> a1 -> ... -> a(m-1), strictly increasing steps
//   fan_in          a0..a(m-2) -> a(m-1)
//   fan_out         a0 -> a1..a(m-1)
//   scatter_gather  a0 -> a1..a(m-2) -> a(m-1), each scatter before its gather

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amlgraph/simnet.hpp"
#include "amlgraph/txflow.hpp"

namespace aml::typology {

enum class Kind : std::uint8_t { kCycle, kFanIn, kFanOut, kLayeredChain, kScatterGather };

inline constexpr Kind kAllKinds[] = {Kind::kCycle, Kind::kFanIn, Kind::kFanOut,
                                     Kind::kLayeredChain, Kind::kScatterGather};

std::string_view ToString(Kind k);
Kind ParseKind(std::string_view s);

// Smallest member_count the kind admits.
std::uint32_t MinMembers(Kind k);
// Number of transactions one instance with `members` accounts emits.
std::uint32_t MotifTxCount(Kind k, std::uint32_t members);

struct TypologySpec {
  Kind kind = Kind::kCycle;
  std::uint32_t member_count = 3;
  Money band_low = Money::FromDollars(9000);
  Money band_high = Money::FromDollars(9900);
  txflow::StepRange span{0, 0};
  std::uint32_t instances = 1;
  std::uint64_t seed = 0;

  // `horizon` is the number of simulated steps the span must fit into.
  void Validate(std::uint32_t horizon) const;
  // Keys: kind, member_count, band_low, band_high, span_start, span_end,
  // instances, seed. `horizon` bounds the default span.
  static TypologySpec FromSection(const ConfigSection& section, std::uint32_t horizon);
};

struct InjectionReport {
  std::uint64_t instance_id = 0;
  Kind kind = Kind::kCycle;
  std::vector<AccountId> members;
  std::vector<std::uint64_t> tx_ids;  // in motif order
};

struct Injection {
  simnet::AccountGraph graph;
  std::vector<txflow::Transaction> txs;
  std::vector<InjectionReport> reports;
  // Input log position -> tx_id in the merged log, for remapping reports of
  // earlier injections.
  std::vector<std::uint64_t> id_map;
};

// Rewrites report tx_ids through `id_map` (see Injection::id_map).
void RemapReports(std::vector<InjectionReport>& reports, const std::vector<std::uint64_t>& id_map);

// Adds `spec.instances` motifs. Instance ids start at `first_instance_id`.
// The merged log is re-sorted and renumbered; report tx_ids refer to the
// renumbered log. Throws Error(kInjection) when too few normal accounts remain.
Injection Inject(simnet::AccountGraph graph, std::vector<txflow::Transaction> txs,
                 const TypologySpec& spec, std::uint32_t horizon,
                 std::uint64_t first_instance_id = 0);

struct MotifCheck {
  bool ok = true;
  std::string violation;  // first violation, empty when ok

  explicit operator bool() const { return ok; }
};

// True iff every report's transactions exactly realize its kind's motif
// (edges, counts and temporal order).
MotifCheck VerifyMotifs(const std::vector<txflow::Transaction>& txs,
                        const std::vector<InjectionReport>& reports);

void WriteSarLabelsCsv(const std::filesystem::path& path,
                       const std::vector<simnet::Account>& accounts,
                       const std::vector<InjectionReport>& reports);
void WriteInjectionReportCsv(const std::filesystem::path& path,
                             const std::vector<InjectionReport>& reports);
std::vector<InjectionReport> ReadInjectionReportCsv(const std::filesystem::path& path);

}  // namespace aml::typology
