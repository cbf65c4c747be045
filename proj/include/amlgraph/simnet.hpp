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

// Static account-graph synthesis: a directed configuration model over sampled
// degree sequences, plus seeded KYC-style account attributes.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "amlgraph/common.hpp"
#include "amlgraph/config.hpp"

namespace aml::simnet {

enum class AccountType : std::uint8_t { kIndividual, kBusiness, kHolding };
enum class SarLabel : std::uint8_t { kNormal, kSuspicious, kUnknown };

inline constexpr std::size_t kAccountTypeCount = 3;

std::string_view ToString(AccountType t);
std::string_view ToString(SarLabel l);
AccountType ParseAccountType(std::string_view s);
SarLabel ParseSarLabel(std::string_view s);

struct Account {
  AccountId account_id = 0;
  AccountType account_type = AccountType::kIndividual;
  std::string owner_name;
  std::int64_t created_at = 0;  // seconds since epoch
  SarLabel sar_label = SarLabel::kNormal;

  friend bool operator==(const Account&, const Account&) = default;
};

struct Edge {
  AccountId src = 0;
  AccountId dst = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct AccountGraph {
  std::vector<Account> accounts;
  std::vector<Edge> edges;

  std::size_t account_count() const { return accounts.size(); }
};

// P(k) ∝ k^-exponent on [min_degree, max_degree].
struct PowerLaw {
  double exponent = 2.5;
  std::uint32_t min_degree = 1;
  std::uint32_t max_degree = 50;
};

// One total (in + out) degree per account; each paired stub becomes an edge
// whose direction is drawn by coin flip.
struct ExplicitDegrees {
  std::filesystem::path degree_sequence_file;
  std::vector<std::uint32_t> degrees;  // used when non-empty, else the file
};

using DegreeModel = std::variant<PowerLaw, ExplicitDegrees>;

// Weights over AccountType, indexed by the enum value.
using TypeMix = std::vector<std::pair<AccountType, double>>;

struct PopulationConfig {
  TypeMix type_mix = {{AccountType::kIndividual, 0.80},
                      {AccountType::kBusiness, 0.15},
                      {AccountType::kHolding, 0.05}};
  std::int64_t horizon_start = 1514764800;  // 2018-01-01T00:00:00Z
  std::int64_t horizon_seconds = 365LL * 24 * 3600;
};

struct TopologyConfig {
  std::uint32_t account_count = 1000;
  DegreeModel degree_model = PowerLaw{};
  std::uint64_t seed = 0;
  PopulationConfig population;

  // Throws Error(kConfig) when an invariant does not hold.
  void Validate() const;
  // Keys: accounts, degree_model (powerlaw|explicit), exponent, min_degree,
  // max_degree, degree_sequence_file, seed, mix_individual, mix_business,
  // mix_holding, horizon_start, horizon_seconds.
  static TopologyConfig FromSection(const ConfigSection& section);
  static TopologyConfig Load(const std::filesystem::path& path);
};

// Maximum number of full resampling rounds before a generation failure.
inline constexpr int kMaxGenerationRetries = 100;

AccountGraph GenerateTopology(const TopologyConfig& config);

std::vector<Account> PopulateAccounts(std::size_t count,
                                      const PopulationConfig& population,
                                      std::uint64_t seed);

// Probability mass of the truncated discrete power law, index k - min_degree.
std::vector<double> PowerLawMass(const PowerLaw& model);
std::vector<std::uint32_t> SampleDegrees(const PowerLaw& model, std::size_t n,
                                         Rng& rng);

std::vector<std::uint32_t> OutDegrees(const AccountGraph& g);

void WriteAccountsCsv(const std::filesystem::path& path,
                      const std::vector<Account>& accounts);
std::vector<Account> ReadAccountsCsv(const std::filesystem::path& path);

}  // namespace aml::simnet
