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

#include "amlgraph/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "csv.hpp"

namespace aml::simnet {
namespace {

constexpr std::array<std::string_view, 24> kFirstNames = {
    "Ada",   "Bruno", "Chen",  "Dalia", "Emeka", "Farah", "Goran", "Hana",
    "Ines",  "Jonas", "Kiran", "Lena",  "Mateo", "Nadia", "Omar",  "Priya",
    "Quinn", "Rosa",  "Sven",  "Tara",  "Umar",  "Vera",  "Wei",   "Yara"};
constexpr std::array<std::string_view, 24> kLastNames = {
    "Abara",  "Berg",   "Castro", "Dubois", "Eriksen", "Fischer",
    "Garcia", "Haddad", "Ito",    "Jensen", "Kowalski", "Lopez",
    "Moreau", "Nakamura", "Okafor", "Petrov", "Quint",  "Rossi",
    "Santos", "Tanaka", "Ulrich", "Varga",  "Weber",  "Zhou"};
constexpr std::array<std::string_view, 6> kBusinessSuffixes = {
    "Trading", "Imports", "Logistics", "Consulting", "Holdings", "Services"};

std::uint64_t PairKey(AccountId a, AccountId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

template <typename T>
void Shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(v[i - 1], v[pick(rng)]);
  }
}

// Removes `excess` stubs chosen uniformly at random, never taking a vertex
// below `floor`. Returns false when that is impossible.
bool TrimStubs(std::vector<std::uint32_t>& degrees, std::uint64_t excess,
               std::uint32_t floor, Rng& rng) {
  std::vector<AccountId> stubs;
  for (AccountId v = 0; v < degrees.size(); ++v) {
    for (std::uint32_t k = floor; k < degrees[v]; ++k) stubs.push_back(v);
  }
  if (stubs.size() < excess) return false;
  Shuffle(stubs, rng);
  for (std::uint64_t i = 0; i < excess; ++i) --degrees[stubs[i]];
  return true;
}

std::vector<AccountId> ExpandStubs(const std::vector<std::uint32_t>& degrees) {
  std::vector<AccountId> stubs;
  stubs.reserve(std::accumulate(degrees.begin(), degrees.end(), std::size_t{0}));
  for (AccountId v = 0; v < degrees.size(); ++v) {
    stubs.insert(stubs.end(), degrees[v], v);
  }
  return stubs;
}

// Pairs out-stubs with shuffled in-stubs. Self-loops and repeated pairs are
// rejected and re-paired by swapping targets with random other pairs; gives
// up (returns false) when a bad pair cannot be repaired.
bool PairDirected(const std::vector<AccountId>& out_stubs,
                  std::vector<AccountId>& in_stubs, Rng& rng,
                  std::vector<Edge>& edges) {
  const std::size_t m = out_stubs.size();
  Shuffle(in_stubs, rng);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  std::vector<std::size_t> bad;
  std::vector<char> is_bad(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const AccountId s = out_stubs[i], d = in_stubs[i];
    if (s == d || !seen.insert(PairKey(s, d)).second) {
      bad.push_back(i);
      is_bad[i] = 1;
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  const int kAttempts = 1000;
  for (std::size_t i : bad) {
    bool fixed = false;
    for (int a = 0; a < kAttempts && !fixed; ++a) {
      const std::size_t j = pick(rng);
      if (j == i) continue;
      const AccountId si = out_stubs[i], sj = out_stubs[j];
      const AccountId di = in_stubs[j], dj = in_stubs[i];  // after swap
      const std::uint64_t old_j = PairKey(sj, in_stubs[j]);
      // Pair j must currently be accepted for the swap to be a repair.
      if (is_bad[j]) continue;
      if (si == di || sj == dj) continue;
      const std::uint64_t ki = PairKey(si, di), kj = PairKey(sj, dj);
      if (ki == kj) continue;
      seen.erase(old_j);
      if (seen.count(ki) || seen.count(kj)) {
        seen.insert(old_j);
        continue;
      }
      seen.insert(ki);
      seen.insert(kj);
      std::swap(in_stubs[i], in_stubs[j]);
      is_bad[i] = 0;
      fixed = true;
    }
    if (!fixed) return false;
  }
  edges.clear();
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) edges.push_back({out_stubs[i], in_stubs[i]});
  return true;
}

// Undirected configuration model over total degrees; each accepted pair is
// oriented by a fair coin.
bool PairUndirected(std::vector<AccountId> stubs, Rng& rng,
                    std::vector<Edge>& edges) {
  Shuffle(stubs, rng);
  const std::size_t m = stubs.size() / 2;
  auto key = [&](std::size_t e) {
    AccountId a = stubs[2 * e], b = stubs[2 * e + 1];
    if (a > b) std::swap(a, b);
    return PairKey(a, b);
  };
  auto ok = [&](std::size_t e) { return stubs[2 * e] != stubs[2 * e + 1]; };
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::size_t> bad;
  std::vector<char> is_bad(m, 0);
  for (std::size_t e = 0; e < m; ++e) {
    if (!ok(e) || !seen.insert(key(e)).second) {
      bad.push_back(e);
      is_bad[e] = 1;
    }
  }
  if (!bad.empty() && m < 2) return false;
  std::uniform_int_distribution<std::size_t> pick(0, m == 0 ? 0 : m - 1);
  for (std::size_t e : bad) {
    bool fixed = false;
    for (int a = 0; a < 1000 && !fixed; ++a) {
      const std::size_t f = pick(rng);
      if (f == e || is_bad[f]) continue;
      const std::uint64_t old_f = key(f);
      std::swap(stubs[2 * e + 1], stubs[2 * f + 1]);
      seen.erase(old_f);
      const bool valid = ok(e) && ok(f) && key(e) != key(f) &&
                         !seen.count(key(e)) && !seen.count(key(f));
      if (valid) {
        seen.insert(key(e));
        seen.insert(key(f));
        is_bad[e] = 0;
        fixed = true;
      } else {
        std::swap(stubs[2 * e + 1], stubs[2 * f + 1]);
        seen.insert(old_f);
      }
    }
    if (!fixed) return false;
  }
  edges.clear();
  std::bernoulli_distribution flip(0.5);
  for (std::size_t e = 0; e < m; ++e) {
    AccountId a = stubs[2 * e], b = stubs[2 * e + 1];
    if (flip(rng)) std::swap(a, b);
    edges.push_back({a, b});
  }
  return true;
}

std::vector<std::uint32_t> LoadDegreeFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open degree sequence " + path.string());
  std::vector<std::uint32_t> out;
  std::int64_t d = 0;
  while (in >> d) {
    if (d < 0) throw Error(ErrorCode::kConfig, "negative degree in " + path.string());
    out.push_back(static_cast<std::uint32_t>(d));
  }
  if (!in.eof()) throw Error(ErrorCode::kConfig, "malformed degree sequence " + path.string());
  return out;
}

}  // namespace

std::string_view ToString(AccountType t) {
  switch (t) {
    case AccountType::kIndividual: return "individual";
    case AccountType::kBusiness: return "business";
    case AccountType::kHolding: return "holding";
  }
  return "?";
}

std::string_view ToString(SarLabel l) {
  switch (l) {
    case SarLabel::kNormal: return "normal";
    case SarLabel::kSuspicious: return "suspicious";
    case SarLabel::kUnknown: return "unknown";
  }
  return "?";
}

AccountType ParseAccountType(std::string_view s) {
  if (s == "individual") return AccountType::kIndividual;
  if (s == "business") return AccountType::kBusiness;
  if (s == "holding") return AccountType::kHolding;
  throw Error(ErrorCode::kInvalidArgument, "unknown account_type '" + std::string(s) + "'");
}

SarLabel ParseSarLabel(std::string_view s) {
  if (s == "normal") return SarLabel::kNormal;
  if (s == "suspicious") return SarLabel::kSuspicious;
  if (s == "unknown") return SarLabel::kUnknown;
  throw Error(ErrorCode::kInvalidArgument, "unknown sar_label '" + std::string(s) + "'");
}

void TopologyConfig::Validate() const {
  if (account_count == 0) throw Error(ErrorCode::kConfig, "account_count must be positive");
  if (const auto* pl = std::get_if<PowerLaw>(&degree_model)) {
    if (!(pl->exponent > 1.0)) throw Error(ErrorCode::kConfig, "exponent must be > 1");
    if (pl->min_degree < 1) throw Error(ErrorCode::kConfig, "min_degree must be >= 1");
    if (pl->max_degree < pl->min_degree) {
      throw Error(ErrorCode::kConfig, "max_degree must be >= min_degree");
    }
    if (pl->max_degree > account_count - 1) {
      throw Error(ErrorCode::kConfig, "max_degree must be <= account_count - 1");
    }
  }
}

TopologyConfig TopologyConfig::FromSection(const ConfigSection& s) {
  TopologyConfig c;
  c.account_count = static_cast<std::uint32_t>(s.GetUint("accounts", c.account_count));
  c.seed = s.GetUint("seed", c.seed);
  const std::string model = s.GetString("degree_model", "powerlaw");
  if (model == "powerlaw") {
    PowerLaw pl;
    pl.exponent = s.GetDouble("exponent", pl.exponent);
    pl.min_degree = static_cast<std::uint32_t>(s.GetUint("min_degree", pl.min_degree));
    pl.max_degree = static_cast<std::uint32_t>(s.GetUint("max_degree", pl.max_degree));
    c.degree_model = pl;
  } else if (model == "explicit") {
    ExplicitDegrees ex;
    ex.degree_sequence_file = s.GetString("degree_sequence_file");
    c.degree_model = ex;
  } else {
    throw Error(ErrorCode::kConfig, "unknown degree_model '" + model + "'");
  }
  if (s.Has("mix_individual") || s.Has("mix_business") || s.Has("mix_holding")) {
    c.population.type_mix = {
        {AccountType::kIndividual, s.GetDouble("mix_individual", 0.0)},
        {AccountType::kBusiness, s.GetDouble("mix_business", 0.0)},
        {AccountType::kHolding, s.GetDouble("mix_holding", 0.0)}};
  }
  c.population.horizon_start = static_cast<std::int64_t>(
      s.GetUint("horizon_start", static_cast<std::uint64_t>(c.population.horizon_start)));
  c.population.horizon_seconds = static_cast<std::int64_t>(
      s.GetUint("horizon_seconds", static_cast<std::uint64_t>(c.population.horizon_seconds)));
  c.Validate();
  return c;
}

TopologyConfig TopologyConfig::Load(const std::filesystem::path& path) {
  ConfigFile f = ConfigFile::Load(path);
  TopologyConfig c = FromSection(f.HasSection("topology") ? f.Section("topology") : f.Root());
  if (auto* ex = std::get_if<ExplicitDegrees>(&c.degree_model)) {
    if (ex->degree_sequence_file.is_relative()) {
      ex->degree_sequence_file = path.parent_path() / ex->degree_sequence_file;
    }
  }
  return c;
}

std::vector<double> PowerLawMass(const PowerLaw& model) {
  std::vector<double> mass;
  for (std::uint32_t k = model.min_degree; k <= model.max_degree; ++k) {
    mass.push_back(std::pow(static_cast<double>(k), -model.exponent));
  }
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  for (double& m : mass) m /= total;
  return mass;
}

std::vector<std::uint32_t> SampleDegrees(const PowerLaw& model, std::size_t n,
                                         Rng& rng) {
  const std::vector<double> mass = PowerLawMass(model);
  std::discrete_distribution<std::uint32_t> dist(mass.begin(), mass.end());
  std::vector<std::uint32_t> out(n);
  for (auto& d : out) d = model.min_degree + dist(rng);
  return out;
}

std::vector<Account> PopulateAccounts(std::size_t count,
                                      const PopulationConfig& population,
                                      std::uint64_t seed) {
  const TypeMix& mix = population.type_mix;
  if (mix.empty()) throw Error(ErrorCode::kConfig, "type_mix is empty");
  double total = 0;
  std::vector<double> weights(kAccountTypeCount, 0.0);
  for (const auto& [type, w] : mix) {
    if (!(w >= 0.0)) throw Error(ErrorCode::kConfig, "type_mix weights must be non-negative");
    weights[static_cast<std::size_t>(type)] += w;
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kConfig, "type_mix must sum to 1 (got " + std::to_string(total) + ")");
  }
  if (population.horizon_seconds <= 0) {
    throw Error(ErrorCode::kConfig, "horizon_seconds must be positive");
  }

  Rng rng(seed);
  std::discrete_distribution<int> type_dist(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> first(0, kFirstNames.size() - 1);
  std::uniform_int_distribution<std::size_t> last(0, kLastNames.size() - 1);
  std::uniform_int_distribution<std::size_t> suffix(0, kBusinessSuffixes.size() - 1);
  std::uniform_int_distribution<std::int64_t> created(0, population.horizon_seconds - 1);

  std::vector<Account> accounts(count);
  for (std::size_t i = 0; i < count; ++i) {
    Account& a = accounts[i];
    a.account_id = static_cast<AccountId>(i);
    a.account_type = static_cast<AccountType>(type_dist(rng));
    std::string name = std::string(kFirstNames[first(rng)]) + " " +
                       std::string(kLastNames[last(rng)]);
    if (a.account_type != AccountType::kIndividual) {
      name = std::string(kLastNames[last(rng)]) + " " +
             std::string(kBusinessSuffixes[suffix(rng)]);
    }
    a.owner_name = std::move(name);
    a.created_at = population.horizon_start + created(rng);
    a.sar_label = SarLabel::kNormal;
  }
  return accounts;
}

AccountGraph GenerateTopology(const TopologyConfig& config) {
  config.Validate();
  const std::size_t n = config.account_count;
  Rng rng(SubSeed(config.seed, "topology"));

  AccountGraph g;
  std::string last_failure;
  bool done = false;

  if (const auto* pl = std::get_if<PowerLaw>(&config.degree_model)) {
    for (int attempt = 0; attempt < kMaxGenerationRetries && !done; ++attempt) {
      std::vector<std::uint32_t> out = SampleDegrees(*pl, n, rng);
      std::vector<std::uint32_t> in = SampleDegrees(*pl, n, rng);
      const auto out_sum = std::accumulate(out.begin(), out.end(), std::uint64_t{0});
      const auto in_sum = std::accumulate(in.begin(), in.end(), std::uint64_t{0});
      const bool trimmed = out_sum > in_sum
                               ? TrimStubs(out, out_sum - in_sum, pl->min_degree, rng)
                               : TrimStubs(in, in_sum - out_sum, pl->min_degree, rng);
      if (!trimmed) {
        last_failure = "in/out degree sums " + std::to_string(in_sum) + " vs " +
                       std::to_string(out_sum) + " could not be balanced";
        continue;
      }
      std::vector<AccountId> out_stubs = ExpandStubs(out);
      std::vector<AccountId> in_stubs = ExpandStubs(in);
      if (PairDirected(out_stubs, in_stubs, rng, g.edges)) {
        done = true;
      } else {
        last_failure = "self-loop/multi-edge rejection could not complete pairing";
      }
    }
  } else {
    const auto& ex = std::get<ExplicitDegrees>(config.degree_model);
    std::vector<std::uint32_t> degrees =
        ex.degrees.empty() ? LoadDegreeFile(ex.degree_sequence_file) : ex.degrees;
    if (degrees.size() != n) {
      throw Error(ErrorCode::kConfig, "degree sequence has " + std::to_string(degrees.size()) +
                                          " entries, expected " + std::to_string(n));
    }
    const auto sum = std::accumulate(degrees.begin(), degrees.end(), std::uint64_t{0});
    if (sum % 2 != 0) {
      throw Error(ErrorCode::kGeneration,
                  "infeasible degree sequence: odd stub total " + std::to_string(sum));
    }
    const std::vector<AccountId> stubs = ExpandStubs(degrees);
    for (int attempt = 0; attempt < kMaxGenerationRetries && !done; ++attempt) {
      done = PairUndirected(stubs, rng, g.edges);
    }
    last_failure = "no simple pairing found for explicit degree sequence";
  }
  if (!done) {
    throw Error(ErrorCode::kGeneration,
                "topology generation failed after " + std::to_string(kMaxGenerationRetries) +
                    " retries: " + last_failure);
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.accounts = PopulateAccounts(n, config.population, SubSeed(config.seed, "accounts"));
  return g;
}

std::vector<std::uint32_t> OutDegrees(const AccountGraph& g) {
  std::vector<std::uint32_t> deg(g.account_count(), 0);
  for (const Edge& e : g.edges) ++deg[e.src];
  return deg;
}

void WriteAccountsCsv(const std::filesystem::path& path,
                      const std::vector<Account>& accounts) {
  csv::Writer w(path);
  w.Line("account_id,account_type,owner_name,created_at,sar_label");
  for (const Account& a : accounts) {
    w.Row(a.account_id, ToString(a.account_type), a.owner_name, a.created_at,
          ToString(a.sar_label));
  }
  w.Close();
}

std::vector<Account> ReadAccountsCsv(const std::filesystem::path& path) {
  csv::Reader r(path, "account_id,account_type,owner_name,created_at,sar_label");
  std::vector<Account> out;
  std::vector<std::string_view> f;
  while (r.Next(f, 5)) {
    Account a;
    a.account_id = r.ToUint<AccountId>(f[0]);
    a.account_type = ParseAccountType(f[1]);
    a.owner_name = std::string(f[2]);
    a.created_at = r.ToInt(f[3]);
    a.sar_label = ParseSarLabel(f[4]);
    if (a.account_id != out.size()) {
      throw Error(ErrorCode::kIo, r.Where() + ": account_id values must be contiguous from 0");
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace aml::simnet
