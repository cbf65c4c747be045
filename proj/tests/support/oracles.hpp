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

// Independent reference implementations used only by tests. None of these
// call into the code they check.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "amlgraph/gcnkit.hpp"
#include "amlgraph/gstore.hpp"
#include "amlgraph/sentinel.hpp"
#include "amlgraph/txflow.hpp"

namespace aml::testing {

using Dense = std::vector<std::vector<double>>;

class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& text);
// Non-empty lines, header included.
std::size_t CountLines(const std::filesystem::path& path);

// Log of `count` transactions over `accounts` accounts and `steps` steps,
// sorted by timestamp with dense tx_ids. Amounts mix small values, values near
// the rule thresholds and velocity-sized values.
std::vector<txflow::Transaction> RandomLog(std::uint64_t seed, std::size_t count,
                                           std::uint32_t accounts, std::uint32_t steps);

// O(T^2) scan: every (first, last) window of qualifying transactions per
// account is enumerated, and a window is kept when it has enough
// transactions and neither one-step extension still fits the width.
std::vector<sentinel::Alert> BruteForceScan(const std::vector<txflow::Transaction>& txs,
                                            const sentinel::RuleSet& rules);

// Random simple directed graph (no self-loops) as an edge list.
std::vector<std::pair<std::uint32_t, std::uint32_t>> RandomEdges(std::uint64_t seed,
                                                                  std::uint32_t n,
                                                                  std::size_t m);

// Dense D^-1/2 (A + I) D^-1/2 over the undirected closure of `edges`.
Dense DenseNormalized(std::uint32_t n,
                      const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);
Dense ToDense(const linalg::SparseMatrix& s);
Dense ToDense(const linalg::Matrix& m);
Dense DenseMul(const Dense& a, const Dense& b);

// softmax(Â relu(Â X W1) W2) with naive dense products.
Dense DenseForward(const Dense& adj, const linalg::Matrix& x, const gcnkit::GcnModel& model);

// Cross-entropy over `ids` of DenseForward, each term scaled by its class
// weight (1 when `class_weight` is empty), divided by |ids|.
double DenseLoss(const Dense& adj, const linalg::Matrix& x, const gcnkit::GcnModel& model,
                 const std::vector<std::uint32_t>& ids, const std::vector<std::uint8_t>& labels,
                 const std::vector<double>& class_weight = {});

// Upper `alpha` quantile of chi-square with `dof` degrees of freedom.
double ChiSquareCritical(double dof, double alpha);
// Two-sided `confidence` interval for Binomial(n, p).
std::pair<double, double> BinomialInterval(std::uint64_t n, double p, double confidence);
// Two-sided `confidence` interval for Poisson(mean).
std::pair<double, double> PoissonInterval(double mean, double confidence);

// (src, dst) -> (total cents, count) computed with a hash map.
std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::int64_t, std::uint64_t>>
AggregateOracle(const std::vector<txflow::Transaction>& txs, std::uint32_t first,
                std::uint32_t last);

// Content digest per regular file in `dir`. Wall-clock values cannot repeat,
// so bench_table.csv is skipped and the seconds column of metrics_*.csv is
// dropped before hashing.
std::map<std::string, std::size_t> RunDigests(const std::filesystem::path& dir);

}  // namespace aml::testing
