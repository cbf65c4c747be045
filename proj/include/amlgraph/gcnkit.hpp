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

// Two-layer graph convolutional network for node suspiciousness:
//
//   P = softmax( Â · relu( Â · X · W1 ) · W2 ),   Â = D^-1/2 (A + I) D^-1/2
//
// with A the undirected closure of the account graph. Training is full
// batch with a hand-written backward pass.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "amlgraph/config.hpp"
#include "amlgraph/gstore.hpp"
#include "amlgraph/linalg.hpp"
#include "amlgraph/simnet.hpp"

namespace aml::gcnkit {

using linalg::Matrix;
using linalg::SparseMatrix;

inline constexpr std::size_t kClassCount = 2;  // normal, suspicious

struct NormalizedAdjacency {
  SparseMatrix matrix;  // symmetric, self-loop on every row
  std::vector<double> inv_sqrt_degree;  // 1 / sqrt(|N(v)| + 1)

  std::size_t vertex_count() const { return matrix.rows; }
};

// Entries are inv_sqrt_degree[u] * inv_sqrt_degree[v], computed in that order.
NormalizedAdjacency NormalizeAdjacency(const gstore::CsrGraph& g);

struct GcnModel {
  Matrix w1;  // F x H
  Matrix w2;  // H x C

  std::size_t features() const { return w1.rows(); }
  std::size_t hidden() const { return w1.cols(); }
  std::size_t classes() const { return w2.cols(); }
  friend bool operator==(const GcnModel&, const GcnModel&) = default;
};

// Uniform(-r, r) with r = sqrt(6 / (fan_in + fan_out)), seeded.
GcnModel InitModel(std::size_t features, std::size_t hidden, std::size_t classes,
                   std::uint64_t seed);

struct ForwardCache {
  Matrix support1;  // X W1
  Matrix pre1;      // Â X W1
  Matrix hidden;    // relu(pre1)
  Matrix support2;  // hidden W2
  Matrix logits;    // Â hidden W2
  Matrix probs;
};

ForwardCache ForwardWithCache(const NormalizedAdjacency& adj, const Matrix& x,
                              const GcnModel& model, linalg::OpCounter* ops = nullptr);
Matrix Forward(const NormalizedAdjacency& adj, const Matrix& x, const GcnModel& model);

struct TrainSplit {
  std::vector<std::uint32_t> train;
  std::vector<std::uint32_t> val;
  std::vector<std::uint32_t> test;
  std::vector<std::uint8_t> labels;  // per vertex: 0 normal, 1 suspicious

  void Validate(std::size_t vertex_count) const;
};

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
};

// Stratified by label; accounts labeled unknown are left out of all parts.
TrainSplit MakeSplit(std::span<const simnet::SarLabel> labels, SplitFractions fractions,
                     std::uint64_t seed);

struct Gradients {
  double loss = 0.0;
  Matrix w1;
  Matrix w2;
};

// Per-class loss weights; empty means every class weighs 1.
using ClassWeights = std::vector<double>;

// w_c = |train| / (C * |train of class c|), so the weights average to 1 over
// the train set. Absent classes get weight 0.
ClassWeights BalancedClassWeights(const TrainSplit& split);

// Cross-entropy over split.train (weighted, divided by |train|) and its
// analytic gradients.
Gradients LossAndGrads(const NormalizedAdjacency& adj, const Matrix& x, const GcnModel& model,
                       const TrainSplit& split, linalg::OpCounter* ops = nullptr,
                       std::span<const double> class_weight = {});

// Cross-entropy of softmax(logits) rows `ids` against `labels`, each row
// weighted by its class and the sum divided by |ids|. With `grad` set, also
// writes dL/dlogits into those rows.
double CrossEntropy(const Matrix& logits, const Matrix& probs, std::span<const std::uint32_t> ids,
                    std::span<const std::uint8_t> labels, Matrix* grad,
                    std::span<const double> class_weight = {});

enum class OptimizerKind : std::uint8_t { kAdam, kSgd };
enum class ClassWeighting : std::uint8_t { kNone, kBalanced };
// fastgcn importance distribution: global column norms of Â, or the column
// norms of each minibatch's rows.
enum class Sampling : std::uint8_t { kGlobal, kBatch };

std::string_view ToString(OptimizerKind k);
OptimizerKind ParseOptimizer(std::string_view s);
std::string_view ToString(ClassWeighting w);
ClassWeighting ParseClassWeighting(std::string_view s);
std::string_view ToString(Sampling s);
Sampling ParseSampling(std::string_view s);

class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, const GcnModel& shape);
  void Step(GcnModel& model, const Matrix& g1, const Matrix& g2);

 private:
  void Update(Matrix& w, const Matrix& g, Matrix& m, Matrix& v);

  OptimizerKind kind_;
  double lr_;
  std::uint64_t t_ = 0;
  Matrix m1_, v1_, m2_, v2_;
};

struct TrainHyper {
  std::size_t hidden = 128;
  double lr = 0.01;
  std::uint32_t epochs = 32;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  ClassWeighting class_weighting = ClassWeighting::kBalanced;
  // fastgcn only
  std::uint32_t samples = 400;
  std::uint32_t batch_size = 256;
  Sampling sampling = Sampling::kGlobal;

  // Keys: hidden, lr, epochs, seed, optimizer, class_weighting, samples,
  // batch_size, sampling.
  static TrainHyper FromSection(const ConfigSection& section);
  ClassWeights WeightsFor(const TrainSplit& split) const;
};

struct EpochMetrics {
  std::uint32_t epoch = 0;
  double loss = 0.0;
  double val_accuracy = 0.0;
  double seconds = 0.0;  // training work only, validation excluded
  std::uint64_t macs = 0;
};

struct TrainResult {
  GcnModel model;
  std::vector<EpochMetrics> metrics;
  double setup_seconds = 0.0;

  double TrainSeconds() const;
};

// Throws Error(kDivergence) naming the epoch when the loss turns non-finite.
TrainResult TrainFull(const NormalizedAdjacency& adj, const Matrix& x, const TrainSplit& split,
                      const TrainHyper& hyper);

double Accuracy(const Matrix& probs, std::span<const std::uint32_t> ids,
                std::span<const std::uint8_t> labels);

struct DetectionScore {
  double threshold = 0.5;
  double val_f1 = 0.0;
  double test_f1 = 0.0;
  double test_precision = 0.0;
  double test_recall = 0.0;
};

// F1 on the suspicious class. The decision threshold on P(suspicious) is the
// one maximizing validation F1; test F1 is then read at that threshold.
DetectionScore ScoreDetection(std::span<const double> suspicious_prob, const TrainSplit& split);
std::vector<double> SuspiciousColumn(const Matrix& probs);
double F1At(std::span<const double> score, std::span<const std::uint32_t> ids,
            std::span<const std::uint8_t> labels, double threshold, double* precision = nullptr,
            double* recall = nullptr);

// Degree + amount logistic regression, trained full batch with Adam on the
// same split. Returns P(suspicious) for every row of `x`.
std::vector<double> LogisticBaseline(const Matrix& x, const TrainSplit& split,
                                     std::uint32_t epochs = 500, double lr = 0.05,
                                     std::span<const double> class_weight = {});

// Checkpoint: "GCN1", u32 F, u32 H, u32 C, W1 then W2 as row-major f64 LE.
void WriteCheckpoint(const std::filesystem::path& path, const GcnModel& model);
GcnModel ReadCheckpoint(const std::filesystem::path& path);

// CSV `epoch,loss,val_acc,seconds`.
void WriteMetricsCsv(const std::filesystem::path& path, const std::vector<EpochMetrics>& metrics);

}  // namespace aml::gcnkit
