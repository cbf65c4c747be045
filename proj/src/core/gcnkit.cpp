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

#include "amlgraph/gcnkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "csv.hpp"

namespace aml::gcnkit {

using Clock = std::chrono::steady_clock;

NormalizedAdjacency NormalizeAdjacency(const gstore::CsrGraph& g) {
  const std::size_t n = g.vertex_count;
  // Undirected closure plus self-loops.
  std::vector<std::pair<gstore::VertexId, gstore::VertexId>> pairs;
  pairs.reserve(2 * g.edge_count() + n);
  for (gstore::VertexId v = 0; v < n; ++v) {
    pairs.emplace_back(v, v);
    for (gstore::VertexId w : g.row(v)) {
      pairs.emplace_back(v, w);
      pairs.emplace_back(w, v);
    }
  }
  const gstore::CsrGraph sym = gstore::BuildCsr(n, pairs);

  NormalizedAdjacency adj;
  adj.inv_sqrt_degree.resize(n);
  for (gstore::VertexId v = 0; v < n; ++v) {
    adj.inv_sqrt_degree[v] = 1.0 / std::sqrt(static_cast<double>(sym.degree(v)));
  }
  SparseMatrix& a = adj.matrix;
  a.rows = a.cols = n;
  a.offsets = sym.offsets;
  a.indices = sym.neighbors;
  a.values.resize(a.indices.size());
  for (gstore::VertexId v = 0; v < n; ++v) {
    for (std::uint64_t k = a.offsets[v]; k < a.offsets[v + 1]; ++k) {
      a.values[k] = adj.inv_sqrt_degree[v] * adj.inv_sqrt_degree[a.indices[k]];
    }
  }
  return adj;
}

GcnModel InitModel(std::size_t features, std::size_t hidden, std::size_t classes,
                   std::uint64_t seed) {
  Rng rng(seed);
  auto glorot = [&](std::size_t fan_in, std::size_t fan_out) {
    Matrix w(fan_in, fan_out);
    const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-r, r);
    for (double& v : w.data()) v = u(rng);
    return w;
  };
  GcnModel m;
  m.w1 = glorot(features, hidden);
  m.w2 = glorot(hidden, classes);
  return m;
}

ForwardCache ForwardWithCache(const NormalizedAdjacency& adj, const Matrix& x,
                              const GcnModel& model, linalg::OpCounter* ops) {
  if (x.rows() != adj.vertex_count() || x.cols() != model.features() ||
      model.w2.rows() != model.hidden()) {
    throw Error(ErrorCode::kInvalidArgument,
                "forward: shape mismatch (X " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()) + ", graph " + std::to_string(adj.vertex_count()) +
                    ", W1 " + std::to_string(model.w1.rows()) + "x" +
                    std::to_string(model.w1.cols()) + ")");
  }
  ForwardCache c;
  c.support1 = linalg::MatMul(x, model.w1, ops);
  c.pre1 = linalg::SpMM(adj.matrix, c.support1, ops);
  c.hidden = c.pre1;
  linalg::ReluInPlace(c.hidden);
  c.support2 = linalg::MatMul(c.hidden, model.w2, ops);
  c.logits = linalg::SpMM(adj.matrix, c.support2, ops);
  c.probs = c.logits;
  linalg::SoftmaxRowsInPlace(c.probs);
  return c;
}

Matrix Forward(const NormalizedAdjacency& adj, const Matrix& x, const GcnModel& model) {
  return ForwardWithCache(adj, x, model).probs;
}

void TrainSplit::Validate(std::size_t vertex_count) const {
  if (train.empty()) throw Error(ErrorCode::kInvalidArgument, "empty train set");
  if (val.empty() || test.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "validation and test sets must be nonempty");
  }
  if (labels.size() != vertex_count) {
    throw Error(ErrorCode::kInvalidArgument, "label vector does not match vertex count");
  }
  std::vector<char> seen(vertex_count, 0);
  for (const auto* part : {&train, &val, &test}) {
    for (std::uint32_t id : *part) {
      if (id >= vertex_count) throw Error(ErrorCode::kOutOfRange, "split id out of range");
      if (seen[id]++) throw Error(ErrorCode::kInvalidArgument, "split parts overlap");
    }
  }
}

TrainSplit MakeSplit(std::span<const simnet::SarLabel> labels, SplitFractions fractions,
                     std::uint64_t seed) {
  if (!(fractions.train > 0 && fractions.val > 0 && fractions.train + fractions.val < 1)) {
    throw Error(ErrorCode::kConfig, "split fractions must be positive and sum below 1");
  }
  TrainSplit s;
  s.labels.resize(labels.size(), 0);
  std::vector<std::uint32_t> by_class[2];
  for (std::uint32_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == simnet::SarLabel::kUnknown) continue;
    const int y = labels[v] == simnet::SarLabel::kSuspicious ? 1 : 0;
    s.labels[v] = static_cast<std::uint8_t>(y);
    by_class[y].push_back(v);
  }
  Rng rng(seed);
  for (auto& ids : by_class) {
    for (std::size_t i = ids.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(ids[i - 1], ids[pick(rng)]);
    }
    const auto n = ids.size();
    const auto n_train = static_cast<std::size_t>(std::floor(fractions.train * n));
    const auto n_val = static_cast<std::size_t>(std::floor(fractions.val * n));
    s.train.insert(s.train.end(), ids.begin(), ids.begin() + n_train);
    s.val.insert(s.val.end(), ids.begin() + n_train, ids.begin() + n_train + n_val);
    s.test.insert(s.test.end(), ids.begin() + n_train + n_val, ids.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

ClassWeights BalancedClassWeights(const TrainSplit& split) {
  std::vector<std::size_t> count(kClassCount, 0);
  for (std::uint32_t i : split.train) ++count[split.labels[i]];
  ClassWeights w(kClassCount, 0.0);
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (count[c] > 0) {
      w[c] = static_cast<double>(split.train.size()) /
             (static_cast<double>(kClassCount) * static_cast<double>(count[c]));
    }
  }
  return w;
}

double CrossEntropy(const Matrix& logits, const Matrix& probs, std::span<const std::uint32_t> ids,
                    std::span<const std::uint8_t> labels, Matrix* grad,
                    std::span<const double> class_weight) {
  if (ids.empty()) throw Error(ErrorCode::kInvalidArgument, "cross-entropy over an empty set");
  const double scale = 1.0 / static_cast<double>(ids.size());
  double loss = 0.0;
  for (std::uint32_t i : ids) {
    const auto z = logits.row(i);
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const std::uint8_t y = labels[i];
    const double w = class_weight.empty() ? 1.0 : class_weight[y];
    loss += w * ((mx + std::log(sum)) - z[y]);
    if (grad) {
      auto g = grad->row(i);
      const auto p = probs.row(i);
      for (std::size_t c = 0; c < g.size(); ++c) {
        g[c] = w * (p[c] - (c == y ? 1.0 : 0.0)) * scale;
      }
    }
  }
  return loss * scale;
}

namespace {

Gradients Backward(const NormalizedAdjacency& adj, const Matrix& x, const GcnModel& model,
                   const ForwardCache& c, const TrainSplit& split, linalg::OpCounter* ops,
                   std::span<const double> class_weight) {
  Matrix d_logits(c.logits.rows(), c.logits.cols());
  Gradients g;
  g.loss = CrossEntropy(c.logits, c.probs, split.train, split.labels, &d_logits, class_weight);

  // Â is symmetric, so Â^T · d = Â · d.
  const Matrix d_support2 = linalg::SpMM(adj.matrix, d_logits, ops);
  g.w2 = linalg::MatMulTN(c.hidden, d_support2, ops);
  Matrix d_pre1 = linalg::MatMulNT(d_support2, model.w2, ops);
  for (std::size_t i = 0; i < d_pre1.size(); ++i) {
    if (!(c.pre1.data()[i] > 0.0)) d_pre1.data()[i] = 0.0;
  }
  const Matrix d_support1 = linalg::SpMM(adj.matrix, d_pre1, ops);
  g.w1 = linalg::MatMulTN(x, d_support1, ops);
  return g;
}

}  // namespace

Gradients LossAndGrads(const NormalizedAdjacency& adj, const Matrix& x, const GcnModel& model,
                       const TrainSplit& split, linalg::OpCounter* ops,
                       std::span<const double> class_weight) {
  if (split.train.empty()) throw Error(ErrorCode::kInvalidArgument, "empty train set");
  return Backward(adj, x, model, ForwardWithCache(adj, x, model, ops), split, ops, class_weight);
}

std::string_view ToString(OptimizerKind k) {
  return k == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind ParseOptimizer(std::string_view s) {
  if (s == "adam") return OptimizerKind::kAdam;
  if (s == "sgd") return OptimizerKind::kSgd;
  throw Error(ErrorCode::kConfig, "unknown optimizer '" + std::string(s) + "'");
}

std::string_view ToString(ClassWeighting w) {
  return w == ClassWeighting::kBalanced ? "balanced" : "none";
}

std::string_view ToString(Sampling s) { return s == Sampling::kBatch ? "batch" : "global"; }

Sampling ParseSampling(std::string_view s) {
  if (s == "global") return Sampling::kGlobal;
  if (s == "batch") return Sampling::kBatch;
  throw Error(ErrorCode::kConfig, "unknown sampling '" + std::string(s) + "'");
}

ClassWeighting ParseClassWeighting(std::string_view s) {
  if (s == "balanced") return ClassWeighting::kBalanced;
  if (s == "none") return ClassWeighting::kNone;
  throw Error(ErrorCode::kConfig, "unknown class_weighting '" + std::string(s) + "'");
}

Optimizer::Optimizer(OptimizerKind kind, double lr, const GcnModel& shape)
    : kind_(kind),
      lr_(lr),
      m1_(shape.w1.rows(), shape.w1.cols()),
      v1_(shape.w1.rows(), shape.w1.cols()),
      m2_(shape.w2.rows(), shape.w2.cols()),
      v2_(shape.w2.rows(), shape.w2.cols()) {}

void Optimizer::Step(GcnModel& model, const Matrix& g1, const Matrix& g2) {
  ++t_;
  Update(model.w1, g1, m1_, v1_);
  Update(model.w2, g2, m2_, v2_);
}

void Optimizer::Update(Matrix& w, const Matrix& g, Matrix& m, Matrix& v) {
  if (kind_ == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] -= lr_ * g.data()[i];
    return;
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double gi = g.data()[i];
    m.data()[i] = kBeta1 * m.data()[i] + (1.0 - kBeta1) * gi;
    v.data()[i] = kBeta2 * v.data()[i] + (1.0 - kBeta2) * gi * gi;
    const double mhat = m.data()[i] / c1;
    const double vhat = v.data()[i] / c2;
    w.data()[i] -= lr_ * mhat / (std::sqrt(vhat) + kEps);
  }
}

TrainHyper TrainHyper::FromSection(const ConfigSection& s) {
  TrainHyper h;
  h.hidden = s.GetUint("hidden", h.hidden);
  h.lr = s.GetDouble("lr", h.lr);
  h.epochs = static_cast<std::uint32_t>(s.GetUint("epochs", h.epochs));
  h.seed = s.GetUint("seed", h.seed);
  h.optimizer = ParseOptimizer(s.GetString("optimizer", std::string(ToString(h.optimizer))));
  h.sampling = ParseSampling(s.GetString("sampling", std::string(ToString(h.sampling))));
  h.class_weighting = ParseClassWeighting(
      s.GetString("class_weighting", std::string(ToString(h.class_weighting))));
  h.samples = static_cast<std::uint32_t>(s.GetUint("samples", h.samples));
  h.batch_size = static_cast<std::uint32_t>(s.GetUint("batch_size", h.batch_size));
  if (h.hidden == 0) throw Error(ErrorCode::kConfig, "hidden must be positive");
  if (!(h.lr >= 0.0)) throw Error(ErrorCode::kConfig, "lr must be non-negative");
  if (h.samples == 0 || h.batch_size == 0) {
    throw Error(ErrorCode::kConfig, "samples and batch_size must be positive");
  }
  return h;
}

ClassWeights TrainHyper::WeightsFor(const TrainSplit& split) const {
  return class_weighting == ClassWeighting::kBalanced ? BalancedClassWeights(split) : ClassWeights{};
}

double TrainResult::TrainSeconds() const {
  double s = 0.0;
  for (const auto& m : metrics) s += m.seconds;
  return s;
}

double Accuracy(const Matrix& probs, std::span<const std::uint32_t> ids,
                std::span<const std::uint8_t> labels) {
  if (ids.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::uint32_t i : ids) {
    const auto p = probs.row(i);
    const auto arg = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    hit += arg == labels[i];
  }
  return static_cast<double>(hit) / static_cast<double>(ids.size());
}

TrainResult TrainFull(const NormalizedAdjacency& adj, const Matrix& x, const TrainSplit& split,
                      const TrainHyper& hyper) {
  split.Validate(adj.vertex_count());
  TrainResult r;
  r.model = InitModel(x.cols(), hyper.hidden, kClassCount, hyper.seed);
  Optimizer opt(hyper.optimizer, hyper.lr, r.model);
  const ClassWeights weights = hyper.WeightsFor(split);
  for (std::uint32_t e = 0; e < hyper.epochs; ++e) {
    linalg::OpCounter ops;
    const auto t0 = Clock::now();
    const ForwardCache c = ForwardWithCache(adj, x, r.model, &ops);
    const Gradients g = Backward(adj, x, r.model, c, split, &ops, weights);
    if (!std::isfinite(g.loss)) {
      throw Error(ErrorCode::kDivergence, "gcn diverged at epoch " + std::to_string(e + 1));
    }
    opt.Step(r.model, g.w1, g.w2);
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    // Validation accuracy of the pre-update forward pass comes for free.
    r.metrics.push_back({e + 1, g.loss, Accuracy(c.probs, split.val, split.labels), seconds, ops.macs});
  }
  return r;
}

std::vector<double> SuspiciousColumn(const Matrix& probs) {
  std::vector<double> s(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) s[i] = probs(i, 1);
  return s;
}

double F1At(std::span<const double> score, std::span<const std::uint32_t> ids,
            std::span<const std::uint8_t> labels, double threshold, double* precision,
            double* recall) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::uint32_t i : ids) {
    const bool pred = score[i] >= threshold;
    const bool pos = labels[i] == 1;
    tp += pred && pos;
    fp += pred && !pos;
    fn += !pred && pos;
  }
  const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double r = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  if (precision) *precision = p;
  if (recall) *recall = r;
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

DetectionScore ScoreDetection(std::span<const double> score, const TrainSplit& split) {
  std::vector<std::uint32_t> order(split.val.begin(), split.val.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return score[a] > score[b]; });
  std::size_t positives = 0;
  for (std::uint32_t i : order) positives += split.labels[i];

  DetectionScore best;
  best.threshold = std::numeric_limits<double>::infinity();
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    tp += split.labels[order[k]];
    // Cut only between distinct scores.
    if (k + 1 < order.size() && score[order[k + 1]] == score[order[k]]) continue;
    const double predicted = static_cast<double>(k + 1);
    const double f1 = positives ? 2.0 * static_cast<double>(tp) / (predicted + static_cast<double>(positives)) : 0.0;
    if (f1 > best.val_f1) {
      best.val_f1 = f1;
      best.threshold = score[order[k]];
    }
  }
  best.test_f1 = F1At(score, split.test, split.labels, best.threshold, &best.test_precision,
                      &best.test_recall);
  return best;
}

std::vector<double> LogisticBaseline(const Matrix& x, const TrainSplit& split,
                                     std::uint32_t epochs, double lr,
                                     std::span<const double> class_weight) {
  const std::size_t k = x.cols();
  std::vector<double> w(k + 1, 0.0), m(k + 1, 0.0), v(k + 1, 0.0), g(k + 1);
  auto predict = [&](std::size_t i) {
    double z = w[k];
    for (std::size_t j = 0; j < k; ++j) z += w[j] * x(i, j);
    return 1.0 / (1.0 + std::exp(-z));
  };
  const double scale = 1.0 / static_cast<double>(split.train.size());
  for (std::uint32_t t = 1; t <= epochs; ++t) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::uint32_t i : split.train) {
      const double w = class_weight.empty() ? 1.0 : class_weight[split.labels[i]];
      const double d = w * (predict(i) - split.labels[i]) * scale;
      for (std::size_t j = 0; j < k; ++j) g[j] += d * x(i, j);
      g[k] += d;
    }
    const double c1 = 1.0 - std::pow(0.9, t), c2 = 1.0 - std::pow(0.999, t);
    for (std::size_t j = 0; j <= k; ++j) {
      m[j] = 0.9 * m[j] + 0.1 * g[j];
      v[j] = 0.999 * v[j] + 0.001 * g[j] * g[j];
      w[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + 1e-8);
    }
  }
  std::vector<double> p(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) p[i] = predict(i);
  return p;
}

namespace {

constexpr char kCheckpointMagic[4] = {'G', 'C', 'N', '1'};

}  // namespace

void WriteCheckpoint(const std::filesystem::path& path, const GcnModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kCheckpointMagic, 4);
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(model.features()),
                                 static_cast<std::uint32_t>(model.hidden()),
                                 static_cast<std::uint32_t>(model.classes())};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (const Matrix* w : {&model.w1, &model.w2}) {
    out.write(reinterpret_cast<const char*>(w->data().data()),
              static_cast<std::streamsize>(w->size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::kIo, "error writing " + path.string());
}

GcnModel ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[4];
  std::uint32_t dims[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw Error(ErrorCode::kIo, path.string() + ": not a GCN1 checkpoint");
  }
  GcnModel m;
  m.w1 = Matrix(dims[0], dims[1]);
  m.w2 = Matrix(dims[1], dims[2]);
  for (Matrix* w : {&m.w1, &m.w2}) {
    in.read(reinterpret_cast<char*>(w->data().data()),
            static_cast<std::streamsize>(w->size() * sizeof(double)));
  }
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": truncated checkpoint");
  return m;
}

void WriteMetricsCsv(const std::filesystem::path& path, const std::vector<EpochMetrics>& metrics) {
  csv::Writer w(path);
  w.Line("epoch,loss,val_acc,seconds");
  for (const auto& m : metrics) w.Row(m.epoch, m.loss, m.val_accuracy, m.seconds);
  w.Close();
}

}  // namespace aml::gcnkit
