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

#include "amlgraph/fastsamp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace aml::fastsamp {

using Clock = std::chrono::steady_clock;
using gcnkit::Gradients;
using gcnkit::NormalizedAdjacency;

SampleDistribution BuildDistribution(const NormalizedAdjacency& adj) {
  const SparseMatrix& a = adj.matrix;
  SampleDistribution d;
  d.q.assign(a.cols, 0.0);
  for (std::size_t k = 0; k < a.nnz(); ++k) d.q[a.indices[k]] += a.values[k] * a.values[k];
  const double total = std::accumulate(d.q.begin(), d.q.end(), 0.0);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sampling distribution of an all-zero operator");
  }
  for (double& v : d.q) v /= total;
  return d;
}

LayerSampler::LayerSampler(const SampleDistribution& dist)
    : dist_(&dist), pick_(dist.q.begin(), dist.q.end()) {}

SampledLayer LayerSampler::Draw(std::uint32_t t, Rng& rng) {
  if (t == 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  SampledLayer layer;
  layer.ids.resize(t);
  layer.scale.resize(t);
  for (std::uint32_t j = 0; j < t; ++j) {
    const std::uint32_t v = pick_(rng);
    layer.ids[j] = v;
    layer.scale[j] = 1.0 / (static_cast<double>(t) * dist_->q[v]);
  }
  return layer;
}

SampledLayer SampleLayer(const SampleDistribution& dist, std::uint32_t t, std::uint64_t seed) {
  LayerSampler sampler(dist);
  Rng rng(seed);
  return sampler.Draw(t, rng);
}

BatchSampler::BatchSampler(const NormalizedAdjacency& adj)
    : adj_(&adj), mass_(adj.vertex_count(), 0.0) {}

SampledLayer BatchSampler::Draw(std::span<const std::uint32_t> rows, std::uint32_t t, Rng& rng) {
  if (t == 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  for (std::uint32_t v : touched_) mass_[v] = 0.0;
  touched_.clear();
  const SparseMatrix& a = adj_->matrix;
  for (std::uint32_t r : rows) {
    for (std::uint64_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
      const std::uint32_t v = a.indices[k];
      if (mass_[v] == 0.0) touched_.push_back(v);
      mass_[v] += a.values[k] * a.values[k];
    }
  }
  // Sorted support keeps the draw independent of row order.
  std::sort(touched_.begin(), touched_.end());
  double total = 0.0;
  for (std::uint32_t v : touched_) total += mass_[v];
  if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "batch has no nonzero columns");
  std::vector<double> w(touched_.size());
  for (std::size_t i = 0; i < touched_.size(); ++i) w[i] = (mass_[touched_[i]] /= total);

  std::discrete_distribution<std::uint32_t> pick(w.begin(), w.end());
  SampledLayer layer;
  layer.ids.resize(t);
  layer.scale.resize(t);
  for (std::uint32_t j = 0; j < t; ++j) {
    const std::uint32_t v = touched_[pick(rng)];
    layer.ids[j] = v;
    layer.scale[j] = 1.0 / (static_cast<double>(t) * mass_[v]);
  }
  return layer;
}

SparseMatrix BuildBlock(const NormalizedAdjacency& adj, std::span<const std::uint32_t> rows,
                        const SampledLayer& layer) {
  const SparseMatrix& a = adj.matrix;
  // (vertex, column) pairs sorted by vertex for lookup from Â's rows.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> by_vertex(layer.ids.size());
  for (std::uint32_t j = 0; j < layer.ids.size(); ++j) by_vertex[j] = {layer.ids[j], j};
  std::sort(by_vertex.begin(), by_vertex.end());

  SparseMatrix b;
  b.rows = rows.size();
  b.cols = layer.ids.size();
  b.offsets.assign(rows.size() + 1, 0);
  std::vector<std::pair<std::uint32_t, double>> entries;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    entries.clear();
    const std::uint32_t r = rows[i];
    for (std::uint64_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
      const std::uint32_t u = a.indices[k];
      auto it = std::lower_bound(by_vertex.begin(), by_vertex.end(), std::make_pair(u, 0u));
      for (; it != by_vertex.end() && it->first == u; ++it) {
        entries.emplace_back(it->second, a.values[k] * layer.scale[it->second]);
      }
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& [j, v] : entries) {
      b.indices.push_back(j);
      b.values.push_back(v);
    }
    b.offsets[i + 1] = b.indices.size();
  }
  return b;
}

Matrix EstimateProduct(const NormalizedAdjacency& adj, const Matrix& x,
                       std::span<const std::uint32_t> rows, const SampledLayer& layer) {
  const SparseMatrix block = BuildBlock(adj, rows, layer);
  return linalg::SpMM(block, linalg::GatherRows(x, layer.ids));
}

Gradients SampledGradients(const NormalizedAdjacency& adj, const Matrix& ax,
                           const gcnkit::GcnModel& model, std::span<const std::uint32_t> batch,
                           std::span<const std::uint8_t> labels, const SampledLayer& layer,
                           linalg::OpCounter* ops, std::span<const double> class_weight) {
  const Matrix ax_s = linalg::GatherRows(ax, layer.ids);
  const Matrix pre1 = linalg::MatMul(ax_s, model.w1, ops);
  Matrix hidden = pre1;
  linalg::ReluInPlace(hidden);
  const Matrix support2 = linalg::MatMul(hidden, model.w2, ops);
  const SparseMatrix block = BuildBlock(adj, batch, layer);
  const Matrix logits = linalg::SpMM(block, support2, ops);
  Matrix probs = logits;
  linalg::SoftmaxRowsInPlace(probs);

  std::vector<std::uint32_t> local(batch.size());
  std::iota(local.begin(), local.end(), 0u);
  std::vector<std::uint8_t> local_labels(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) local_labels[i] = labels[batch[i]];

  Gradients g;
  Matrix d_logits(logits.rows(), logits.cols());
  g.loss = gcnkit::CrossEntropy(logits, probs, local, local_labels, &d_logits, class_weight);
  const Matrix d_support2 = linalg::SpMMT(block, d_logits, ops);
  g.w2 = linalg::MatMulTN(hidden, d_support2, ops);
  Matrix d_pre1 = linalg::MatMulNT(d_support2, model.w2, ops);
  for (std::size_t i = 0; i < d_pre1.size(); ++i) {
    if (!(pre1.data()[i] > 0.0)) d_pre1.data()[i] = 0.0;
  }
  g.w1 = linalg::MatMulTN(ax_s, d_pre1, ops);
  return g;
}

gcnkit::TrainResult TrainSampled(const NormalizedAdjacency& adj, const Matrix& x,
                                 const gcnkit::TrainSplit& split, const gcnkit::TrainHyper& hyper) {
  split.Validate(adj.vertex_count());
  if (hyper.samples == 0 || hyper.batch_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "samples and batch_size must be positive");
  }
  gcnkit::TrainResult r;
  r.model = gcnkit::InitModel(x.cols(), hyper.hidden, gcnkit::kClassCount, hyper.seed);
  gcnkit::Optimizer opt(hyper.optimizer, hyper.lr, r.model);

  const auto setup_start = Clock::now();
  const SampleDistribution dist = BuildDistribution(adj);
  LayerSampler sampler(dist);
  BatchSampler batch_sampler(adj);
  const Matrix ax = linalg::SpMM(adj.matrix, x);
  r.setup_seconds = std::chrono::duration<double>(Clock::now() - setup_start).count();

  const gcnkit::ClassWeights weights = hyper.WeightsFor(split);
  Rng rng(SubSeed(hyper.seed, "fastgcn"));
  std::vector<std::uint32_t> order = split.train;
  for (std::uint32_t e = 0; e < hyper.epochs; ++e) {
    linalg::OpCounter ops;
    const auto t0 = Clock::now();
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), begin + hyper.batch_size);
      const std::span<const std::uint32_t> batch(order.data() + begin, end - begin);
      const SampledLayer layer = hyper.sampling == gcnkit::Sampling::kBatch
                                     ? batch_sampler.Draw(batch, hyper.samples, rng)
                                     : sampler.Draw(hyper.samples, rng);
      const Gradients g = SampledGradients(adj, ax, r.model, batch, split.labels, layer, &ops, weights);
      if (!std::isfinite(g.loss)) {
        throw Error(ErrorCode::kDivergence, "fastgcn diverged at epoch " + std::to_string(e + 1));
      }
      loss_sum += g.loss * static_cast<double>(batch.size());
      opt.Step(r.model, g.w1, g.w2);
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    const Matrix probs = gcnkit::Forward(adj, x, r.model);
    r.metrics.push_back({e + 1, loss_sum / static_cast<double>(order.size()),
                         gcnkit::Accuracy(probs, split.val, split.labels), seconds, ops.macs});
  }
  return r;
}

}  // namespace aml::fastsamp
