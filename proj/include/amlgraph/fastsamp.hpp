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

// Layer-wise importance-sampled GCN training.
//
// The input layer uses the precomputed product ÂX, so a two-layer model
// samples one layer: t vertices drawn i.i.d. from q(v) ∝ ||Â[:, v]||². For a
// minibatch B of labeled vertices the output layer is estimated as
//
//   Z[b] = Σ_j Â[b, s_j] / (t q(s_j)) · relu((ÂX)[s_j] W1) W2
//
// which is unbiased for Â · relu(ÂXW1) · W2 restricted to B.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "amlgraph/gcnkit.hpp"

namespace aml::fastsamp {

using linalg::Matrix;
using linalg::SparseMatrix;

struct SampleDistribution {
  std::vector<double> q;
};

// Throws Error(kInvalidArgument) for an all-zero operator.
SampleDistribution BuildDistribution(const gcnkit::NormalizedAdjacency& adj);

struct SampledLayer {
  std::vector<std::uint32_t> ids;  // t draws, with replacement
  std::vector<double> scale;       // 1 / (t q(ids[j]))
};

class LayerSampler {
 public:
  // Keeps a pointer to `dist`, which must outlive the sampler.
  explicit LayerSampler(const SampleDistribution& dist);
  explicit LayerSampler(SampleDistribution&&) = delete;
  SampledLayer Draw(std::uint32_t t, Rng& rng);

 private:
  const SampleDistribution* dist_;
  std::discrete_distribution<std::uint32_t> pick_;
};

SampledLayer SampleLayer(const SampleDistribution& dist, std::uint32_t t, std::uint64_t seed);

// Draws t columns from q_B(v) ∝ Σ_{b in rows} Â[b, v]², the column norms of
// the minibatch's own rows. Every column a batch row touches has q_B > 0, so
// the estimate stays unbiased for those rows while no draw is spent on
// columns the block would zero out.
class BatchSampler {
 public:
  explicit BatchSampler(const gcnkit::NormalizedAdjacency& adj);
  SampledLayer Draw(std::span<const std::uint32_t> rows, std::uint32_t t, Rng& rng);
  // q_B of the last Draw, indexed by vertex (zero outside the batch support).
  double Probability(std::uint32_t v) const { return mass_[v]; }

 private:
  const gcnkit::NormalizedAdjacency* adj_;
  std::vector<double> mass_;
  std::vector<std::uint32_t> touched_;
};

// |rows| x t block with entry (i, j) = Â[rows[i], ids[j]] * scale[j]. Each
// entry is scaled exactly once; repeated draws give separate columns.
SparseMatrix BuildBlock(const gcnkit::NormalizedAdjacency& adj,
                        std::span<const std::uint32_t> rows, const SampledLayer& layer);

// Monte-Carlo estimate of (Â X)[rows] from one sampled layer.
Matrix EstimateProduct(const gcnkit::NormalizedAdjacency& adj, const Matrix& x,
                       std::span<const std::uint32_t> rows, const SampledLayer& layer);

// Loss and gradients of one sampled minibatch. `ax` is the precomputed ÂX.
gcnkit::Gradients SampledGradients(const gcnkit::NormalizedAdjacency& adj, const Matrix& ax,
                                   const gcnkit::GcnModel& model,
                                   std::span<const std::uint32_t> batch,
                                   std::span<const std::uint8_t> labels,
                                   const SampledLayer& layer, linalg::OpCounter* ops = nullptr,
                                   std::span<const double> class_weight = {});

// Epoch = one pass over shuffled train ids in minibatches of
// hyper.batch_size, one sampled layer of hyper.samples vertices per batch.
// Validation accuracy uses the exact full-graph forward and is not timed.
// setup_seconds covers q, the sampler and the ÂX precompute.
gcnkit::TrainResult TrainSampled(const gcnkit::NormalizedAdjacency& adj, const Matrix& x,
                                 const gcnkit::TrainSplit& split, const gcnkit::TrainHyper& hyper);

}  // namespace aml::fastsamp
