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

// Incremental GCN inference under edge insertions.
//
// A new undirected edge (u, v) changes the degrees of u and v, so every Â
// entry in rows u, v and in the rows of their neighbors changes. Layer 1
// outputs are stale on dirty1 = {u, v} ∪ N(u) ∪ N(v); layer 2 outputs on
// dirty2 = dirty1 ∪ N(dirty1). Rows are recomputed in the same summation
// order as gcnkit::ForwardWithCache, so refreshed rows are bit-identical to a
// full forward on the updated graph.
//
// Node features and model weights are held fixed.

#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "amlgraph/gcnkit.hpp"
#include "amlgraph/gstore.hpp"
#include "amlgraph/txflow.hpp"

namespace aml::deltainfer {

using gstore::VertexId;
using linalg::Matrix;

// Symmetric adjacency without self-loops: immutable base CSR plus sorted
// per-vertex insertion lists.
class OverlayGraph {
 public:
  OverlayGraph() = default;
  // Takes the undirected closure of `g` (self-loops dropped).
  explicit OverlayGraph(const gstore::CsrGraph& g);

  std::size_t vertex_count() const { return base_.vertex_count; }
  std::size_t edge_count() const;  // undirected edges
  std::size_t degree(VertexId v) const;
  bool HasEdge(VertexId u, VertexId v) const;
  // Returns false when the edge exists or u == v.
  bool AddEdge(VertexId u, VertexId v);

  // Sorted neighbors of v, with v itself merged in when `closed`.
  void Neighbors(VertexId v, bool closed, std::vector<VertexId>& out) const;

  // Symmetric CSR of the current graph.
  gstore::CsrGraph Materialize() const;
  // Folds the insertion lists into the base.
  void Compact();
  std::size_t delta_size() const { return delta_edges_; }

 private:
  gstore::CsrGraph base_;
  std::vector<std::vector<VertexId>> delta_;
  std::size_t delta_edges_ = 0;  // directed entries across delta_
};

struct DirtySet {
  std::uint64_t epoch = 0;
  std::vector<VertexId> layer1;  // sorted
  std::vector<VertexId> layer2;  // sorted, superset of layer1

  bool empty() const { return layer2.empty(); }
  // Union of both sets; epoch becomes the later one.
  void Merge(const DirtySet& other);
};

struct RefreshStats {
  std::size_t layer1_rows = 0;
  std::size_t layer2_rows = 0;
};

struct Snapshot {
  std::uint64_t epoch = 0;
  std::shared_ptr<const Matrix> probs;
};

class IncrementalEngine {
 public:
  // Runs one full forward to seed the caches.
  IncrementalEngine(const gstore::CsrGraph& graph, Matrix x, gcnkit::GcnModel model);

  // Adds one undirected edge per transaction not already present. Self
  // transfers and repeats leave the graph untouched. Throws
  // Error(kOutOfRange) on an unknown account before mutating anything.
  DirtySet ApplyTransactions(std::span<const txflow::Transaction> txs);
  DirtySet ApplyEdges(std::span<const std::pair<VertexId, VertexId>> edges);

  // Recomputes the dirty rows and publishes a new snapshot. Throws
  // Error(kStale) unless dirty.epoch equals the current graph epoch.
  RefreshStats Refresh(const DirtySet& dirty);

  std::uint64_t epoch() const { return epoch_; }
  const OverlayGraph& graph() const { return graph_; }
  const Matrix& features() const { return x_; }
  const gcnkit::GcnModel& model() const { return model_; }
  // Last refreshed probabilities; safe to call from reader threads.
  Snapshot Current() const;

 private:
  void CheckIds(std::span<const std::pair<VertexId, VertexId>> edges) const;
  DirtySet Expand(std::span<const VertexId> touched);
  void RowProduct(VertexId w, const Matrix& in, std::span<double> out);

  OverlayGraph graph_;
  Matrix x_;
  gcnkit::GcnModel model_;
  std::vector<double> inv_sqrt_degree_;
  Matrix support1_, pre1_, hidden_, support2_, logits_;
  std::uint64_t epoch_ = 0;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t stamp_round_ = 0;
  std::vector<VertexId> scratch_;

  mutable std::mutex snapshot_mu_;
  Snapshot snapshot_;
};

// Reads newline-delimited transaction rows (transactions.csv format, header
// optional) from `path`.
std::vector<txflow::Transaction> ReadTransactionStream(const std::filesystem::path& path);

}  // namespace aml::deltainfer
