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

#include "amlgraph/deltainfer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace aml::deltainfer {

OverlayGraph::OverlayGraph(const gstore::CsrGraph& g) {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  pairs.reserve(2 * g.edge_count());
  for (VertexId v = 0; v < g.vertex_count; ++v) {
    for (VertexId w : g.row(v)) {
      if (w == v) continue;
      pairs.emplace_back(v, w);
      pairs.emplace_back(w, v);
    }
  }
  base_ = gstore::BuildCsr(g.vertex_count, pairs);
  delta_.assign(g.vertex_count, {});
}

std::size_t OverlayGraph::edge_count() const { return (base_.edge_count() + delta_edges_) / 2; }

std::size_t OverlayGraph::degree(VertexId v) const { return base_.degree(v) + delta_[v].size(); }

bool OverlayGraph::HasEdge(VertexId u, VertexId v) const {
  const auto row = base_.row(u);
  return std::binary_search(row.begin(), row.end(), v) ||
         std::binary_search(delta_[u].begin(), delta_[u].end(), v);
}

bool OverlayGraph::AddEdge(VertexId u, VertexId v) {
  if (u == v || HasEdge(u, v)) return false;
  auto insert = [](std::vector<VertexId>& list, VertexId w) {
    list.insert(std::lower_bound(list.begin(), list.end(), w), w);
  };
  insert(delta_[u], v);
  insert(delta_[v], u);
  delta_edges_ += 2;
  return true;
}

void OverlayGraph::Neighbors(VertexId v, bool closed, std::vector<VertexId>& out) const {
  out.clear();
  const auto row = base_.row(v);
  const auto& extra = delta_[v];
  out.resize(row.size() + extra.size());
  std::merge(row.begin(), row.end(), extra.begin(), extra.end(), out.begin());
  if (closed) out.insert(std::lower_bound(out.begin(), out.end(), v), v);
}

gstore::CsrGraph OverlayGraph::Materialize() const {
  gstore::CsrGraph g;
  g.vertex_count = base_.vertex_count;
  g.offsets.assign(g.vertex_count + 1, 0);
  g.neighbors.reserve(base_.edge_count() + delta_edges_);
  std::vector<VertexId> row;
  for (VertexId v = 0; v < g.vertex_count; ++v) {
    Neighbors(v, false, row);
    g.neighbors.insert(g.neighbors.end(), row.begin(), row.end());
    g.offsets[v + 1] = g.neighbors.size();
  }
  return g;
}

void OverlayGraph::Compact() {
  if (delta_edges_ == 0) return;
  base_ = Materialize();
  for (auto& d : delta_) d.clear();
  delta_edges_ = 0;
}

void DirtySet::Merge(const DirtySet& other) {
  auto unite = [](std::vector<VertexId>& a, const std::vector<VertexId>& b) {
    std::vector<VertexId> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    a = std::move(out);
  };
  unite(layer1, other.layer1);
  unite(layer2, other.layer2);
  epoch = std::max(epoch, other.epoch);
}

IncrementalEngine::IncrementalEngine(const gstore::CsrGraph& graph, Matrix x,
                                     gcnkit::GcnModel model)
    : graph_(graph), x_(std::move(x)), model_(std::move(model)) {
  const gstore::CsrGraph sym = graph_.Materialize();
  const gcnkit::NormalizedAdjacency adj = gcnkit::NormalizeAdjacency(sym);
  gcnkit::ForwardCache c = gcnkit::ForwardWithCache(adj, x_, model_);
  inv_sqrt_degree_ = adj.inv_sqrt_degree;
  support1_ = std::move(c.support1);
  pre1_ = std::move(c.pre1);
  hidden_ = std::move(c.hidden);
  support2_ = std::move(c.support2);
  logits_ = std::move(c.logits);
  snapshot_.probs = std::make_shared<const Matrix>(std::move(c.probs));
  stamp_.assign(graph_.vertex_count(), 0);
}

void IncrementalEngine::CheckIds(std::span<const std::pair<VertexId, VertexId>> edges) const {
  const std::size_t n = graph_.vertex_count();
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw Error(ErrorCode::kOutOfRange, "unknown account id " + std::to_string(std::max(u, v)) +
                                              " (graph has " + std::to_string(n) + " accounts)");
    }
  }
}

DirtySet IncrementalEngine::ApplyTransactions(std::span<const txflow::Transaction> txs) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(txs.size());
  for (const auto& t : txs) edges.emplace_back(t.src, t.dst);
  return ApplyEdges(edges);
}

DirtySet IncrementalEngine::ApplyEdges(std::span<const std::pair<VertexId, VertexId>> edges) {
  CheckIds(edges);
  std::vector<VertexId> touched;
  for (const auto& [u, v] : edges) {
    if (graph_.AddEdge(u, v)) {
      touched.push_back(u);
      touched.push_back(v);
    }
  }
  if (touched.empty()) return DirtySet{epoch_, {}, {}};
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (VertexId v : touched) {
    inv_sqrt_degree_[v] = 1.0 / std::sqrt(static_cast<double>(graph_.degree(v) + 1));
  }
  ++epoch_;
  return Expand(touched);
}

DirtySet IncrementalEngine::Expand(std::span<const VertexId> touched) {
  DirtySet d;
  d.epoch = epoch_;
  ++stamp_round_;
  auto add_closed_ball = [&](std::span<const VertexId> from, std::vector<VertexId>& out) {
    for (VertexId v : from) {
      graph_.Neighbors(v, true, scratch_);
      for (VertexId w : scratch_) {
        if (stamp_[w] != stamp_round_) {
          stamp_[w] = stamp_round_;
          out.push_back(w);
        }
      }
    }
  };
  add_closed_ball(touched, d.layer1);
  std::sort(d.layer1.begin(), d.layer1.end());
  // Stamps from layer 1 stay set, so layer 2 collects only the new ring.
  std::vector<VertexId> ring;
  add_closed_ball(d.layer1, ring);
  d.layer2.reserve(d.layer1.size() + ring.size());
  std::sort(ring.begin(), ring.end());
  std::merge(d.layer1.begin(), d.layer1.end(), ring.begin(), ring.end(),
             std::back_inserter(d.layer2));
  return d;
}

void IncrementalEngine::RowProduct(VertexId w, const Matrix& in, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  graph_.Neighbors(w, true, scratch_);
  const std::size_t n = in.cols();
  for (VertexId k : scratch_) {
    const double a = inv_sqrt_degree_[w] * inv_sqrt_degree_[k];
    const double* row = in.row(k).data();
    for (std::size_t j = 0; j < n; ++j) out[j] += a * row[j];
  }
}

RefreshStats IncrementalEngine::Refresh(const DirtySet& dirty) {
  if (dirty.epoch != epoch_) {
    throw Error(ErrorCode::kStale, "dirty set from epoch " + std::to_string(dirty.epoch) +
                                       " but graph is at epoch " + std::to_string(epoch_));
  }
  RefreshStats stats;
  if (dirty.empty()) return stats;

  for (VertexId w : dirty.layer1) {
    auto pre = pre1_.row(w);
    RowProduct(w, support1_, pre);
    auto h = hidden_.row(w);
    for (std::size_t j = 0; j < h.size(); ++j) h[j] = pre[j] > 0.0 ? pre[j] : 0.0;
    linalg::MatMulRow(h, model_.w2, support2_.row(w));
  }
  stats.layer1_rows = dirty.layer1.size();

  auto next = std::make_shared<Matrix>(*Current().probs);
  for (VertexId w : dirty.layer2) {
    RowProduct(w, support2_, logits_.row(w));
    auto p = next->row(w);
    const auto z = logits_.row(w);
    std::copy(z.begin(), z.end(), p.begin());
    linalg::SoftmaxRow(p);
  }
  stats.layer2_rows = dirty.layer2.size();

  std::lock_guard lock(snapshot_mu_);
  snapshot_.epoch = epoch_;
  snapshot_.probs = std::move(next);
  return stats;
}

Snapshot IncrementalEngine::Current() const {
  std::lock_guard lock(snapshot_mu_);
  return snapshot_;
}

std::vector<txflow::Transaction> ReadTransactionStream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<txflow::Transaction> txs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      if (auto t = txflow::ParseTransactionRow(line)) txs.push_back(*t);
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return txs;
}

}  // namespace aml::deltainfer
