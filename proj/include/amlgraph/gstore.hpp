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

// Immutable graph storage: CSR adjacency, vertex reorderings and a
// difference-coded compressed form.
//
// Compressed row layout for vertex v with sorted neighbors n0 < n1 < ...:
//   zigzag(n0 - v) as varint, then (n_i - n_{i-1}) as varints.
// A varint carries 7 data bits per byte, low bits first; the high bit marks
// continuation.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "amlgraph/common.hpp"

namespace aml::gstore {

using VertexId = std::uint32_t;

struct CsrGraph {
  std::size_t vertex_count = 0;
  std::vector<std::uint64_t> offsets;  // vertex_count + 1
  std::vector<VertexId> neighbors;

  std::size_t edge_count() const { return neighbors.size(); }
  std::size_t degree(VertexId v) const { return offsets[v + 1] - offsets[v]; }
  std::span<const VertexId> row(VertexId v) const {
    return {neighbors.data() + offsets[v], degree(v)};
  }

  friend bool operator==(const CsrGraph&, const CsrGraph&) = default;
};

// Sorted, deduplicated CSR. Throws Error(kOutOfRange) for endpoints >= n.
CsrGraph BuildCsr(std::size_t vertex_count,
                  std::span<const std::pair<VertexId, VertexId>> edges);

enum class ReorderStrategy : std::uint8_t { kIdentity, kBfs, kDegreeDesc };

std::string_view ToString(ReorderStrategy s);
ReorderStrategy ParseReorderStrategy(std::string_view s);

// permutation[old_id] = new_id.
using Permutation = std::vector<VertexId>;

// bfs: breadth-first from the highest-degree vertex over out-neighbors in
// ascending old id; vertices not reached are appended by descending degree.
// degree_desc: stable sort by descending out-degree.
Permutation Reorder(const CsrGraph& g, ReorderStrategy strategy);

bool IsPermutation(const Permutation& perm);

// CSR of g with every vertex id mapped through perm (rows re-sorted).
CsrGraph Relabel(const CsrGraph& g, const Permutation& perm);

struct CompressedGraph {
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::vector<std::uint32_t> index;  // vertex_count + 1 payload byte offsets
  std::vector<std::uint8_t> payload;
  Permutation permutation;  // old id -> new id

  // Neighbors of (new) vertex v; touches only v's payload slice.
  std::vector<VertexId> Neighbors(VertexId v) const;
  // Full reordered CSR.
  CsrGraph Decode() const;
};

CompressedGraph Compress(const CsrGraph& g, const Permutation& perm);

// Throws Error(kOutOfRange) when v >= vertex_count.
std::vector<VertexId> DecodeNeighbors(const CompressedGraph& cg, VertexId v);

struct CompressionReport {
  std::uint64_t raw_bytes = 0;         // 4 * (M + N + 1)
  std::uint64_t compressed_bytes = 0;  // payload + 4 * (N + 1) index
  double ratio = 1.0;                  // raw / compressed; 1.0 when empty
};

CompressionReport MakeCompressionReport(const CompressedGraph& cg);

// Mean |n_i - n_{i-1}| over consecutive sorted neighbors (first neighbor
// measured against the row's own id). Lower is more compressible.
double MeanNeighborGap(const CsrGraph& g);

// Binary format: "AMLG1", u64 N, u64 M, N x u32 permutation,
// (N + 1) x u32 index, payload. All little-endian.
void WriteCompressed(const std::filesystem::path& path, const CompressedGraph& cg);
CompressedGraph ReadCompressed(const std::filesystem::path& path);

// Edge-list CSV with header `src,dst`. Vertex count is max id + 1 unless
// `vertex_count` is given.
CsrGraph ReadEdgeCsv(const std::filesystem::path& path, std::size_t vertex_count = 0);
void WriteEdgeCsv(const std::filesystem::path& path, const CsrGraph& g);

// Varint primitives, exposed for tests.
void PutVarint(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint64_t GetVarint(const std::uint8_t*& p, const std::uint8_t* end);
constexpr std::uint64_t ZigZag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
constexpr std::int64_t UnZigZag(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

}  // namespace aml::gstore
