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

#include "amlgraph/gstore.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "csv.hpp"

namespace aml::gstore {

CsrGraph BuildCsr(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges) {
  CsrGraph g;
  g.vertex_count = n;
  g.offsets.assign(n + 1, 0);
  for (const auto& [s, d] : edges) {
    if (s >= n || d >= n) {
      throw Error(ErrorCode::kOutOfRange, "edge (" + std::to_string(s) + "," + std::to_string(d) +
                                              ") out of range for " + std::to_string(n) + " vertices");
    }
    ++g.offsets[s + 1];
  }
  std::partial_sum(g.offsets.begin(), g.offsets.end(), g.offsets.begin());
  g.neighbors.resize(edges.size());
  std::vector<std::uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (const auto& [s, d] : edges) g.neighbors[cursor[s]++] = d;

  // Sort and deduplicate each row, compacting in place.
  std::uint64_t write = 0;
  std::uint64_t row_begin = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const std::uint64_t row_end = g.offsets[v + 1];
    auto first = g.neighbors.begin() + static_cast<std::ptrdiff_t>(row_begin);
    auto last = g.neighbors.begin() + static_cast<std::ptrdiff_t>(row_end);
    std::sort(first, last);
    last = std::unique(first, last);
    g.offsets[v] = write;
    for (auto it = first; it != last; ++it) g.neighbors[write++] = *it;
    row_begin = row_end;
  }
  g.offsets[n] = write;
  g.neighbors.resize(write);
  return g;
}

std::string_view ToString(ReorderStrategy s) {
  switch (s) {
    case ReorderStrategy::kIdentity: return "identity";
    case ReorderStrategy::kBfs: return "bfs";
    case ReorderStrategy::kDegreeDesc: return "degree_desc";
  }
  return "?";
}

ReorderStrategy ParseReorderStrategy(std::string_view s) {
  if (s == "identity") return ReorderStrategy::kIdentity;
  if (s == "bfs") return ReorderStrategy::kBfs;
  if (s == "degree_desc" || s == "degree") return ReorderStrategy::kDegreeDesc;
  throw Error(ErrorCode::kConfig, "unknown reorder strategy '" + std::string(s) + "'");
}

namespace {

// Vertex ids by descending degree, ties by ascending id.
std::vector<VertexId> DegreeOrder(const CsrGraph& g) {
  std::vector<VertexId> order(g.vertex_count);
  std::iota(order.begin(), order.end(), VertexId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return g.degree(a) > g.degree(b); });
  return order;
}

Permutation FromOrder(const std::vector<VertexId>& order) {
  Permutation perm(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) perm[order[i]] = static_cast<VertexId>(i);
  return perm;
}

}  // namespace

Permutation Reorder(const CsrGraph& g, ReorderStrategy strategy) {
  const std::size_t n = g.vertex_count;
  switch (strategy) {
    case ReorderStrategy::kIdentity: {
      Permutation p(n);
      std::iota(p.begin(), p.end(), VertexId{0});
      return p;
    }
    case ReorderStrategy::kDegreeDesc:
      return FromOrder(DegreeOrder(g));
    case ReorderStrategy::kBfs: {
      if (n == 0) return {};
      const std::vector<VertexId> by_degree = DegreeOrder(g);
      std::vector<char> seen(n, 0);
      std::vector<VertexId> order;
      order.reserve(n);
      const VertexId root = by_degree.front();
      seen[root] = 1;
      order.push_back(root);
      for (std::size_t head = 0; head < order.size(); ++head) {
        for (VertexId w : g.row(order[head])) {
          if (!seen[w]) {
            seen[w] = 1;
            order.push_back(w);
          }
        }
      }
      for (VertexId v : by_degree) {
        if (!seen[v]) order.push_back(v);
      }
      return FromOrder(order);
    }
  }
  return {};
}

bool IsPermutation(const Permutation& perm) {
  std::vector<char> hit(perm.size(), 0);
  for (VertexId p : perm) {
    if (p >= perm.size() || hit[p]) return false;
    hit[p] = 1;
  }
  return true;
}

CsrGraph Relabel(const CsrGraph& g, const Permutation& perm) {
  if (perm.size() != g.vertex_count || !IsPermutation(perm)) {
    throw Error(ErrorCode::kInvalidArgument, "relabel needs a bijective permutation");
  }
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(g.edge_count());
  for (VertexId v = 0; v < g.vertex_count; ++v) {
    for (VertexId w : g.row(v)) edges.emplace_back(perm[v], perm[w]);
  }
  return BuildCsr(g.vertex_count, edges);
}

void PutVarint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t GetVarint(const std::uint8_t*& p, const std::uint8_t* end) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (p == end) throw Error(ErrorCode::kIo, "truncated varint");
    const std::uint8_t b = *p++;
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) return v;
  }
  throw Error(ErrorCode::kIo, "varint longer than 64 bits");
}

CompressedGraph Compress(const CsrGraph& g, const Permutation& perm) {
  const CsrGraph r = Relabel(g, perm);
  CompressedGraph cg;
  cg.vertex_count = r.vertex_count;
  cg.edge_count = r.edge_count();
  cg.permutation = perm;
  cg.index.resize(r.vertex_count + 1);
  cg.payload.reserve(r.edge_count() * 2);
  for (VertexId v = 0; v < r.vertex_count; ++v) {
    cg.index[v] = static_cast<std::uint32_t>(cg.payload.size());
    const auto row = r.row(v);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == 0) {
        PutVarint(cg.payload, ZigZag(static_cast<std::int64_t>(row[0]) - static_cast<std::int64_t>(v)));
      } else {
        PutVarint(cg.payload, row[i] - row[i - 1]);
      }
    }
    if (cg.payload.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::kOutOfRange, "compressed payload exceeds 4 GiB index range");
    }
  }
  cg.index[r.vertex_count] = static_cast<std::uint32_t>(cg.payload.size());
  return cg;
}

std::vector<VertexId> CompressedGraph::Neighbors(VertexId v) const {
  const std::uint8_t* p = payload.data() + index[v];
  const std::uint8_t* end = payload.data() + index[v + 1];
  std::vector<VertexId> out;
  std::int64_t prev = v;
  bool first = true;
  while (p < end) {
    const std::uint64_t raw = GetVarint(p, end);
    prev = first ? prev + UnZigZag(raw) : prev + static_cast<std::int64_t>(raw);
    first = false;
    out.push_back(static_cast<VertexId>(prev));
  }
  return out;
}

CsrGraph CompressedGraph::Decode() const {
  CsrGraph g;
  g.vertex_count = vertex_count;
  g.offsets.assign(vertex_count + 1, 0);
  g.neighbors.reserve(edge_count);
  for (VertexId v = 0; v < vertex_count; ++v) {
    for (VertexId w : Neighbors(v)) g.neighbors.push_back(w);
    g.offsets[v + 1] = g.neighbors.size();
  }
  return g;
}

std::vector<VertexId> DecodeNeighbors(const CompressedGraph& cg, VertexId v) {
  if (v >= cg.vertex_count) {
    throw Error(ErrorCode::kOutOfRange, "vertex " + std::to_string(v) + " out of range");
  }
  return cg.Neighbors(v);
}

CompressionReport MakeCompressionReport(const CompressedGraph& cg) {
  CompressionReport r;
  if (cg.vertex_count == 0 && cg.edge_count == 0) return r;
  r.raw_bytes = 4ULL * (cg.edge_count + cg.vertex_count + 1);
  r.compressed_bytes = cg.payload.size() + 4ULL * (cg.vertex_count + 1);
  r.ratio = static_cast<double>(r.raw_bytes) / static_cast<double>(r.compressed_bytes);
  return r;
}

double MeanNeighborGap(const CsrGraph& g) {
  double total = 0.0;
  for (VertexId v = 0; v < g.vertex_count; ++v) {
    std::int64_t prev = v;
    for (VertexId w : g.row(v)) {
      total += static_cast<double>(std::abs(static_cast<std::int64_t>(w) - prev));
      prev = w;
    }
  }
  return g.edge_count() == 0 ? 0.0 : total / static_cast<double>(g.edge_count());
}

namespace {

constexpr char kMagic[5] = {'A', 'M', 'L', 'G', '1'};

static_assert(std::endian::native == std::endian::little,
              "binary graph IO assumes a little-endian host");

template <typename T>
void WritePod(std::ofstream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(sizeof(T) * count));
}

template <typename T>
void ReadPod(std::ifstream& in, T* data, std::size_t count, const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(sizeof(T) * count));
  if (!in) throw Error(ErrorCode::kIo, path.string() + ": truncated graph file");
}

}  // namespace

void WriteCompressed(const std::filesystem::path& path, const CompressedGraph& cg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t n = cg.vertex_count, m = cg.edge_count;
  WritePod(out, &n, 1);
  WritePod(out, &m, 1);
  WritePod(out, cg.permutation.data(), cg.permutation.size());
  WritePod(out, cg.index.data(), cg.index.size());
  WritePod(out, cg.payload.data(), cg.payload.size());
  if (!out) throw Error(ErrorCode::kIo, "error writing " + path.string());
}

CompressedGraph ReadCompressed(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[5];
  ReadPod(in, magic, 5, path);
  if (std::memcmp(magic, kMagic, 5) != 0) {
    throw Error(ErrorCode::kIo, path.string() + ": not an AMLG1 graph");
  }
  std::uint64_t n = 0, m = 0;
  ReadPod(in, &n, 1, path);
  ReadPod(in, &m, 1, path);
  CompressedGraph cg;
  cg.vertex_count = n;
  cg.edge_count = m;
  cg.permutation.resize(n);
  cg.index.resize(n + 1);
  ReadPod(in, cg.permutation.data(), n, path);
  ReadPod(in, cg.index.data(), n + 1, path);
  cg.payload.resize(cg.index[n]);
  ReadPod(in, cg.payload.data(), cg.payload.size(), path);
  if (!IsPermutation(cg.permutation)) throw Error(ErrorCode::kIo, path.string() + ": bad permutation");
  for (std::size_t v = 0; v < n; ++v) {
    if (cg.index[v] > cg.index[v + 1]) throw Error(ErrorCode::kIo, path.string() + ": bad index");
  }
  return cg;
}

CsrGraph ReadEdgeCsv(const std::filesystem::path& path, std::size_t vertex_count) {
  csv::Reader r(path, "src,dst");
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<std::string_view> f;
  std::size_t n = vertex_count;
  while (r.Next(f, 2)) {
    const auto s = r.ToUint<VertexId>(f[0]);
    const auto d = r.ToUint<VertexId>(f[1]);
    edges.emplace_back(s, d);
    if (vertex_count == 0) n = std::max<std::size_t>(n, std::max(s, d) + std::size_t{1});
  }
  return BuildCsr(n, edges);
}

void WriteEdgeCsv(const std::filesystem::path& path, const CsrGraph& g) {
  csv::Writer w(path);
  w.Line("src,dst");
  for (VertexId v = 0; v < g.vertex_count; ++v) {
    for (VertexId u : g.row(v)) w.Row(v, u);
  }
  w.Close();
}

}  // namespace aml::gstore
