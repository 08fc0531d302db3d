// Copyright 2026 The EDDA Authors.
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

#include "edda/encoders.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "edda/error.hpp"
#include "edda/parallel.hpp"

namespace edda {

void GRecConfig::validate() const {
  if (num_layers < 0) throw InvalidArgument("GRec num_layers must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("GRec alpha must be in [0, 1]");
  }
}

EmbeddingTable::EmbeddingTable(std::vector<NodeId> nodes, Matrix values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.rows()) != nodes_.size()) {
    throw InvalidArgument("embedding table: row count does not match node count");
  }
  index_.reserve(nodes_.size());
  for (std::uint32_t r = 0; r < nodes_.size(); ++r) index_.emplace_back(nodes_[r], r);
  std::sort(index_.begin(), index_.end());
  for (std::size_t k = 1; k < index_.size(); ++k) {
    if (index_[k].first == index_[k - 1].first) {
      throw InvalidArgument("embedding table: duplicate node " +
                            to_string(index_[k].first));
    }
  }
}

EmbeddingTable EmbeddingTable::zeros(std::vector<NodeId> nodes, std::size_t dim) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(nodes.size()),
                          static_cast<Eigen::Index>(dim));
  return EmbeddingTable(std::move(nodes), std::move(m));
}

std::optional<std::size_t> EmbeddingTable::row_of(const NodeId& node) const {
  const auto it = std::lower_bound(
      index_.begin(), index_.end(), node,
      [](const auto& entry, const NodeId& key) { return entry.first < key; });
  if (it == index_.end() || it->first != node) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingTable::require_row(const NodeId& node) const {
  const auto r = row_of(node);
  if (!r) throw DataError("node " + to_string(node) + " missing from embedding table");
  return *r;
}

Matrix propagate(const DomainGraph& graph, const Matrix& x, const GRecConfig& cfg,
                 const EdgeMask* mask, int threads) {
  cfg.validate();
  if (static_cast<std::size_t>(x.rows()) != graph.num_nodes()) {
    throw InvalidArgument("propagate: input has " + std::to_string(x.rows()) +
                          " rows, graph has " + std::to_string(graph.num_nodes()) +
                          " nodes");
  }
  if (mask != nullptr && mask->size() != graph.num_edges()) {
    throw InvalidArgument("propagate: edge mask size does not match graph");
  }
  // Residual-only fixpoints are returned as exact copies.
  if (cfg.num_layers == 0 || cfg.alpha == 1.0) return x;

  const Eigen::Index dim = x.cols();
  const double keep = cfg.alpha;
  const double mix = 1.0 - cfg.alpha;
  Matrix cur = x;
  Matrix next(x.rows(), dim);
  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    parallel_for(graph.num_nodes(), threads, [&](std::size_t vi) {
      const auto v = static_cast<std::uint32_t>(vi);
      double* out = next.data() + vi * dim;
      const double* self = cur.data() + vi * dim;
      std::fill(out, out + dim, 0.0);
      const auto nb = graph.neighbors(v);
      const auto edges = graph.incident_edges(v);
      const double deg_v = graph.degree(v);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        if (mask != nullptr && !(*mask)[edges[k]]) continue;
        const double w = 1.0 / std::sqrt(deg_v * graph.degree(nb[k]));
        const double* src = cur.data() + static_cast<std::size_t>(nb[k]) * dim;
        for (Eigen::Index c = 0; c < dim; ++c) out[c] += w * src[c];
      }
      for (Eigen::Index c = 0; c < dim; ++c) out[c] = keep * self[c] + mix * out[c];
    });
    cur.swap(next);
  }
  return cur;
}

Matrix inter_propagate(const MultiDomainDataset& dataset, const Matrix& x,
                       const GRecConfig& cfg, const std::vector<EdgeMask>* masks,
                       int threads) {
  if (static_cast<std::size_t>(x.rows()) != dataset.num_nodes()) {
    throw InvalidArgument("inter_propagate: input does not cover all nodes");
  }
  if (masks != nullptr && masks->size() != dataset.num_domains()) {
    throw InvalidArgument("inter_propagate: need one edge mask per domain");
  }
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (DomainId d = 0; d < dataset.num_domains(); ++d) {
    const auto& g = dataset.domain(d);
    const auto map = dataset.global_of(d);
    Matrix local(static_cast<Eigen::Index>(g.num_nodes()), x.cols());
    for (std::size_t v = 0; v < map.size(); ++v) local.row(v) = x.row(map[v]);
    const Matrix prop =
        propagate(g, local, cfg, masks != nullptr ? &(*masks)[d] : nullptr, threads);
    for (std::size_t v = 0; v < map.size(); ++v) out.row(map[v]) += prop.row(v);
  }
  return out;
}

EmbeddingTable grec_propagate(const DomainGraph& graph, const EmbeddingTable& table,
                              const GRecConfig& cfg, const EdgeMask* mask) {
  std::vector<NodeId> nodes;
  nodes.reserve(graph.num_nodes());
  Matrix local(static_cast<Eigen::Index>(graph.num_nodes()),
               static_cast<Eigen::Index>(table.dim()));
  for (std::uint32_t v = 0; v < graph.num_nodes(); ++v) {
    nodes.push_back(graph.node(v));
    local.row(v) = table.values().row(table.require_row(nodes.back()));
  }
  return EmbeddingTable(std::move(nodes), propagate(graph, local, cfg, mask));
}

EmbeddingTable inter_encode(const MultiDomainDataset& dataset,
                            const EmbeddingTable& inter_table, const GRecConfig& cfg,
                            const std::vector<EdgeMask>* masks) {
  Matrix global(static_cast<Eigen::Index>(dataset.num_nodes()),
                static_cast<Eigen::Index>(inter_table.dim()));
  for (std::size_t g = 0; g < dataset.num_nodes(); ++g) {
    global.row(g) = inter_table.values().row(inter_table.require_row(dataset.node(g)));
  }
  std::vector<NodeId> nodes(dataset.nodes().begin(), dataset.nodes().end());
  return EmbeddingTable(std::move(nodes), inter_propagate(dataset, global, cfg, masks));
}

EmbeddingTable mf_encode(const EmbeddingTable& table) { return table; }

namespace {

constexpr char kMagic[4] = {'E', 'D', 'D', 'A'};
constexpr std::uint8_t kMatrixRowKind = 2;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  char bytes[sizeof(T)];
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    bytes[b] = static_cast<char>((value >> (8 * b)) & 0xff);
  }
  out.write(bytes, sizeof(T));
}

void put_f64(std::ostream& out, double value) {
  put_le(out, std::bit_cast<std::uint64_t>(value));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw DataError("embedding file truncated");
  }
  T value = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) value |= static_cast<T>(bytes[b]) << (8 * b);
  return value;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

void write_header(std::ostream& out, std::size_t dim, std::size_t count) {
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kTableFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  put_le<std::uint64_t>(out, count);
}

std::pair<std::uint32_t, std::uint64_t> read_header(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("not an embedding file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kTableFormatVersion) {
    throw DataError("unsupported embedding file version " + std::to_string(version));
  }
  const auto dim = get_le<std::uint32_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  return {dim, count};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  return in;
}

}  // namespace

void write_table(std::ostream& out, const EmbeddingTable& table) {
  write_header(out, table.dim(), table.size());
  const auto& v = table.values();
  for (std::size_t r = 0; r < table.size(); ++r) {
    const NodeId& node = table.nodes()[r];
    out.put(static_cast<char>(node.kind));
    put_le<std::uint64_t>(out, node.id);
    for (Eigen::Index c = 0; c < v.cols(); ++c) put_f64(out, v(r, c));
  }
}

EmbeddingTable read_table(std::istream& in) {
  const auto [dim, count] = read_header(in);
  std::vector<NodeId> nodes;
  nodes.reserve(count);
  Matrix values(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto kind = get_le<std::uint8_t>(in);
    if (kind > 1) throw DataError("embedding file: invalid node kind");
    nodes.push_back({static_cast<NodeKind>(kind), get_le<std::uint64_t>(in)});
    for (std::uint32_t c = 0; c < dim; ++c) values(r, c) = get_f64(in);
  }
  return EmbeddingTable(std::move(nodes), std::move(values));
}

void write_table_file(const std::string& path, const EmbeddingTable& table) {
  auto out = open_out(path);
  write_table(out, table);
  if (!out) throw IoError("write failed for '" + path + "'");
}

EmbeddingTable read_table_file(const std::string& path) {
  auto in = open_in(path);
  return read_table(in);
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  auto out = open_out(path);
  write_header(out, static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out.put(static_cast<char>(kMatrixRowKind));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(r));
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

Matrix read_matrix_file(const std::string& path) {
  auto in = open_in(path);
  const auto [dim, count] = read_header(in);
  Matrix m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (std::uint64_t r = 0; r < count; ++r) {
    if (get_le<std::uint8_t>(in) != kMatrixRowKind || get_le<std::uint64_t>(in) != r) {
      throw DataError("matrix file '" + path + "': bad row header");
    }
    for (std::uint32_t c = 0; c < dim; ++c) m(r, c) = get_f64(in);
  }
  return m;
}

}  // namespace edda
