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

// Parameter-free graph encoders.
//
// One GRec layer on a domain graph computes, for every node v,
//
//   e_v <- alpha * e_v + (1 - alpha) * sum_{w in N(v)} e_w / sqrt(|N(v)| |N(w)|)
//
// which is the operator alpha*I + (1-alpha)*D^-1/2 A D^-1/2. The operator is
// linear and symmetric, so its adjoint (needed for gradients) is itself.
// Degrees are always taken from the full graph; an edge mask only removes
// terms from the sum.

#ifndef EDDA_ENCODERS_HPP_
#define EDDA_ENCODERS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "edda/mdgraph.hpp"

namespace edda {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GRecConfig {
  int num_layers = 2;
  double alpha = 0.1;

  void validate() const;
};

// One retain flag per edge of a DomainGraph (1 = keep).
using EdgeMask = std::vector<std::uint8_t>;

// Dense embedding rows keyed by node.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  // Throws InvalidArgument on duplicate nodes or a row-count mismatch.
  EmbeddingTable(std::vector<NodeId> nodes, Matrix values);

  static EmbeddingTable zeros(std::vector<NodeId> nodes, std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(values_.cols()); }
  std::size_t size() const { return nodes_.size(); }
  std::span<const NodeId> nodes() const { return nodes_; }
  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

  std::optional<std::size_t> row_of(const NodeId& node) const;
  // Throws DataError if `node` has no row.
  std::size_t require_row(const NodeId& node) const;

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.nodes_ == b.nodes_ && a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  std::vector<NodeId> nodes_;
  Matrix values_;
  std::vector<std::pair<NodeId, std::uint32_t>> index_;  // sorted by node
};

// Low-level propagation over local rows (row v = local node v of `graph`).
Matrix propagate(const DomainGraph& graph, const Matrix& x, const GRecConfig& cfg,
                 const EdgeMask* mask = nullptr, int threads = 1);

// Sum over domains of per-domain propagation of the same global input.
// Row g of `x` and of the result is global node g of `dataset`. `masks`, when
// given, holds one mask per domain.
Matrix inter_propagate(const MultiDomainDataset& dataset, const Matrix& x,
                       const GRecConfig& cfg,
                       const std::vector<EdgeMask>* masks = nullptr, int threads = 1);

// Layer-L embeddings of every node of `graph`, in local order. `table` may
// cover more nodes than the graph.
EmbeddingTable grec_propagate(const DomainGraph& graph, const EmbeddingTable& table,
                              const GRecConfig& cfg, const EdgeMask* mask = nullptr);

// Inter-domain encoder: for every node of the dataset, the sum of its last
// layer over all domains containing it, each computed from the same input.
EmbeddingTable inter_encode(const MultiDomainDataset& dataset,
                            const EmbeddingTable& inter_table, const GRecConfig& cfg,
                            const std::vector<EdgeMask>* masks = nullptr);

// Matrix factorization uses the raw embeddings.
EmbeddingTable mf_encode(const EmbeddingTable& table);

// Binary table format, little-endian:
//   "EDDA" | version u32 | dim u32 | count u64 | count x (kind u8, id u64, dim x f64)
inline constexpr std::uint32_t kTableFormatVersion = 1;

void write_table(std::ostream& out, const EmbeddingTable& table);
EmbeddingTable read_table(std::istream& in);
void write_table_file(const std::string& path, const EmbeddingTable& table);
EmbeddingTable read_table_file(const std::string& path);

// Dense matrices reuse the table format with kind byte 2 and the row index as
// the id.
void write_matrix_file(const std::string& path, const Matrix& m);
Matrix read_matrix_file(const std::string& path);

}  // namespace edda

#endif  // EDDA_ENCODERS_HPP_
