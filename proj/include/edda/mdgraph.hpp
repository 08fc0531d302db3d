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

// Multi-domain interaction data: per-domain bipartite graphs with compressed
// adjacency in both directions, a global node index over the union of all
// domains, and cross-domain anchor (overlap) queries.

#ifndef EDDA_MDGRAPH_HPP_
#define EDDA_MDGRAPH_HPP_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace edda {

using DomainId = std::uint32_t;

enum class NodeKind : std::uint8_t { kUser = 0, kItem = 1 };

const char* to_string(NodeKind kind);

// Users and items live in separate id spaces. The same (kind, id) in two
// domains is the same entity; that is what makes it an anchor.
struct NodeId {
  NodeKind kind = NodeKind::kUser;
  std::uint64_t id = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

inline NodeId user_node(std::uint64_t id) { return {NodeKind::kUser, id}; }
inline NodeId item_node(std::uint64_t id) { return {NodeKind::kItem, id}; }

std::string to_string(const NodeId& node);

struct Interaction {
  DomainId domain = 0;
  std::uint64_t user = 0;
  std::uint64_t item = 0;

  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

// Immutable bipartite graph of one domain.
//
// Local node indices put users first: users occupy [0, num_users()) sorted by
// id and items occupy [num_users(), num_nodes()) sorted by id. Edges are
// numbered in (user, item) order; both adjacency directions carry the edge id
// so edge masks apply symmetrically.
class DomainGraph {
 public:
  // Duplicated (user, item) pairs are collapsed. Throws DataError if `edges`
  // is empty.
  DomainGraph(DomainId domain,
              std::vector<std::pair<std::uint64_t, std::uint64_t>> edges);

  DomainId domain() const { return domain_; }
  std::size_t num_users() const { return users_.size(); }
  std::size_t num_items() const { return items_.size(); }
  std::size_t num_nodes() const { return users_.size() + items_.size(); }
  std::size_t num_edges() const { return edge_user_.size(); }

  std::span<const std::uint64_t> users() const { return users_; }
  std::span<const std::uint64_t> items() const { return items_; }

  NodeId node(std::uint32_t local) const;
  std::optional<std::uint32_t> local_index(const NodeId& node) const;
  bool contains(const NodeId& node) const { return local_index(node).has_value(); }
  bool is_user(std::uint32_t local) const { return local < users_.size(); }

  std::span<const std::uint32_t> neighbors(std::uint32_t local) const {
    return {adj_.data() + offsets_[local], adj_.data() + offsets_[local + 1]};
  }
  std::span<const std::uint32_t> incident_edges(std::uint32_t local) const {
    return {adj_edge_.data() + offsets_[local],
            adj_edge_.data() + offsets_[local + 1]};
  }
  std::uint32_t degree(std::uint32_t local) const {
    return offsets_[local + 1] - offsets_[local];
  }

  // Endpoints of edge `e` as local indices.
  std::uint32_t edge_user(std::uint32_t e) const { return edge_user_[e]; }
  std::uint32_t edge_item(std::uint32_t e) const { return edge_item_[e]; }

  bool has_edge(std::uint32_t user_local, std::uint32_t item_local) const;

  // All interactions of this domain in edge order.
  std::vector<Interaction> interactions() const;

 private:
  DomainId domain_;
  std::vector<std::uint64_t> users_;
  std::vector<std::uint64_t> items_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> adj_;
  std::vector<std::uint32_t> adj_edge_;
  std::vector<std::uint32_t> edge_user_;
  std::vector<std::uint32_t> edge_item_;
};

// The domain set with a global node index over the union of all domains.
// Global indices follow NodeId order (all users by id, then all items by id).
class MultiDomainDataset {
 public:
  // Domain i of `domains` must have domain() == i. Throws DataError otherwise
  // or when `domains` is empty.
  explicit MultiDomainDataset(std::vector<DomainGraph> domains);

  std::size_t num_domains() const { return domains_.size(); }
  const DomainGraph& domain(DomainId d) const { return domains_.at(d); }
  std::span<const DomainGraph> domains() const { return domains_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  const NodeId& node(std::size_t global) const { return nodes_[global]; }
  std::span<const NodeId> nodes() const { return nodes_; }
  std::optional<std::size_t> global_index(const NodeId& node) const;

  // Global index of each local node of domain `d`.
  std::span<const std::uint32_t> global_of(DomainId d) const {
    return global_of_.at(d);
  }

  std::size_t num_interactions() const;
  std::vector<Interaction> interactions() const;

 private:
  std::vector<DomainGraph> domains_;
  std::vector<NodeId> nodes_;
  std::vector<std::vector<std::uint32_t>> global_of_;
};

// Builds the dataset from raw records. Domain ids must be dense from 0 and
// every domain needs at least one interaction.
MultiDomainDataset ingest(std::span<const Interaction> records);

// Reads `domain<TAB>user<TAB>item[<TAB>...]` lines. '#' lines and blank lines
// are skipped. Throws IngestError with the 1-based line number.
std::vector<Interaction> parse_interactions(std::istream& in);
std::vector<Interaction> read_interaction_file(const std::string& path);
void write_interactions(std::ostream& out, std::span<const Interaction> records);

struct AnchorSet {
  std::pair<DomainId, DomainId> domain_pair;
  std::vector<NodeId> anchors;  // sorted by (kind, id)

  std::size_t size() const { return anchors.size(); }
  bool empty() const { return anchors.empty(); }
};

// Nodes present in both domains. The pair is stored with first < second.
AnchorSet anchors(const MultiDomainDataset& dataset, DomainId d, DomainId d_prime);

struct OverlapRatios {
  double pooled = 0.0;  // users and items together
  double users = 0.0;
  double items = 0.0;
};

// Jaccard-style overlap: |intersection| / |union| over users and items.
OverlapRatios overlap_ratios(const MultiDomainDataset& dataset, DomainId d,
                             DomainId d_prime);
double overlap_ratio(const MultiDomainDataset& dataset, DomainId d, DomainId d_prime);

}  // namespace edda

#endif  // EDDA_MDGRAPH_HPP_
