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

#include "edda/mdgraph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

#include "edda/error.hpp"

namespace edda {

const char* to_string(NodeKind kind) {
  return kind == NodeKind::kUser ? "user" : "item";
}

std::string to_string(const NodeId& node) {
  return std::string(node.kind == NodeKind::kUser ? "u" : "i") +
         std::to_string(node.id);
}

DomainGraph::DomainGraph(
    DomainId domain, std::vector<std::pair<std::uint64_t, std::uint64_t>> edges)
    : domain_(domain) {
  if (edges.empty()) {
    throw DataError("domain " + std::to_string(domain) + " has no interactions");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (edges.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError("too many edges in domain " + std::to_string(domain));
  }

  for (const auto& [u, i] : edges) {
    if (users_.empty() || users_.back() != u) users_.push_back(u);
    items_.push_back(i);
  }
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());

  const auto nu = static_cast<std::uint32_t>(users_.size());
  const std::size_t n = num_nodes();
  edge_user_.reserve(edges.size());
  edge_item_.reserve(edges.size());
  std::vector<std::uint32_t> degree(n, 0);
  std::uint32_t user_local = 0;
  for (const auto& [u, i] : edges) {
    while (users_[user_local] != u) ++user_local;
    const auto item_local = static_cast<std::uint32_t>(
        nu + (std::lower_bound(items_.begin(), items_.end(), i) - items_.begin()));
    edge_user_.push_back(user_local);
    edge_item_.push_back(item_local);
    ++degree[user_local];
    ++degree[item_local];
  }

  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adj_.resize(offsets_[n]);
  adj_edge_.resize(offsets_[n]);
  std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Edge order is (user, item), so both directions come out sorted by the
  // neighbor's local index.
  for (std::uint32_t e = 0; e < edge_user_.size(); ++e) {
    const std::uint32_t u = edge_user_[e];
    const std::uint32_t i = edge_item_[e];
    adj_[cursor[u]] = i;
    adj_edge_[cursor[u]++] = e;
    adj_[cursor[i]] = u;
    adj_edge_[cursor[i]++] = e;
  }
}

NodeId DomainGraph::node(std::uint32_t local) const {
  if (local < users_.size()) return user_node(users_[local]);
  return item_node(items_.at(local - users_.size()));
}

std::optional<std::uint32_t> DomainGraph::local_index(const NodeId& node) const {
  const auto& ids = node.kind == NodeKind::kUser ? users_ : items_;
  const auto it = std::lower_bound(ids.begin(), ids.end(), node.id);
  if (it == ids.end() || *it != node.id) return std::nullopt;
  auto local = static_cast<std::uint32_t>(it - ids.begin());
  if (node.kind == NodeKind::kItem) local += static_cast<std::uint32_t>(users_.size());
  return local;
}

bool DomainGraph::has_edge(std::uint32_t user_local, std::uint32_t item_local) const {
  const auto nb = neighbors(user_local);
  return std::binary_search(nb.begin(), nb.end(), item_local);
}

std::vector<Interaction> DomainGraph::interactions() const {
  std::vector<Interaction> out;
  out.reserve(num_edges());
  const std::size_t nu = users_.size();
  for (std::size_t e = 0; e < edge_user_.size(); ++e) {
    out.push_back({domain_, users_[edge_user_[e]], items_[edge_item_[e] - nu]});
  }
  return out;
}

MultiDomainDataset::MultiDomainDataset(std::vector<DomainGraph> domains)
    : domains_(std::move(domains)) {
  if (domains_.empty()) throw DataError("dataset has no domains");
  for (std::size_t d = 0; d < domains_.size(); ++d) {
    if (domains_[d].domain() != d) {
      throw DataError("domain ids must be dense from 0");
    }
    for (std::uint32_t v = 0; v < domains_[d].num_nodes(); ++v) {
      nodes_.push_back(domains_[d].node(v));
    }
  }
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());

  global_of_.resize(domains_.size());
  for (std::size_t d = 0; d < domains_.size(); ++d) {
    const auto& g = domains_[d];
    auto& map = global_of_[d];
    map.resize(g.num_nodes());
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
      map[v] = static_cast<std::uint32_t>(*global_index(g.node(v)));
    }
  }
}

std::optional<std::size_t> MultiDomainDataset::global_index(const NodeId& node) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t MultiDomainDataset::num_interactions() const {
  std::size_t total = 0;
  for (const auto& g : domains_) total += g.num_edges();
  return total;
}

std::vector<Interaction> MultiDomainDataset::interactions() const {
  std::vector<Interaction> out;
  out.reserve(num_interactions());
  for (const auto& g : domains_) {
    auto part = g.interactions();
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

MultiDomainDataset ingest(std::span<const Interaction> records) {
  DomainId max_domain = 0;
  for (const auto& r : records) max_domain = std::max(max_domain, r.domain);
  if (records.empty()) throw DataError("no interaction records");

  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> edges(
      static_cast<std::size_t>(max_domain) + 1);
  for (const auto& r : records) edges[r.domain].emplace_back(r.user, r.item);

  std::vector<DomainGraph> graphs;
  graphs.reserve(edges.size());
  for (DomainId d = 0; d < edges.size(); ++d) {
    if (edges[d].empty()) {
      throw DataError("domain " + std::to_string(d) +
                      " has no interactions (domain ids must be dense from 0)");
    }
    graphs.emplace_back(d, std::move(edges[d]));
  }
  return MultiDomainDataset(std::move(graphs));
}

namespace {

template <typename T>
T parse_field(std::string_view field, std::size_t line, const char* name) {
  T value{};
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw IngestError(line, std::string("invalid ") + name + " '" +
                                std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<Interaction> parse_interactions(std::istream& in) {
  std::vector<Interaction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    const auto first = view.find_first_not_of(" \t");
    if (first == std::string_view::npos || view[first] == '#') continue;

    std::string_view fields[3];
    std::size_t pos = 0;
    for (int f = 0; f < 3; ++f) {
      const auto tab = view.find('\t', pos);
      if (tab == std::string_view::npos && f < 2) {
        throw IngestError(line_no, "expected 3 tab-separated fields");
      }
      fields[f] = view.substr(pos, tab == std::string_view::npos ? view.npos : tab - pos);
      pos = tab == std::string_view::npos ? view.size() : tab + 1;
    }
    out.push_back({parse_field<DomainId>(fields[0], line_no, "domain id"),
                   parse_field<std::uint64_t>(fields[1], line_no, "user id"),
                   parse_field<std::uint64_t>(fields[2], line_no, "item id")});
  }
  return out;
}

std::vector<Interaction> read_interaction_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open interaction file '" + path + "'");
  return parse_interactions(in);
}

void write_interactions(std::ostream& out, std::span<const Interaction> records) {
  for (const auto& r : records) {
    out << r.domain << '\t' << r.user << '\t' << r.item << '\n';
  }
}

namespace {

template <typename Fn>
void for_each_common(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                     Fn&& fn) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      fn(a[i]);
      ++i;
      ++j;
    }
  }
}

std::size_t count_common(std::span<const std::uint64_t> a,
                         std::span<const std::uint64_t> b) {
  std::size_t n = 0;
  for_each_common(a, b, [&](std::uint64_t) { ++n; });
  return n;
}

void check_pair(const MultiDomainDataset& dataset, DomainId d, DomainId d_prime) {
  if (d == d_prime) throw InvalidArgument("domain pair must be two distinct domains");
  if (d >= dataset.num_domains() || d_prime >= dataset.num_domains()) {
    throw InvalidArgument("domain id out of range");
  }
}

}  // namespace

AnchorSet anchors(const MultiDomainDataset& dataset, DomainId d, DomainId d_prime) {
  check_pair(dataset, d, d_prime);
  const auto lo = std::min(d, d_prime);
  const auto hi = std::max(d, d_prime);
  AnchorSet out{{lo, hi}, {}};
  const auto& a = dataset.domain(lo);
  const auto& b = dataset.domain(hi);
  for_each_common(a.users(), b.users(),
                  [&](std::uint64_t id) { out.anchors.push_back(user_node(id)); });
  for_each_common(a.items(), b.items(),
                  [&](std::uint64_t id) { out.anchors.push_back(item_node(id)); });
  return out;
}

OverlapRatios overlap_ratios(const MultiDomainDataset& dataset, DomainId d,
                             DomainId d_prime) {
  check_pair(dataset, d, d_prime);
  const auto& a = dataset.domain(d);
  const auto& b = dataset.domain(d_prime);
  const std::size_t common_u = count_common(a.users(), b.users());
  const std::size_t common_i = count_common(a.items(), b.items());
  const std::size_t union_u = a.num_users() + b.num_users() - common_u;
  const std::size_t union_i = a.num_items() + b.num_items() - common_i;
  OverlapRatios r;
  r.users = static_cast<double>(common_u) / static_cast<double>(union_u);
  r.items = static_cast<double>(common_i) / static_cast<double>(union_i);
  r.pooled = static_cast<double>(common_u + common_i) /
             static_cast<double>(union_u + union_i);
  return r;
}

double overlap_ratio(const MultiDomainDataset& dataset, DomainId d, DomainId d_prime) {
  return overlap_ratios(dataset, d, d_prime).pooled;
}

}  // namespace edda
