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

// Cross-domain node similarity from random walks.
//
// For a domain pair (d, d') the anchors are the nodes present in both. From
// every node we run fixed-length uniform random walks on its own domain graph
// and count how many walks end on each anchor. Two nodes from different
// domains are similar when their stop-count vectors point the same way
// (cosine similarity). Each node is then paired with its top-k most similar
// nodes of the same kind in the other domain.

#ifndef EDDA_WALKER_HPP_
#define EDDA_WALKER_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edda/mdgraph.hpp"

namespace edda {

struct WalkConfig {
  int walk_length = 4;
  int num_walks = 500;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct StopCountVector {
  NodeId source;
  std::pair<DomainId, DomainId> domain_pair;  // of the anchor set
  std::vector<std::uint32_t> counts;          // indexed by anchor order
};

// Terminal node (local index) of each of cfg.num_walks walks from `source`.
// The stream is seeded from (rng_seed, kind, id) of the source.
std::vector<std::uint32_t> walk_endpoints(const DomainGraph& graph, std::uint32_t source,
                                          const WalkConfig& cfg);

StopCountVector run_walks(const DomainGraph& graph, const NodeId& source,
                          const AnchorSet& anchors, const WalkConfig& cfg);

// Cosine similarity of two count vectors; 0 when either is all zero. Throws
// InvalidArgument if the vectors index different anchor sets.
double node_similarity(const StopCountVector& c_u, const StopCountVector& c_v);
double cosine_similarity(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

struct SimilarPair {
  NodeId u;  // node of the first domain
  NodeId v;  // node of the second domain
  double similarity = 0.0;

  friend bool operator==(const SimilarPair&, const SimilarPair&) = default;
};

// Top-k similar nodes of domain `domain_pair.second` for each node of
// `domain_pair.first`. The pair is ordered (not sorted).
struct SimilarPairSet {
  std::pair<DomainId, DomainId> domain_pair;
  std::vector<SimilarPair> pairs;

  friend bool operator==(const SimilarPairSet&, const SimilarPairSet&) = default;
};

// For every node u of d, the k nodes v of the same kind in d' with the
// largest s(u, v) > 0, ties by ascending id. Empty when d and d' share no
// anchors.
SimilarPairSet mine_pairs(const MultiDomainDataset& dataset, DomainId d, DomainId d_prime,
                          std::size_t k, const WalkConfig& cfg, int threads = 1);

// mine_pairs for every ordered domain pair, running the walks of each node
// only once. Output order: (0,1), (1,0), (0,2), (2,0), ...
std::vector<SimilarPairSet> mine_all_pairs(const MultiDomainDataset& dataset, std::size_t k,
                                           const WalkConfig& cfg, int threads = 1);

// Tab-separated `d, d', kind, u, v, similarity`, one pair per line.
void write_pairs(std::ostream& out, std::span<const SimilarPairSet> sets);
std::vector<SimilarPairSet> read_pairs(std::istream& in);

}  // namespace edda

#endif  // EDDA_WALKER_HPP_
