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

#include "edda/walker.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "edda/error.hpp"
#include "edda/parallel.hpp"

namespace edda {

void WalkConfig::validate() const {
  if (walk_length < 1) throw InvalidArgument("walk_length must be >= 1");
  if (num_walks < 1) throw InvalidArgument("num_walks must be >= 1");
}

std::vector<std::uint32_t> walk_endpoints(const DomainGraph& graph, std::uint32_t source,
                                          const WalkConfig& cfg) {
  cfg.validate();
  const NodeId node = graph.node(source);
  std::mt19937_64 rng(
      derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(node.kind), node.id));
  std::vector<std::uint32_t> ends(static_cast<std::size_t>(cfg.num_walks));
  for (auto& end : ends) {
    std::uint32_t cur = source;
    for (int step = 0; step < cfg.walk_length; ++step) {
      const auto nb = graph.neighbors(cur);
      std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
      cur = nb[pick(rng)];
    }
    end = cur;
  }
  return ends;
}

namespace {

// Sparse stop histogram: (anchor index, count), sorted by anchor index.
using SparseCounts = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

// anchor_of[local] = index into the anchor set, or -1.
std::vector<std::int64_t> anchor_positions(const DomainGraph& graph,
                                           const AnchorSet& anchors) {
  std::vector<std::int64_t> pos(graph.num_nodes(), -1);
  for (std::size_t a = 0; a < anchors.anchors.size(); ++a) {
    const auto local = graph.local_index(anchors.anchors[a]);
    if (!local) {
      throw InvalidArgument("anchor " + to_string(anchors.anchors[a]) +
                            " is not in domain " + std::to_string(graph.domain()));
    }
    pos[*local] = static_cast<std::int64_t>(a);
  }
  return pos;
}

SparseCounts restrict_to_anchors(std::span<const std::uint32_t> ends,
                                 const std::vector<std::int64_t>& anchor_of) {
  std::map<std::uint32_t, std::uint32_t> hist;
  for (const auto end : ends) {
    if (anchor_of[end] >= 0) ++hist[static_cast<std::uint32_t>(anchor_of[end])];
  }
  return SparseCounts(hist.begin(), hist.end());
}

std::uint64_t squared_norm(const SparseCounts& c) {
  std::uint64_t s = 0;
  for (const auto& [a, n] : c) s += std::uint64_t{n} * n;
  return s;
}

double cosine_from(std::uint64_t dot, std::uint64_t norm_a, std::uint64_t norm_b) {
  if (norm_a == 0 || norm_b == 0) return 0.0;
  const double s = static_cast<double>(dot) /
                   std::sqrt(static_cast<double>(norm_a) * static_cast<double>(norm_b));
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace

StopCountVector run_walks(const DomainGraph& graph, const NodeId& source,
                          const AnchorSet& anchors, const WalkConfig& cfg) {
  const auto local = graph.local_index(source);
  if (!local) {
    throw InvalidArgument("walk source " + to_string(source) + " is not in domain " +
                          std::to_string(graph.domain()));
  }
  const auto anchor_of = anchor_positions(graph, anchors);
  StopCountVector out{source, anchors.domain_pair,
                      std::vector<std::uint32_t>(anchors.size(), 0)};
  for (const auto end : walk_endpoints(graph, *local, cfg)) {
    if (anchor_of[end] >= 0) ++out.counts[static_cast<std::size_t>(anchor_of[end])];
  }
  return out;
}

double cosine_similarity(std::span<const std::uint32_t> a,
                         std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("stop-count vectors have different lengths");
  }
  std::uint64_t dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += std::uint64_t{a[k]} * b[k];
    na += std::uint64_t{a[k]} * a[k];
    nb += std::uint64_t{b[k]} * b[k];
  }
  return cosine_from(dot, na, nb);
}

double node_similarity(const StopCountVector& c_u, const StopCountVector& c_v) {
  if (c_u.domain_pair != c_v.domain_pair || c_u.counts.size() != c_v.counts.size()) {
    throw InvalidArgument("stop-count vectors index different anchor sets");
  }
  return cosine_similarity(c_u.counts, c_v.counts);
}

namespace {

// Walk endpoints of every node of one domain.
std::vector<std::vector<std::uint32_t>> all_endpoints(const DomainGraph& graph,
                                                      const WalkConfig& cfg, int threads) {
  std::vector<std::vector<std::uint32_t>> ends(graph.num_nodes());
  parallel_for(graph.num_nodes(), threads, [&](std::size_t v) {
    ends[v] = walk_endpoints(graph, static_cast<std::uint32_t>(v), cfg);
  });
  return ends;
}

SimilarPairSet mine_directed(const MultiDomainDataset& dataset, DomainId d, DomainId d2,
                             const AnchorSet& anchors,
                             const std::vector<std::vector<std::uint32_t>>& ends_d,
                             const std::vector<std::vector<std::uint32_t>>& ends_d2,
                             std::size_t k, int threads) {
  SimilarPairSet out{{d, d2}, {}};
  if (anchors.empty()) return out;
  const auto& g = dataset.domain(d);
  const auto& g2 = dataset.domain(d2);

  const auto anchor_of = anchor_positions(g, anchors);
  const auto anchor_of2 = anchor_positions(g2, anchors);
  std::vector<SparseCounts> cu(g.num_nodes()), cv(g2.num_nodes());
  std::vector<std::uint64_t> nu(g.num_nodes()), nv(g2.num_nodes());
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    cu[v] = restrict_to_anchors(ends_d[v], anchor_of);
    nu[v] = squared_norm(cu[v]);
  }
  for (std::size_t v = 0; v < g2.num_nodes(); ++v) {
    cv[v] = restrict_to_anchors(ends_d2[v], anchor_of2);
    nv[v] = squared_norm(cv[v]);
  }

  std::vector<std::vector<SimilarPair>> per_source(g.num_nodes());
  parallel_for(g.num_nodes(), threads, [&](std::size_t ui) {
    if (nu[ui] == 0) return;
    const auto u = static_cast<std::uint32_t>(ui);
    std::vector<std::uint32_t> dense(anchors.size(), 0);
    for (const auto& [a, n] : cu[u]) dense[a] = n;

    // Same-kind candidates only: a user's even-length walks never end on an
    // item, so cross-kind similarity is zero.
    const bool user = g.is_user(u);
    const std::uint32_t begin = user ? 0 : static_cast<std::uint32_t>(g2.num_users());
    const std::uint32_t end =
        user ? static_cast<std::uint32_t>(g2.num_users()) : static_cast<std::uint32_t>(g2.num_nodes());
    std::vector<std::pair<double, std::uint32_t>> best;  // (similarity, local in d2)
    const auto worse = [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    };
    for (std::uint32_t v = begin; v < end; ++v) {
      if (nv[v] == 0) continue;
      std::uint64_t dot = 0;
      for (const auto& [a, n] : cv[v]) dot += std::uint64_t{dense[a]} * n;
      if (dot == 0) continue;
      const double s = cosine_from(dot, nu[u], nv[v]);
      // Local order within a kind is id order, so ascending v breaks ties.
      if (best.size() < k) {
        best.emplace_back(s, v);
        std::push_heap(best.begin(), best.end(), worse);
      } else if (s > best.front().first) {
        std::pop_heap(best.begin(), best.end(), worse);
        best.back() = {s, v};
        std::push_heap(best.begin(), best.end(), worse);
      }
    }
    std::sort(best.begin(), best.end(), worse);
    for (const auto& [s, v] : best) per_source[u].push_back({g.node(u), g2.node(v), s});
  });
  for (auto& part : per_source) {
    out.pairs.insert(out.pairs.end(), part.begin(), part.end());
  }
  return out;
}

void check_mining_args(const MultiDomainDataset& dataset, DomainId d, DomainId d_prime,
                       std::size_t k, const WalkConfig& cfg) {
  if (d == d_prime) throw InvalidArgument("mine_pairs needs two distinct domains");
  if (d >= dataset.num_domains() || d_prime >= dataset.num_domains()) {
    throw InvalidArgument("domain id out of range");
  }
  if (k < 1) throw InvalidArgument("k must be >= 1");
  cfg.validate();
}

}  // namespace

SimilarPairSet mine_pairs(const MultiDomainDataset& dataset, DomainId d, DomainId d_prime,
                          std::size_t k, const WalkConfig& cfg, int threads) {
  check_mining_args(dataset, d, d_prime, k, cfg);
  const AnchorSet t = anchors(dataset, d, d_prime);
  if (t.empty()) return {{d, d_prime}, {}};
  const auto ends_d = all_endpoints(dataset.domain(d), cfg, threads);
  const auto ends_d2 = all_endpoints(dataset.domain(d_prime), cfg, threads);
  return mine_directed(dataset, d, d_prime, t, ends_d, ends_d2, k, threads);
}

std::vector<SimilarPairSet> mine_all_pairs(const MultiDomainDataset& dataset, std::size_t k,
                                           const WalkConfig& cfg, int threads) {
  std::vector<SimilarPairSet> out;
  if (dataset.num_domains() < 2) return out;
  check_mining_args(dataset, 0, 1, k, cfg);
  std::vector<std::vector<std::vector<std::uint32_t>>> ends(dataset.num_domains());
  for (DomainId hi = 1; hi < dataset.num_domains(); ++hi) {
    for (DomainId lo = 0; lo < hi; ++lo) {
      const AnchorSet t = anchors(dataset, lo, hi);
      if (t.empty()) {
        out.push_back({{lo, hi}, {}});
        out.push_back({{hi, lo}, {}});
        continue;
      }
      for (const DomainId d : {lo, hi}) {
        if (ends[d].empty()) ends[d] = all_endpoints(dataset.domain(d), cfg, threads);
      }
      out.push_back(mine_directed(dataset, lo, hi, t, ends[lo], ends[hi], k, threads));
      out.push_back(mine_directed(dataset, hi, lo, t, ends[hi], ends[lo], k, threads));
    }
  }
  return out;
}

void write_pairs(std::ostream& out, std::span<const SimilarPairSet> sets) {
  char buf[64];
  for (const auto& set : sets) {
    for (const auto& p : set.pairs) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), p.similarity);
      out << set.domain_pair.first << '\t' << set.domain_pair.second << '\t'
          << to_string(p.u.kind) << '\t' << p.u.id << '\t' << p.v.id << '\t'
          << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    }
  }
}

std::vector<SimilarPairSet> read_pairs(std::istream& in) {
  std::vector<SimilarPairSet> sets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    DomainId d = 0, d2 = 0;
    std::string kind;
    std::uint64_t u = 0, v = 0;
    double s = 0.0;
    if (!(fields >> d >> d2 >> kind >> u >> v >> s) || (kind != "user" && kind != "item")) {
      throw IngestError(line_no, "malformed pair line");
    }
    const NodeKind nk = kind == "user" ? NodeKind::kUser : NodeKind::kItem;
    if (sets.empty() || sets.back().domain_pair != std::pair{d, d2}) {
      sets.push_back({{d, d2}, {}});
    }
    sets.back().pairs.push_back({{nk, u}, {nk, v}, s});
  }
  return sets;
}

}  // namespace edda
