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
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "edda/error.hpp"
#include "oracles.hpp"

namespace edda {
namespace {

TEST(DomainGraphTest, MinimalDataset) {
  const std::vector<Interaction> records = {{0, 0, 0}};
  const auto ds = ingest(records);
  ASSERT_EQ(ds.num_domains(), 1u);
  EXPECT_EQ(ds.domain(0).num_users(), 1u);
  EXPECT_EQ(ds.domain(0).num_items(), 1u);
  EXPECT_EQ(ds.domain(0).num_edges(), 1u);
}

TEST(DomainGraphTest, DuplicatesCollapse) {
  const std::vector<Interaction> records = {{0, 0, 0}, {0, 0, 0}};
  EXPECT_EQ(ingest(records).domain(0).num_edges(), 1u);
}

TEST(DomainGraphTest, EmptyEdgeListThrows) {
  EXPECT_THROW(DomainGraph(0, {}), DataError);
}

TEST(DomainGraphTest, LocalLayoutUsersFirstSortedById) {
  const DomainGraph g(0, {{7, 30}, {2, 10}, {7, 10}});
  ASSERT_EQ(g.num_users(), 2u);
  ASSERT_EQ(g.num_items(), 2u);
  EXPECT_EQ(g.node(0), user_node(2));
  EXPECT_EQ(g.node(1), user_node(7));
  EXPECT_EQ(g.node(2), item_node(10));
  EXPECT_EQ(g.node(3), item_node(30));
  EXPECT_EQ(*g.local_index(item_node(30)), 3u);
  EXPECT_FALSE(g.contains(user_node(10)));
  EXPECT_TRUE(g.has_edge(1, 3));
  EXPECT_FALSE(g.has_edge(0, 3));
  EXPECT_EQ(g.degree(2), 2u);
}

TEST(DomainGraphTest, AdjacencyIsConsistentAndBipartite) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records = testing::random_records(rng, 1, 15, 12, 40);
    const auto ds = ingest(records);
    const auto& g = ds.domain(0);
    ASSERT_EQ(g.num_edges(), records.size());
    std::size_t user_deg = 0;
    std::size_t item_deg = 0;
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
      (g.is_user(v) ? user_deg : item_deg) += g.degree(v);
      ASSERT_EQ(g.neighbors(v).size(), g.degree(v));
      for (std::size_t k = 0; k < g.degree(v); ++k) {
        const std::uint32_t w = g.neighbors(v)[k];
        const std::uint32_t e = g.incident_edges(v)[k];
        ASSERT_NE(g.is_user(v), g.is_user(w));
        const auto nb = g.neighbors(w);
        ASSERT_NE(std::find(nb.begin(), nb.end(), v), nb.end());
        const std::uint32_t u = g.is_user(v) ? v : w;
        const std::uint32_t i = g.is_user(v) ? w : v;
        ASSERT_EQ(g.edge_user(e), u);
        ASSERT_EQ(g.edge_item(e), i);
      }
    }
    EXPECT_EQ(user_deg, g.num_edges());
    EXPECT_EQ(item_deg, g.num_edges());
    // Edge (u, i) present iff the record is.
    std::set<std::pair<std::uint64_t, std::uint64_t>> expected;
    for (const auto& r : records) expected.emplace(r.user, r.item);
    std::set<std::pair<std::uint64_t, std::uint64_t>> actual;
    for (const auto& r : g.interactions()) actual.emplace(r.user, r.item);
    EXPECT_EQ(actual, expected);
  }
}

TEST(DomainGraphTest, RelabelingPreservesDegreesAndAnchors) {
  std::mt19937_64 rng(11);
  const auto records = testing::random_records(rng, 2, 20, 15, 40);
  std::vector<std::uint64_t> user_perm(20);
  std::vector<std::uint64_t> item_perm(15);
  std::iota(user_perm.begin(), user_perm.end(), 100);
  std::iota(item_perm.begin(), item_perm.end(), 500);
  std::shuffle(user_perm.begin(), user_perm.end(), rng);
  std::shuffle(item_perm.begin(), item_perm.end(), rng);
  auto relabeled = records;
  for (auto& r : relabeled) {
    r.user = user_perm[r.user];
    r.item = item_perm[r.item];
  }
  const auto a = ingest(records);
  const auto b = ingest(relabeled);
  for (DomainId d = 0; d < 2; ++d) {
    std::multiset<std::uint32_t> da;
    std::multiset<std::uint32_t> db;
    for (std::uint32_t v = 0; v < a.domain(d).num_nodes(); ++v) da.insert(a.domain(d).degree(v));
    for (std::uint32_t v = 0; v < b.domain(d).num_nodes(); ++v) db.insert(b.domain(d).degree(v));
    EXPECT_EQ(da, db);
  }
  EXPECT_EQ(anchors(a, 0, 1).size(), anchors(b, 0, 1).size());
}

TEST(MultiDomainDatasetTest, GlobalIndexCoversUnion) {
  const std::vector<Interaction> records = {{0, 1, 5}, {1, 1, 6}, {1, 2, 5}};
  const auto ds = ingest(records);
  ASSERT_EQ(ds.num_nodes(), 4u);  // users 1, 2; items 5, 6
  EXPECT_EQ(ds.node(0), user_node(1));
  EXPECT_EQ(ds.node(3), item_node(6));
  EXPECT_EQ(ds.num_interactions(), 3u);
  for (DomainId d = 0; d < 2; ++d) {
    const auto& g = ds.domain(d);
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
      EXPECT_EQ(ds.node(ds.global_of(d)[v]), g.node(v));
    }
  }
}

TEST(MultiDomainDatasetTest, NonDenseDomainsRejected) {
  const std::vector<Interaction> records = {{0, 1, 5}, {2, 1, 6}};
  EXPECT_THROW(ingest(records), DataError);
  EXPECT_THROW(ingest(std::vector<Interaction>{}), DataError);
}

TEST(ParseTest, CommentsBlankLinesAndTrailingFields) {
  std::istringstream in("# header\n0\t1\t2\n\n1\t3\t4\textra\r\n");
  const auto records = parse_interactions(in);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0], (Interaction{0, 1, 2}));
  EXPECT_EQ(records[1], (Interaction{1, 3, 4}));
}

TEST(ParseTest, MalformedLineReportsLineNumber) {
  std::istringstream in("0\t1\t2\n# c\n0\tx\t2\n");
  try {
    parse_interactions(in);
    FAIL() << "expected IngestError";
  } catch (const IngestError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream missing("0\t1\n");
  EXPECT_THROW(parse_interactions(missing), IngestError);
  std::istringstream negative("0\t-1\t2\n");
  EXPECT_THROW(parse_interactions(negative), IngestError);
}

TEST(ParseTest, WriteReadRoundTrip) {
  std::mt19937_64 rng(3);
  const auto records = testing::random_records(rng, 3, 10, 10, 12);
  std::stringstream buf;
  write_interactions(buf, records);
  EXPECT_EQ(parse_interactions(buf), records);
}

TEST(AnchorTest, SharedUserIsAnchor) {
  const std::vector<Interaction> records = {{0, 0, 0}, {1, 0, 1}};
  const auto set = anchors(ingest(records), 0, 1);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.anchors[0], user_node(0));
}

TEST(AnchorTest, DisjointAndIdenticalDomains) {
  const std::vector<Interaction> disjoint = {{0, 0, 0}, {1, 1, 1}};
  EXPECT_TRUE(anchors(ingest(disjoint), 0, 1).empty());
  EXPECT_DOUBLE_EQ(overlap_ratio(ingest(disjoint), 0, 1), 0.0);
  const std::vector<Interaction> same = {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 1, 0}};
  EXPECT_EQ(anchors(ingest(same), 0, 1).size(), 3u);
  EXPECT_DOUBLE_EQ(overlap_ratio(ingest(same), 0, 1), 1.0);
}

TEST(AnchorTest, MatchesSetIntersectionAndIsSymmetric) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto records = testing::random_records(rng, 3, 12, 12, 15);
    const auto ds = ingest(records);
    for (DomainId d = 0; d < 3; ++d) {
      for (DomainId e = d + 1; e < 3; ++e) {
        std::set<NodeId> nd;
        for (std::uint32_t v = 0; v < ds.domain(d).num_nodes(); ++v) {
          nd.insert(ds.domain(d).node(v));
        }
        std::vector<NodeId> expected;
        for (std::uint32_t v = 0; v < ds.domain(e).num_nodes(); ++v) {
          if (nd.count(ds.domain(e).node(v))) expected.push_back(ds.domain(e).node(v));
        }
        std::sort(expected.begin(), expected.end());
        const auto forward = anchors(ds, d, e);
        const auto backward = anchors(ds, e, d);
        EXPECT_EQ(forward.anchors, expected);
        EXPECT_EQ(backward.anchors, forward.anchors);
        EXPECT_EQ(forward.domain_pair, std::make_pair(d, e));
      }
    }
  }
}

TEST(AnchorTest, SameDomainRejected) {
  const std::vector<Interaction> records = {{0, 0, 0}};
  EXPECT_THROW(anchors(ingest(records), 0, 0), InvalidArgument);
}

TEST(OverlapTest, HandComputedExample) {
  // Users {a, b} vs {b, c}; items {x} vs {y}: (1 + 0) / (3 + 2).
  const std::vector<Interaction> records = {
      {0, 1, 10}, {0, 2, 10}, {1, 2, 11}, {1, 3, 11}};
  const auto ds = ingest(records);
  EXPECT_NEAR(overlap_ratio(ds, 0, 1), 0.2, 1e-15);
  const auto r = overlap_ratios(ds, 0, 1);
  EXPECT_NEAR(r.users, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(r.items, 0.0);
}

}  // namespace
}  // namespace edda
