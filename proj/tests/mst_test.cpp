#include <gtest/gtest.h>

#include <algorithm>

#include "lcs/mst.hpp"
#include "lcs/oracle.hpp"
#include "lcs/tree_routing.hpp"
#include "test_support.hpp"

namespace lcs {
namespace {

Instance weighted(Family family, std::uint32_t size, std::uint64_t seed) {
  InstanceSpec spec;
  spec.family = family;
  spec.size = size;
  spec.weights = WeightScheme::uniform_distinct;
  spec.seed = seed;
  return generate(spec);
}

void expect_consistent_outputs(const Graph& g, const MstResult& mst) {
  std::vector<char> chosen(g.edge_count(), 0);
  for (EdgeId e : mst.edges) chosen[e] = 1;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto inc = g.incident(v);
    for (std::size_t k = 0; k < inc.size(); ++k) EXPECT_EQ(mst.membership[v][k] != 0, chosen[inc[k].edge] != 0);
    EXPECT_EQ(mst.node_weight[v], mst.weight);
  }
}

TEST(Mst, Triangle) {
  const Graph g(3, {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}});
  const auto mst = boruvka_mst(g);
  ASSERT_TRUE(mst.success);
  EXPECT_EQ(mst.weight, 3);
  EXPECT_EQ(mst.edges, (std::vector<EdgeId>{0, 1}));
  expect_consistent_outputs(g, mst);
}

TEST(Mst, TreeInputIsItsOwnTree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    InstanceSpec spec;
    spec.family = Family::tree_plus_chords;
    spec.size = 25;
    spec.chords = 0;
    spec.weights = WeightScheme::uniform_distinct;
    spec.seed = seed;
    const Graph g = make_graph(spec);
    MstOptions options;
    options.seed = seed;
    const auto mst = boruvka_mst(g, 0, options);
    ASSERT_TRUE(mst.success);
    EXPECT_EQ(mst.edges.size(), g.edge_count());
  }
}

TEST(Mst, SingleNode) {
  const Graph g(1, {});
  const auto mst = boruvka_mst(g);
  EXPECT_TRUE(mst.success);
  EXPECT_EQ(mst.weight, 0);
  EXPECT_TRUE(mst.edges.empty());
}

TEST(Mst, MatchesKruskal) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto inst = seed % 2 ? weighted(Family::tree_plus_chords, 40, seed) : weighted(Family::grid, 6, seed);
    MstOptions options;
    options.seed = seed;
    const auto mst = boruvka_mst(inst.graph, 0, options);
    ASSERT_TRUE(mst.success) << "seed " << seed;
    const auto expect = oracle::kruskal(inst.graph);
    EXPECT_EQ(mst.edges, expect.edges);
    EXPECT_EQ(mst.weight, expect.weight);
    expect_consistent_outputs(inst.graph, mst);
    EXPECT_TRUE(testing::within_budget(mst.trace));
    // Fragment counts never grow and end at one.
    for (std::size_t i = 1; i < mst.per_phase.size(); ++i) {
      EXPECT_LE(mst.per_phase[i].parts, mst.per_phase[i - 1].parts);
    }
    EXPECT_EQ(mst.per_phase.back().parts, 1u);
  }
}

TEST(Mst, TiesNeedExplicitTieBreaking) {
  const auto inst = testing::grid_instance(4, 5, PartitionScheme::singletons, 1, 0);
  EXPECT_THROW(boruvka_mst(inst.graph), InvalidInput);
  MstOptions options;
  options.tie_break = true;
  const auto mst = boruvka_mst(inst.graph, 0, options);
  ASSERT_TRUE(mst.success);
  EXPECT_EQ(mst.edges, oracle::kruskal(inst.graph).edges);
}

TEST(Mst, RejectsUnrepresentableWeights) {
  EXPECT_THROW(boruvka_mst(Graph(2, {{0, 1, -1}})), InvalidInput);
  EXPECT_THROW(boruvka_mst(Graph(2, {{0, 1, Weight{1} << 40}})), InvalidInput);
  EXPECT_THROW(boruvka_mst(Graph(3, {{0, 1, 1}})), InvalidInput);
}

TEST(Mst, SameSeedSameRun) {
  const auto inst = weighted(Family::planar_triangulation, 30, 3);
  MstOptions options;
  options.seed = 11;
  options.run.log_messages = true;
  const auto a = boruvka_mst(inst.graph, 0, options);
  const auto b = boruvka_mst(inst.graph, 0, options);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.edges, b.edges);
}

// Centralized scan of the lightest edge leaving each part.
std::vector<std::optional<EdgeId>> scan_outgoing(const Graph& g, const Partition& parts) {
  std::vector<std::optional<EdgeId>> best(parts.part_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edge(e);
    const auto a = parts.part_of(edge.u);
    const auto b = parts.part_of(edge.v);
    if (a == b) continue;
    for (auto p : {a, b}) {
      if (!p) continue;
      auto& slot = best[*p];
      if (!slot || std::tie(edge.weight, edge.u, edge.v) <
                       std::tie(g.edge(*slot).weight, g.edge(*slot).u, g.edge(*slot).v)) {
        slot = e;
      }
    }
  }
  return best;
}

TEST(MinOutgoingEdge, EqualsCentralScan) {
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    const auto inst = testing::grid_instance(5 + seed % 3, 6, PartitionScheme::random_connected, 2 + seed % 6, seed,
                                             seed % 2 ? WeightScheme::uniform_distinct : WeightScheme::unit);
    const auto t = bfs_tree(inst.graph, 0);
    FindOptions find;
    find.seed = seed;
    const auto sc = find_shortcut_doubling(inst.graph, t, inst.partition, 1, 1, find);
    ASSERT_TRUE(sc.success);
    const auto q = measure_quality(inst.graph, inst.partition, sc.last.shortcut);
    const auto leaders = elect_leaders(inst.graph, t, inst.partition, sc.last.shortcut, q.shortcut_congestion,
                                       q.block_parameter);
    const bool ties = seed % 2 == 0;
    const auto out = min_outgoing_edge(inst.graph, t, inst.partition, sc.last.shortcut, q.shortcut_congestion,
                                       q.block_parameter, leaders.node_leader, ties);
    EXPECT_EQ(out.per_part, scan_outgoing(inst.graph, inst.partition));
    for (NodeId v = 0; v < inst.graph.node_count(); ++v) {
      if (out.endpoint_of[v]) {
        EXPECT_EQ(out.per_part[*inst.partition.part_of(v)], out.endpoint_of[v]);
      }
    }
  }
}

TEST(MinOutgoingEdge, TwoSingletonsPickTheirEdge) {
  const Graph g(2, {{0, 1, 5}});
  const auto t = bfs_tree(g, 0);
  const auto parts = Partition::singletons(2);
  const Shortcut none(t, 2);
  const auto leaders = elect_leaders(g, t, parts, none, 0, 1);
  const auto out = min_outgoing_edge(g, t, parts, none, 0, 1, leaders.node_leader);
  EXPECT_EQ(out.per_part[0], EdgeId{0});
  EXPECT_EQ(out.per_part[1], EdgeId{0});
  const Partition whole(2, {{0, 1}});
  const Shortcut none1(t, 1);
  const auto l1 = elect_leaders(g, t, whole, none1, 0, 2);
  const auto done = min_outgoing_edge(g, t, whole, none1, 0, 2, l1.node_leader);
  EXPECT_FALSE(done.per_part[0].has_value());
  EXPECT_FALSE(done.node_has_edge[0]);
}

}  // namespace
}  // namespace lcs
