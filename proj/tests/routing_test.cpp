#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "lcs/oracle.hpp"
#include "lcs/rng.hpp"
#include "lcs/tree_routing.hpp"
#include "test_support.hpp"

namespace lcs {
namespace {

using testing::path_graph;

using testing::random_family;

std::vector<NodeId> nodes_of(const RootedTree& tree, const Subtree& st) {
  std::vector<NodeId> out{st.root};
  for (NodeId child : st.edges) out.push_back(child);
  (void)tree;
  return out;
}

std::uint64_t node_value(std::size_t subtree, NodeId v) { return (v * 31 + subtree * 7) % 97; }

TEST(MultiConvergecast, WholeTreeCountsNodes) {
  const auto inst = testing::grid_instance(5, 5, PartitionScheme::singletons, 1, 0);
  const auto t = bfs_tree(inst.graph, 0);
  SubtreeFamily family;
  Subtree whole{0, 0, {}};
  for (NodeId v = 1; v < 25; ++v) whole.edges.push_back(v);
  family.subtrees.push_back(whole);
  const auto out = multi_convergecast(inst.graph, t, family, 1, [](std::size_t, NodeId) { return 1; },
                                      Aggregate::sum);
  EXPECT_EQ(out.at_root[0], 25u);
  EXPECT_LE(out.trace.rounds_elapsed, t.max_depth() + 1);
}

TEST(MultiConvergecast, SharedEdgeCarriesEveryPath) {
  const std::uint32_t c = 5;
  const Graph g = path_graph(c + 1);
  const auto t = bfs_tree(g, 0);
  SubtreeFamily family;
  for (std::uint32_t s = 0; s < c; ++s) {
    Subtree st{s, 0, {}};
    for (NodeId v = 1; v <= s + 1; ++v) st.edges.push_back(v);
    family.subtrees.push_back(st);
  }
  EXPECT_EQ(family_load(t, family), c);
  const auto out = multi_convergecast(g, t, family, c, [](std::size_t, NodeId v) { return v; }, Aggregate::max,
                                      testing::logged());
  for (std::uint32_t s = 0; s < c; ++s) EXPECT_EQ(out.at_root[s], s + 1);
  const auto across_top = std::count_if(out.crossings.begin(), out.crossings.end(),
                                        [](const Crossing& x) { return x.node == 1; });
  EXPECT_EQ(across_top, static_cast<long>(c));
  EXPECT_LE(out.trace.rounds_elapsed, t.max_depth() + c);
}

TEST(MultiConvergecast, EmptyFamilyTakesNoRounds) {
  const Graph g = path_graph(4);
  const auto t = bfs_tree(g, 0);
  const auto out = multi_convergecast(g, t, {}, 0, [](std::size_t, NodeId) { return 1; }, Aggregate::sum);
  EXPECT_EQ(out.trace.rounds_elapsed, 0u);
  const auto down = multi_broadcast(g, t, {}, 0, {});
  EXPECT_EQ(down.trace.rounds_elapsed, 0u);
}

TEST(MultiBroadcast, DisjointSubtreesRunInParallel) {
  const Graph g = testing::star_graph(5);
  const auto t = bfs_tree(g, 0);
  SubtreeFamily family;
  family.subtrees.push_back({0, 0, {1, 2}});
  family.subtrees.push_back({1, 0, {3, 4}});
  const std::vector<std::optional<std::uint64_t>> msgs{11, 22};
  const auto out = multi_broadcast(g, t, family, 1, msgs);
  EXPECT_LE(out.trace.rounds_elapsed, t.max_depth());
  for (std::size_t s = 0; s < 2; ++s) {
    EXPECT_EQ(out.delivered[s].size(), 3u);
    for (const auto& [node, m] : out.delivered[s]) EXPECT_EQ(m, msgs[s]);
  }
}

TEST(Family, ValidationRejectsMalformedSubtrees) {
  const Graph g = path_graph(5);
  const auto t = bfs_tree(g, 0);
  auto reject = [&](SubtreeFamily f, std::uint32_t load) { EXPECT_THROW(validate_family(t, f, load), InvalidInput); };
  reject({{{0, 2, {2}}}}, 1);            // edge above the root
  reject({{{0, 0, {1, 3}}}}, 1);         // disconnected
  reject({{{0, 0, {1, 1}}}}, 1);         // repeated edge
  reject({{{0, 9, {}}}}, 1);             // root out of range
  reject({{{0, 0, {1}}, {0, 1, {2}}}}, 2);  // labels collide at node 1
  reject({{{0, 0, {1}}, {1, 0, {1}}}}, 1);  // load 2 over declared 1
  EXPECT_NO_THROW(validate_family(t, {{{0, 0, {1}}, {1, 0, {1}}}}, 2));
}

// The scheduling invariant: the i-th priority message over v's parent edge
// is across by round h_v + i, and the whole run fits in D + c rounds.
TEST(MultiConvergecast, RandomFamiliesMeetTheSchedule) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = testing::grid_instance(3 + seed % 6, 4 + seed % 5, PartitionScheme::singletons, 1, seed);
    const auto t = bfs_tree(inst.graph, 0);
    Rng rng(seed);
    const auto family = random_family(t, 1 + seed % 12, 12, rng);
    const auto c = family_load(t, family);
    const auto out = multi_convergecast(inst.graph, t, family, c, node_value, Aggregate::sum);
    EXPECT_LE(out.trace.rounds_elapsed, t.max_depth() + c) << "seed " << seed;
    for (const auto& x : out.crossings) {
      EXPECT_LE(x.sent + 1, t.height(x.node) + x.priority) << "seed " << seed << " node " << x.node;
      EXPECT_LE(x.priority, c);
    }
    for (std::size_t s = 0; s < family.subtrees.size(); ++s) {
      std::uint64_t expect = 0;
      for (NodeId v : nodes_of(t, family.subtrees[s])) expect += node_value(s, v);
      EXPECT_EQ(out.at_root[s], expect);
    }
    std::vector<std::optional<std::uint64_t>> msgs;
    for (std::size_t s = 0; s < family.subtrees.size(); ++s) msgs.push_back(s * 3 + 1);
    const auto down = multi_broadcast(inst.graph, t, family, c, msgs);
    EXPECT_LE(down.trace.rounds_elapsed, t.max_depth() + c);
    for (std::size_t s = 0; s < family.subtrees.size(); ++s) {
      EXPECT_EQ(down.delivered[s].size(), family.subtrees[s].edges.size() + 1);
      for (const auto& [node, m] : down.delivered[s]) EXPECT_EQ(m, msgs[s]);
    }
  }
}

struct PartFixture {
  Instance inst;
  RootedTree tree;
  Shortcut shortcut;
  QualityReport quality;
};

// Random partition with a random shortcut, so parts have several blocks.
PartFixture random_parts(std::uint64_t seed, double density) {
  PartFixture f;
  f.inst = testing::grid_instance(4 + seed % 5, 5 + seed % 3, PartitionScheme::random_connected, 1 + seed % 7, seed);
  f.tree = bfs_tree(f.inst.graph, 0);
  Rng rng(seed * 13 + 5);
  f.shortcut = testing::rootward_shortcut(f.tree, f.inst.partition, density, rng);
  return f;
}

TEST(PartRouting, LeadersAggregatesAndBroadcasts) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto f = random_parts(seed, 0.6);
    f.quality = measure_quality(f.inst.graph, f.inst.partition, f.shortcut);
    const auto& g = f.inst.graph;
    const auto& parts = f.inst.partition;
    const std::uint32_t c = f.quality.shortcut_congestion;
    const std::uint32_t b = f.quality.block_parameter;
    const Round unit = Round{b} * (f.tree.max_depth() + c + 1);

    const auto leaders = elect_leaders(g, f.tree, parts, f.shortcut, c, b);
    EXPECT_LE(leaders.trace.rounds_elapsed, kLeaderElectionRoundFactor * unit);
    for (PartId p = 0; p < parts.part_count(); ++p) {
      const auto m = parts.members(p);
      const NodeId smallest = *std::min_element(m.begin(), m.end());
      EXPECT_EQ(leaders.leader_of_part[p], smallest);
      for (NodeId v : m) EXPECT_EQ(leaders.node_leader[v], smallest) << "seed " << seed;
    }

    std::vector<std::optional<std::uint64_t>> ones(g.node_count(), 1);
    const auto count = part_convergecast(g, f.tree, parts, f.shortcut, c, b, leaders.node_leader, ones,
                                         Aggregate::sum);
    EXPECT_LE(count.trace.rounds_elapsed, kPartConvergecastRoundFactor * unit);
    std::vector<std::optional<std::uint64_t>> ids(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) ids[v] = (v * 37) % 53;
    const auto biggest = part_convergecast(g, f.tree, parts, f.shortcut, c, b, leaders.node_leader, ids,
                                           Aggregate::max);
    for (PartId p = 0; p < parts.part_count(); ++p) {
      EXPECT_EQ(count.at_leader[p], parts.members(p).size());
      std::uint64_t expect = 0;
      for (NodeId v : parts.members(p)) expect = std::max(expect, *ids[v]);
      EXPECT_EQ(biggest.at_leader[p], expect);
    }

    std::vector<std::optional<std::uint64_t>> msgs;
    for (PartId p = 0; p < parts.part_count(); ++p) msgs.push_back(leaders.leader_of_part[p]);
    const auto down = part_broadcast(g, f.tree, parts, f.shortcut, c, b, leaders.node_leader, msgs);
    EXPECT_LE(down.trace.rounds_elapsed, kPartBroadcastRoundFactor * unit);
    for (NodeId v = 0; v < g.node_count(); ++v) EXPECT_EQ(down.at_node[v], leaders.node_leader[v]);
    EXPECT_TRUE(testing::within_budget(leaders.trace));
  }
}

TEST(PartRouting, SingleNodePartLeadsItself) {
  const Graph g = path_graph(3);
  const auto t = bfs_tree(g, 0);
  const auto parts = Partition::singletons(3);
  const auto leaders = elect_leaders(g, t, parts, Shortcut(t, 3), 0, 1);
  EXPECT_EQ(leaders.leader_of_part, (std::vector<NodeId>{0, 1, 2}));
}

TEST(PartRouting, MinimumIdReachesTheLeaderOfTheWholeGraph) {
  const auto inst = testing::grid_instance(4, 4, PartitionScheme::singletons, 1, 0);
  const auto t = bfs_tree(inst.graph, 0);
  std::vector<NodeId> all(16);
  for (NodeId v = 0; v < 16; ++v) all[v] = v;
  const Partition whole(16, {all});
  const Shortcut none(t, 1);
  const auto leaders = elect_leaders(inst.graph, t, whole, none, 0, 16);
  std::vector<std::optional<std::uint64_t>> ids(16);
  for (NodeId v = 0; v < 16; ++v) ids[v] = 15 - v;
  const auto out = part_convergecast(inst.graph, t, whole, none, 0, 16, leaders.node_leader, ids, Aggregate::min);
  EXPECT_EQ(leaders.leader_of_part[0], 0u);
  EXPECT_EQ(out.at_leader[0], 0u);
}

TEST(BlockCounting, SmallExamples) {
  const Graph g = path_graph(5);
  const auto t = bfs_tree(g, 0);
  const Partition whole(5, {{0, 1, 2, 3, 4}});
  Shortcut full(t, 1);
  for (NodeId v = 1; v < 5; ++v) full.add_tree_edge(0, v);
  EXPECT_TRUE(count_blocks_distributed(g, t, whole, full, 1, 1).good[0]);
  EXPECT_FALSE(count_blocks_distributed(g, t, whole, Shortcut(t, 1), 0, 3).good[0]);
  EXPECT_TRUE(count_blocks_distributed(g, t, whole, Shortcut(t, 1), 0, 5).good[0]);
  EXPECT_THROW(count_blocks_distributed(g, t, whole, full, 1, 0), InvalidInput);
}

TEST(BlockCounting, MatchesIndependentLabeling) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto f = random_parts(seed, 0.4 + 0.1 * (seed % 4));
    const auto& parts = f.inst.partition;
    const auto quality = measure_quality(f.inst.graph, parts, f.shortcut);
    const std::uint32_t c = quality.shortcut_congestion;
    for (std::uint32_t limit : {1u, 2u, 3u, 5u, quality.block_parameter}) {
      const auto out = count_blocks_distributed(f.inst.graph, f.tree, parts, f.shortcut, c, limit);
      EXPECT_LE(out.trace.rounds_elapsed,
                kBlockCountRoundFactor * Round{limit} * (f.tree.max_depth() + c + 1));
      for (PartId p = 0; p < parts.part_count(); ++p) {
        const bool expect = oracle::count_blocks(f.tree, parts, f.shortcut, p) <= limit;
        EXPECT_EQ(out.good[p] != 0, expect) << "seed " << seed << " part " << p << " limit " << limit;
        for (NodeId v : parts.members(p)) EXPECT_EQ(out.node_good[v] != 0, expect);
      }
    }
  }
}

TEST(BlockCounting, InertPartsAreSkipped) {
  const auto f = random_parts(3, 0.5);
  const auto& parts = f.inst.partition;
  std::vector<char> active(parts.part_count(), 0);
  active[0] = 1;
  const auto quality = measure_quality(f.inst.graph, parts, f.shortcut);
  const auto out = count_blocks_distributed(f.inst.graph, f.tree, parts, f.shortcut, quality.shortcut_congestion,
                                            quality.block_parameter, active);
  EXPECT_TRUE(out.good[0]);
  for (PartId p = 1; p < parts.part_count(); ++p) EXPECT_FALSE(out.good[p]);
}

}  // namespace
}  // namespace lcs
