#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "lcs/protocols.hpp"
#include "test_support.hpp"

namespace lcs {
namespace {

using testing::path_graph;

TEST(GraphCore, PathTreeIsForced) {
  const Graph g = path_graph(4);
  const auto t = bfs_tree(g, 0);
  EXPECT_EQ(t.parent(1), 0u);
  EXPECT_EQ(t.parent(2), 1u);
  EXPECT_EQ(t.parent(3), 2u);
  EXPECT_EQ(t.max_depth(), 3u);
}

TEST(GraphCore, StarLeavesHaveHeightZero) {
  const auto t = bfs_tree(testing::star_graph(5), 0);
  EXPECT_EQ(t.max_depth(), 1u);
  for (NodeId v = 1; v < 5; ++v) EXPECT_EQ(t.height(v), 0u);
}

TEST(GraphCore, GridCornerDepth) {
  const auto inst = testing::grid_instance(3, 3, PartitionScheme::singletons, 1, 0);
  const auto t = bfs_tree(inst.graph, 0);
  const auto dist = bfs_distances(inst.graph, 0);
  EXPECT_EQ(t.max_depth(), *std::max_element(dist.begin(), dist.end()));
  EXPECT_EQ(t.max_depth(), 4u);
}

TEST(GraphCore, PartitionValidation) {
  const Graph g = path_graph(3);
  EXPECT_TRUE(validate_partition(g, Partition::singletons(3)).valid);
  const auto split = validate_partition(g, Partition(3, {{0, 2}}));
  EXPECT_FALSE(split.valid);
  EXPECT_EQ(split.disconnected_parts, std::vector<PartId>{0});
  const auto rows = testing::grid_instance(3, 3, PartitionScheme::rows, 0, 0);
  EXPECT_TRUE(validate_partition(rows.graph, rows.partition).valid);
  EXPECT_EQ(rows.partition.part_count(), 3u);
}

TEST(GraphCore, RejectsMalformedGraphs) {
  EXPECT_THROW(Graph(0, {}), InvalidInput);
  EXPECT_THROW(Graph(2, {{0, 0, 1}}), InvalidInput);
  EXPECT_THROW(Graph(2, {{0, 1, 1}, {1, 0, 2}}), InvalidInput);
  EXPECT_THROW(Graph(2, {{0, 2, 1}}), InvalidInput);
}

TEST(DistributedBfs, MatchesCentralTree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    InstanceSpec spec;
    spec.family = Family::tree_plus_chords;
    spec.size = 40;
    spec.seed = seed;
    const Graph g = make_graph(spec);
    const auto central = bfs_tree(g, 0);
    const auto dist = distributed_bfs_tree(g, 0);
    for (NodeId v = 0; v < g.node_count(); ++v) EXPECT_EQ(dist.tree.parent(v), central.parent(v));
    EXPECT_LE(dist.trace.rounds_elapsed, central.max_depth() + 2);
  }
}

TEST(SeedDistribution, SingleMessageTakesDepthRounds) {
  const Graph g = path_graph(4);
  const auto t = bfs_tree(g, 0);
  const SharedRandomness seed({0b1011}, 4);
  const auto out = distribute_seed(g, t, seed);
  EXPECT_LE(out.trace.rounds_elapsed, 3u);
  for (const auto& r : out.received) EXPECT_EQ(r, seed);
}

TEST(SeedDistribution, FourMessagesPipelineBehindDepth) {
  const Graph g = path_graph(3);
  const auto t = bfs_tree(g, 0);
  const unsigned budget = message_budget(3);
  const SharedRandomness seed({0xdeadbeefcafef00dULL}, 4 * budget);
  const auto out = distribute_seed(g, t, seed);
  EXPECT_LE(out.trace.rounds_elapsed, 2u + 4u);
  EXPECT_TRUE(testing::within_budget(out.trace));
  for (const auto& r : out.received) EXPECT_EQ(r, seed);
}

TEST(SeedDistribution, SingleNodeTakesNoRounds) {
  const Graph g(1, {});
  const auto t = bfs_tree(g, 0);
  const auto seed = SharedRandomness::from_seed(9, 1);
  EXPECT_EQ(distribute_seed(g, t, seed).trace.rounds_elapsed, 0u);
}

TEST(SharedRandomnessTest, PartStreamsAreReproducible) {
  const auto a = SharedRandomness::from_seed(5, 100);
  const auto b = SharedRandomness::from_seed(5, 100);
  EXPECT_EQ(a.unit(3, 1), b.unit(3, 1));
  EXPECT_NE(a.unit(3, 1), a.unit(4, 1));
  EXPECT_NE(a.unit(3, 1), a.unit(3, 2));
  EXPECT_NE(a.unit(3, 1), SharedRandomness::from_seed(6, 100).unit(3, 1));
  EXPECT_GE(a.bit_count(), 64u);
}

TEST(TreeAllreduce, AllNodesLearnTheAggregate) {
  const auto inst = testing::grid_instance(6, 7, PartitionScheme::singletons, 1, 0);
  const auto t = bfs_tree(inst.graph, 0);
  const std::size_t n = inst.graph.node_count();
  std::vector<std::optional<std::uint64_t>> values(n);
  for (NodeId v = 0; v < n; ++v) values[v] = (v * 7919) % 101;
  const auto sum = tree_allreduce(inst.graph, t, values, Aggregate::sum);
  const auto mx = tree_allreduce(inst.graph, t, values, Aggregate::max);
  std::uint64_t expect_sum = 0;
  std::uint64_t expect_max = 0;
  for (const auto& x : values) {
    expect_sum += *x;
    expect_max = std::max(expect_max, *x);
  }
  for (NodeId v = 0; v < n; ++v) {
    EXPECT_EQ(sum.at_node[v], expect_sum);
    EXPECT_EQ(mx.at_node[v], expect_max);
  }
  EXPECT_LE(sum.trace.rounds_elapsed, 2u * t.max_depth());
  std::vector<std::optional<std::uint64_t>> none(n);
  const auto empty = tree_allreduce(inst.graph, t, none, Aggregate::min);
  for (const auto& x : empty.at_node) EXPECT_FALSE(x.has_value());
}

}  // namespace
}  // namespace lcs
