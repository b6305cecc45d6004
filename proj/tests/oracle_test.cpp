#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "lcs/oracle.hpp"
#include "lcs/rng.hpp"
#include "test_support.hpp"

namespace lcs {
namespace {

using testing::path_graph;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Every combination of per-part edge subsets, no pruning: the frontier the
// pruned search must reproduce.
std::map<std::uint32_t, std::uint32_t> brute_force_frontier(const RootedTree& tree, const Partition& partition) {
  std::vector<NodeId> edges;
  for (NodeId v = 0; v < tree.node_count(); ++v) {
    if (v != tree.root()) edges.push_back(v);
  }
  const std::size_t m = edges.size();
  const std::size_t parts = partition.part_count();
  std::map<std::uint32_t, std::uint32_t> best;  // b -> min c with exactly max blocks b
  std::vector<std::uint64_t> mask(parts, 0);
  const std::uint64_t per = std::uint64_t{1} << m;
  for (;;) {
    Shortcut s(tree, parts);
    for (PartId p = 0; p < parts; ++p) {
      for (std::size_t j = 0; j < m; ++j) {
        if (mask[p] >> j & 1U) s.add_tree_edge(p, edges[j]);
      }
    }
    std::uint32_t b = 0;
    for (PartId p = 0; p < parts; ++p) b = std::max(b, oracle::count_blocks(tree, partition, s, p));
    const auto loads = oracle::recount_shortcut_load(tree, s);
    const std::uint32_t c = loads.empty() ? 0 : *std::max_element(loads.begin(), loads.end());
    auto [it, fresh] = best.emplace(b, c);
    if (!fresh) it->second = std::min(it->second, c);
    std::size_t k = 0;
    while (k < parts && ++mask[k] == per) mask[k++] = 0;
    if (k == parts) break;
  }
  return best;
}

TEST(Exhaustive, SinglePartReachesOneOne) {
  const auto inst = testing::grid_instance(3, 3, PartitionScheme::singletons, 1, 0);
  const auto t = bfs_tree(inst.graph, 0);
  const Partition whole(9, {{0, 1, 2, 3, 4, 5, 6, 7, 8}});
  const auto cert = oracle::exhaustive_best_shortcut(inst.graph, t, whole);
  ASSERT_FALSE(cert.frontier.empty());
  EXPECT_EQ(cert.frontier.front().c, 1u);
  EXPECT_EQ(cert.frontier.front().b, 1u);
  EXPECT_EQ(cert.min_congestion(1), 1u);
  EXPECT_EQ(cert.min_congestion(9), 0u);
}

TEST(Exhaustive, SingletonsNeedNothing) {
  const Graph g = path_graph(6);
  const auto t = bfs_tree(g, 0);
  const auto cert = oracle::exhaustive_best_shortcut(g, t, Partition(6, {{0}, {2}, {4}, {5}}));
  ASSERT_EQ(cert.frontier.size(), 1u);
  EXPECT_EQ(cert.frontier[0].c, 0u);
  EXPECT_EQ(cert.frontier[0].b, 1u);
}

TEST(Exhaustive, RejectsInstancesOverTheLimits) {
  const Graph g = path_graph(16);
  const auto t = bfs_tree(g, 0);
  EXPECT_THROW(oracle::exhaustive_best_shortcut(g, t, Partition(16, {{3}})), InvalidInput);
  const Graph small = path_graph(6);
  const auto ts = bfs_tree(small, 0);
  EXPECT_THROW(oracle::exhaustive_best_shortcut(small, ts, Partition::singletons(6)), InvalidInput);
}

TEST(Exhaustive, PathOfFourMatchesFrozenFixture) {
  const Graph g = path_graph(4);
  const auto t = bfs_tree(g, 0);
  const Partition parts(4, {{0, 1}, {2, 3}});
  const auto cert = oracle::exhaustive_best_shortcut(g, t, parts);
  // By hand: each part either takes its inner edge (c=1, b=1) or nothing (c=0, b=2).
  ASSERT_EQ(cert.frontier.size(), 2u);
  EXPECT_EQ(cert.frontier[0].c, 1u);
  EXPECT_EQ(cert.frontier[0].b, 1u);
  EXPECT_EQ(cert.frontier[1].c, 0u);
  EXPECT_EQ(cert.frontier[1].b, 2u);
  const auto frozen = oracle::certificate_from_json(read_file(std::string(LCS_FIXTURE_DIR) + "/path4_frontier.json"));
  EXPECT_EQ(frozen.instance_hash, oracle::instance_hash(g, t, parts));
  ASSERT_EQ(cert.frontier.size(), frozen.frontier.size());
  for (std::size_t i = 0; i < cert.frontier.size(); ++i) {
    EXPECT_EQ(cert.frontier[i].c, frozen.frontier[i].c);
    EXPECT_EQ(cert.frontier[i].b, frozen.frontier[i].b);
    EXPECT_EQ(cert.frontier[i].witness, frozen.frontier[i].witness);
  }
}

TEST(Exhaustive, FrontierEqualsUnprunedEnumeration) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    InstanceSpec spec;
    spec.family = seed % 2 ? Family::tree_plus_chords : Family::grid;
    spec.size = seed % 2 ? 6 + seed % 2 : 2;
    spec.width = 3;
    spec.partition = PartitionScheme::random_connected;
    spec.k = 1 + seed % 3;
    spec.seed = seed;
    const auto inst = generate(spec);
    const auto t = bfs_tree(inst.graph, 0);
    const auto cert = oracle::exhaustive_best_shortcut(inst.graph, t, inst.partition);
    const auto brute = brute_force_frontier(t, inst.partition);
    // Pareto-reduce the brute-force table.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> expect;
    std::uint32_t best_c = UINT32_MAX;
    for (const auto& [b, c] : brute) {
      if (c < best_c) {
        expect.emplace_back(c, b);
        best_c = c;
      }
    }
    ASSERT_EQ(cert.frontier.size(), expect.size()) << "seed " << seed;
    for (std::size_t i = 0; i < expect.size(); ++i) {
      EXPECT_EQ(cert.frontier[i].c, expect[i].first);
      EXPECT_EQ(cert.frontier[i].b, expect[i].second);
      // Witnesses measure to the claimed point.
      const auto s = oracle::witness_shortcut(t, cert.frontier[i]);
      const auto q = measure_quality(inst.graph, inst.partition, s);
      EXPECT_EQ(q.shortcut_congestion, cert.frontier[i].c);
      EXPECT_EQ(q.block_parameter, cert.frontier[i].b);
    }
  }
}

TEST(Exhaustive, CertificateJsonRoundTrip) {
  const auto inst = testing::grid_instance(2, 4, PartitionScheme::random_connected, 3, 5);
  const auto t = bfs_tree(inst.graph, 0);
  const auto cert = oracle::exhaustive_best_shortcut(inst.graph, t, inst.partition);
  const auto back = oracle::certificate_from_json(oracle::certificate_to_json(cert));
  EXPECT_EQ(back.instance_hash, cert.instance_hash);
  ASSERT_EQ(back.frontier.size(), cert.frontier.size());
  for (std::size_t i = 0; i < cert.frontier.size(); ++i) EXPECT_EQ(back.frontier[i].witness, cert.frontier[i].witness);
  EXPECT_THROW(oracle::certificate_from_json("{\"points\": 3}"), InvalidInput);
}

TEST(Kruskal, TriangleAndTree) {
  const Graph triangle(3, {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}});
  const auto mst = oracle::kruskal(triangle);
  EXPECT_EQ(mst.weight, 3);
  EXPECT_EQ(mst.edges, (std::vector<EdgeId>{0, 1}));
  const Graph tree(4, {{0, 1, 9}, {1, 2, 4}, {1, 3, 7}});
  EXPECT_EQ(oracle::kruskal(tree).edges, (std::vector<EdgeId>{0, 1, 2}));
  EXPECT_THROW(oracle::kruskal(Graph(3, {{0, 1, 1}})), InvalidInput);
}

TEST(Visibility, UnusableEdgesHideTheirSubtrees) {
  const Graph g = path_graph(5);
  const auto t = bfs_tree(g, 0);
  const auto parts = Partition::singletons(5);
  std::vector<char> none(5, 0);
  const auto open = oracle::replay_visibility(t, parts, none);
  EXPECT_EQ(open[1], (std::vector<PartId>{1, 2, 3, 4}));
  EXPECT_EQ(open[4], (std::vector<PartId>{4}));
  std::vector<char> cut(5, 0);
  cut[3] = 1;
  const auto closed = oracle::replay_visibility(t, parts, cut);
  EXPECT_EQ(closed[1], (std::vector<PartId>{1, 2}));
  EXPECT_EQ(closed[3], (std::vector<PartId>{3, 4}));
  std::vector<char> mask{0, 1, 0, 1, 0};
  EXPECT_EQ(oracle::replay_visibility(t, parts, none, mask)[1], (std::vector<PartId>{1, 3}));
}

TEST(OracleHelpers, EccentricityAndConnectivity) {
  const auto inst = testing::grid_instance(3, 4, PartitionScheme::singletons, 1, 0);
  EXPECT_EQ(oracle::eccentricity(inst.graph, 0), 5u);
  const std::vector<NodeId> row{0, 1, 2};
  const std::vector<NodeId> gap{0, 2};
  EXPECT_TRUE(oracle::induces_connected(inst.graph, row));
  EXPECT_FALSE(oracle::induces_connected(inst.graph, gap));
}

}  // namespace
}  // namespace lcs
