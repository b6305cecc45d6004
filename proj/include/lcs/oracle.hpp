#pragma once

// Centralized reference computations for tests and audits. Nothing in here
// calls into the simulated algorithms or their helpers; the overlap is limited
// to the plain data types (Graph, RootedTree, Partition, Shortcut).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lcs/graph.hpp"
#include "lcs/shortcut.hpp"

namespace lcs::oracle {

struct ParetoPoint {
  std::uint32_t c = 0;  // shortcut-only congestion
  std::uint32_t b = 0;
  /// Per part, the tree edges (child nodes) of a witness shortcut.
  std::vector<std::vector<NodeId>> witness;
};

struct Certificate {
  std::uint64_t instance_hash = 0;
  /// Sorted by increasing b, strictly decreasing c.
  std::vector<ParetoPoint> frontier;

  /// Smallest c achievable with block parameter at most b.
  std::uint32_t min_congestion(std::uint32_t b) const;
};

struct SearchLimits {
  std::size_t max_tree_edges = 14;
  std::size_t max_parts = 4;
};

/// Exact (c, b) Pareto frontier over all tree-restricted shortcuts.
Certificate exhaustive_best_shortcut(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                     const SearchLimits& limits = {});

std::uint64_t instance_hash(const Graph& graph, const RootedTree& tree, const Partition& partition);

std::string certificate_to_json(const Certificate& certificate);
Certificate certificate_from_json(const std::string& text);

Shortcut witness_shortcut(const RootedTree& tree, const ParetoPoint& point);

struct SpanningTree {
  std::vector<EdgeId> edges;  // sorted
  Weight weight = 0;
};

/// Kruskal over edges ordered by (weight, u, v).
SpanningTree kruskal(const Graph& graph);

/// For each node v != root: sorted part IDs its parent edge can see, i.e.
/// parts with a node in v's subtree reachable without crossing an unusable
/// edge. Only parts with participating[p] (all when empty) are reported.
std::vector<std::vector<PartId>> replay_visibility(const RootedTree& tree, const Partition& partition,
                                                   std::span<const char> unusable,
                                                   std::span<const char> participating = {});

/// Per node v: number of parts whose H contains the tree edge above v.
std::vector<std::uint32_t> recount_shortcut_load(const RootedTree& tree, const Shortcut& shortcut);

/// Block components of one part by depth-first labeling.
std::uint32_t count_blocks(const RootedTree& tree, const Partition& partition, const Shortcut& shortcut, PartId part);

/// Largest hop distance from `source` by a plain queue BFS.
std::uint32_t eccentricity(const Graph& graph, NodeId source);

/// Whether `nodes` induce a connected subgraph (checked pairwise by search).
bool induces_connected(const Graph& graph, std::span<const NodeId> nodes);

}  // namespace lcs::oracle
