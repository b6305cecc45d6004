#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcs {

using NodeId = std::uint32_t;
using PartId = std::uint32_t;
using EdgeId = std::uint32_t;
using Weight = std::int64_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

/// Raised whenever caller-supplied data breaks a documented precondition.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected edge with endpoints normalized so that u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  Weight weight = 1;

  NodeId other(NodeId x) const { return x == u ? v : u; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Incidence {
  NodeId neighbor = 0;
  EdgeId edge = 0;
};

/// Simple undirected graph on nodes 0..n-1. Adjacency lists are sorted by
/// neighbor ID so that every traversal is deterministic.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Incidence> incident(NodeId v) const { return adjacency_.at(v); }
  std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }

  std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;
  bool connected() const;
  bool has_distinct_weights() const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

/// Rooted spanning tree of a Graph. Tree edges are identified by their
/// lower (child) endpoint: the tree edge "v" is {v, parent(v)}.
class RootedTree {
 public:
  RootedTree() = default;

  /// Builds and validates a tree from a parent array (parent[root] ==
  /// kNoNode). Every (v, parent[v]) pair must be a graph edge.
  static RootedTree from_parents(const Graph& graph, NodeId root, std::vector<NodeId> parent);

  std::size_t node_count() const { return parent_.size(); }
  NodeId root() const { return root_; }
  NodeId parent(NodeId v) const { return parent_.at(v); }
  EdgeId parent_edge(NodeId v) const { return parent_edge_.at(v); }
  std::uint32_t depth(NodeId v) const { return depth_.at(v); }
  std::uint32_t height(NodeId v) const { return height_.at(v); }
  /// Maximum depth over all nodes (D).
  std::uint32_t max_depth() const { return max_depth_; }
  std::span<const NodeId> children(NodeId v) const { return children_.at(v); }
  /// Nodes sorted by (depth, id); the root comes first.
  std::span<const NodeId> top_down_order() const { return order_; }

  bool is_tree_edge(EdgeId e) const { return child_of_edge_.at(e) != kNoNode; }
  /// Child endpoint of a graph edge that belongs to the tree, kNoNode otherwise.
  NodeId child_of_edge(EdgeId e) const { return child_of_edge_.at(e); }
  bool is_ancestor(NodeId ancestor, NodeId v) const;

 private:
  NodeId root_ = 0;
  std::uint32_t max_depth_ = 0;
  std::vector<NodeId> parent_;
  std::vector<EdgeId> parent_edge_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint32_t> height_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> order_;
  std::vector<NodeId> child_of_edge_;
};

/// Disjoint node subsets P_0..P_{N-1}. Nodes may be outside every part. The
/// container itself only range-checks; validate_partition() checks the rest.
class Partition {
 public:
  Partition() = default;
  Partition(std::size_t node_count, std::vector<std::vector<NodeId>> parts);

  static Partition singletons(std::size_t node_count);
  /// Groups nodes by label; nodes with std::nullopt stay unassigned. Parts
  /// are numbered by increasing label.
  static Partition from_labels(const std::vector<std::optional<std::uint32_t>>& labels);

  std::size_t node_count() const { return part_of_.size(); }
  std::size_t part_count() const { return parts_.size(); }
  std::span<const NodeId> members(PartId p) const { return parts_.at(p); }
  const std::vector<std::vector<NodeId>>& parts() const { return parts_; }
  std::optional<PartId> part_of(NodeId v) const { return part_of_.at(v); }

 private:
  std::vector<std::vector<NodeId>> parts_;
  std::vector<std::optional<PartId>> part_of_;
};

struct PartitionReport {
  bool valid = true;
  std::vector<PartId> empty_parts;
  std::vector<PartId> overlapping_parts;
  std::vector<PartId> disconnected_parts;
};

/// BFS tree rooted at `root`; among several shortest-path parents the one
/// with the smallest ID wins. Throws InvalidInput on a disconnected graph.
RootedTree bfs_tree(const Graph& graph, NodeId root);

PartitionReport validate_partition(const Graph& graph, const Partition& partition);

/// Throws InvalidInput naming the first violation when the report is not valid.
void require_valid_partition(const Graph& graph, const Partition& partition);

/// Hop distances from `source`; unreachable nodes get kNoNode.
std::vector<NodeId> bfs_distances(const Graph& graph, NodeId source);

// Text formats: graph = "n m" header then m lines "u v [w]"; partition = one
// line of node IDs per part.
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& graph);
Partition read_partition(std::istream& in, std::size_t node_count);
void write_partition(std::ostream& out, const Partition& partition);

Graph load_graph(const std::string& path);
Partition load_partition(const std::string& path, std::size_t node_count);

}  // namespace lcs
