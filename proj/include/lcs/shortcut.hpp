#pragma once

// Tree-restricted shortcuts: one set H_i of tree edges per part, and the
// centralized quality measures used to audit every construction.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lcs/graph.hpp"

namespace lcs {

/// Per-part tree edge sets over a fixed rooted spanning tree. A tree edge is
/// named by its child endpoint, so H_i is a sorted list of non-root nodes.
/// Adding anything that is not a tree edge is rejected.
class Shortcut {
 public:
  Shortcut() = default;
  Shortcut(const RootedTree& tree, std::size_t part_count);

  const RootedTree& tree() const { return *tree_; }
  std::size_t part_count() const { return edges_.size(); }

  /// Adds the tree edge {child, parent(child)} to H_part.
  void add_tree_edge(PartId part, NodeId child);
  /// Adds a graph edge; throws InvalidInput when it is not a tree edge.
  void add_graph_edge(PartId part, EdgeId edge);
  void assign(PartId part, std::vector<NodeId> children);
  void clear(PartId part);

  bool contains(PartId part, NodeId child) const;
  std::span<const NodeId> edges_of(PartId part) const { return edges_.at(part); }
  std::size_t total_assignments() const;

  /// Part-wise union; both operands must share the tree and part count.
  static Shortcut unite(const Shortcut& a, const Shortcut& b);

  friend bool operator==(const Shortcut& a, const Shortcut& b) { return a.edges_ == b.edges_; }

 private:
  void check_part(PartId part) const;

  const RootedTree* tree_ = nullptr;
  std::vector<std::vector<NodeId>> edges_;
};

struct CongestionProfile {
  /// Load under the "used by G[P_i] + H_i" reading, indexed by EdgeId.
  std::vector<std::uint32_t> per_edge_load;
  std::uint32_t congestion = 0;
  /// Load counting H_i membership only, indexed by EdgeId.
  std::vector<std::uint32_t> per_edge_shortcut_load;
  std::uint32_t shortcut_congestion = 0;
};

struct QualityReport {
  std::uint32_t congestion = 0;
  std::uint32_t shortcut_congestion = 0;
  std::uint32_t block_parameter = 0;
  std::uint32_t dilation = 0;
  std::vector<std::uint32_t> per_part_blocks;
  std::vector<std::uint32_t> per_edge_load;
  std::vector<std::uint32_t> per_edge_shortcut_load;
};

CongestionProfile measure_congestion(const Graph& graph, const Partition& partition, const Shortcut& shortcut);

/// Number of connected components of (V, H_part) containing a node of P_part.
std::uint32_t block_components(const Partition& partition, const Shortcut& shortcut, PartId part);

/// Diameter of the component of G[P_part] + H_part that contains P_part.
std::uint32_t part_dilation(const Graph& graph, const Partition& partition, const Shortcut& shortcut, PartId part);

/// Maximum part_dilation over all parts.
std::uint32_t measure_dilation(const Graph& graph, const Partition& partition, const Shortcut& shortcut);

QualityReport measure_quality(const Graph& graph, const Partition& partition, const Shortcut& shortcut);

/// One line per part listing the graph edge indices of H_i.
void write_shortcut(std::ostream& out, const Shortcut& shortcut);
Shortcut read_shortcut(std::istream& in, const RootedTree& tree, std::size_t part_count);

}  // namespace lcs
