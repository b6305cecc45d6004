#pragma once

// Deterministic routing on tree-restricted shortcuts.
//
// Level 1: convergecast / broadcast on a family of subtrees of T that share
// edges, each edge in at most c subtrees, in at most D + c rounds. When
// several messages wait for one edge the one whose subtree root is shallowest
// goes first, ties broken by the smaller subtree label.
//
// Level 2: part-wide primitives. Each part sees its shortcut subgraph as a
// supergraph whose supernodes are block components. A superstep is one round
// of exchange over intra-part graph edges followed by a convergecast and a
// broadcast inside every block, so it costs 1 + 2(D + c) rounds. Every stage
// is charged its full schedule slot because nodes cannot detect early
// completion.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lcs/congest.hpp"
#include "lcs/graph.hpp"
#include "lcs/protocols.hpp"
#include "lcs/shortcut.hpp"

namespace lcs {

/// A connected subtree of T given by its topmost node and its edges (named
/// by child endpoint). Subtrees that share a node must carry distinct labels.
struct Subtree {
  std::uint32_t label = 0;
  NodeId root = 0;
  std::vector<NodeId> edges;
};

struct SubtreeFamily {
  std::vector<Subtree> subtrees;
};

/// Largest number of subtrees that contain one tree edge.
std::uint32_t family_load(const RootedTree& tree, const SubtreeFamily& family);

/// Throws InvalidInput when a subtree is not a rooted connected subtree,
/// labels collide at a node, a label does not fit in an ID field, or the
/// load exceeds `declared_load`.
void validate_family(const RootedTree& tree, const SubtreeFamily& family, std::uint32_t declared_load);

/// A convergecast message crossing `node`'s parent edge. `priority` is the
/// 1-based rank of the subtree among those containing that edge.
struct Crossing {
  NodeId node = 0;
  std::size_t subtree = 0;
  Round sent = 0;
  std::uint32_t priority = 0;
};

using SubtreeValue = std::function<std::optional<std::uint64_t>(std::size_t subtree, NodeId node)>;

struct MultiConvergecastResult {
  std::vector<std::optional<std::uint64_t>> at_root;  // per subtree
  std::vector<Crossing> crossings;
  RoundTrace trace;
};

MultiConvergecastResult multi_convergecast(const Graph& graph, const RootedTree& tree, const SubtreeFamily& family,
                                           std::uint32_t declared_load, const SubtreeValue& value, Aggregate op,
                                           const RunOptions& options = {});

struct MultiBroadcastResult {
  /// delivered[s] lists (node, message) for every node of subtree s.
  std::vector<std::vector<std::pair<NodeId, std::optional<std::uint64_t>>>> delivered;
  RoundTrace trace;
};

MultiBroadcastResult multi_broadcast(const Graph& graph, const RootedTree& tree, const SubtreeFamily& family,
                                     std::uint32_t declared_load,
                                     std::span<const std::optional<std::uint64_t>> root_messages,
                                     const RunOptions& options = {});

/// Connected components of (V, H_i) for every participating part, plus a
/// single-node subtree for each member not touched by H_i. Labels are part IDs.
SubtreeFamily block_family(const RootedTree& tree, const Partition& partition, const Shortcut& shortcut,
                           std::span<const char> participating = {});

/// Per-part communication on a shortcut, one superstep at a time. Values
/// arrays are indexed by node; only members of participating parts take part.
class ShortcutNetwork {
 public:
  ShortcutNetwork(const Graph& graph, const RootedTree& tree, const Partition& partition, const Shortcut& shortcut,
                  std::uint32_t congestion, std::span<const char> participating = {},
                  const RunOptions& options = {});

  using Values = std::vector<std::optional<std::uint64_t>>;
  /// Value a member `from` sends to its same-part neighbor `to` (nullopt: stay silent).
  using EdgeValue = std::function<std::optional<std::uint64_t>(NodeId from, NodeId to)>;
  using Inbox = std::vector<std::vector<std::pair<NodeId, std::uint64_t>>>;

  /// One round in which every node tells its neighbors its part ID.
  void discover_neighbors();
  /// Aggregate over each block, result returned to every member of the block.
  Values block_aggregate(const Values& member_values, Aggregate op);
  /// One round over intra-part graph edges.
  Inbox exchange(const EdgeValue& value);

  bool is_member(NodeId v) const { return member_[v] != 0; }
  /// Same-part neighbor learned in discover_neighbors().
  bool same_part(NodeId v, NodeId w) const;
  const SubtreeFamily& family() const { return family_; }
  std::uint32_t congestion() const { return congestion_; }
  /// Length of one convergecast or broadcast slot: D + c.
  Round slot() const { return tree_.max_depth() + congestion_; }
  const RoundTrace& trace() const { return trace_; }
  RoundTrace take_trace() { return std::move(trace_); }

 private:
  const Graph& graph_;
  const RootedTree& tree_;
  const Partition& partition_;
  std::uint32_t congestion_;
  RunOptions options_;
  SubtreeFamily family_;
  std::vector<char> member_;
  std::vector<std::size_t> block_of_;  // subtree index of each member's block
  std::vector<std::vector<NodeId>> same_part_neighbors_;
  bool discovered_ = false;
  RoundTrace trace_;
};

/// Round ceilings (as multiples of b (D + c + 1)) for the part-wide
/// primitives; see the superstep counts in tree_routing.cpp.
inline constexpr Round kLeaderElectionRoundFactor = 6;
inline constexpr Round kPartBroadcastRoundFactor = 6;
inline constexpr Round kPartConvergecastRoundFactor = 8;
inline constexpr Round kBlockCountRoundFactor = 10;

struct LeaderElection {
  std::vector<NodeId> leader_of_part;
  /// Leader each node believes in; kNoNode outside participating parts.
  std::vector<NodeId> node_leader;
  RoundTrace trace;
};

/// Every block starts with its smallest member ID and b supersteps spread the
/// minimum over the supergraph.
LeaderElection elect_leaders(const Graph& graph, const RootedTree& tree, const Partition& partition,
                             const Shortcut& shortcut, std::uint32_t congestion, std::uint32_t block_bound,
                             const RunOptions& options = {});

struct PartAggregate {
  std::vector<std::optional<std::uint64_t>> at_leader;  // per part
  RoundTrace trace;
};

/// Aggregates member values toward the leader along a BFS tree of the
/// supergraph rooted at the leader's block.
PartAggregate part_convergecast(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                const Shortcut& shortcut, std::uint32_t congestion, std::uint32_t block_bound,
                                std::span<const NodeId> node_leader,
                                std::span<const std::optional<std::uint64_t>> values, Aggregate op,
                                const RunOptions& options = {});

struct PartDelivery {
  std::vector<std::optional<std::uint64_t>> at_node;
  RoundTrace trace;
};

/// Floods each leader's message over its part's supergraph.
PartDelivery part_broadcast(const Graph& graph, const RootedTree& tree, const Partition& partition,
                            const Shortcut& shortcut, std::uint32_t congestion, std::uint32_t block_bound,
                            std::span<const NodeId> node_leader,
                            std::span<const std::optional<std::uint64_t>> part_messages,
                            const RunOptions& options = {});

struct BlockCountResult {
  /// Per part: true when its shortcut subgraph has at most b_limit blocks.
  /// Non-participating parts are reported false.
  std::vector<char> good;
  /// Verdict known at each node (members of participating parts only).
  std::vector<char> node_good;
  RoundTrace trace;
};

/// Finds the parts with at most `block_limit` block components: min-label
/// flooding for block_limit supersteps, BFS trees from the surviving leaders,
/// a conflict check between neighboring supernodes, and a count convergecast.
BlockCountResult count_blocks_distributed(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                          const Shortcut& shortcut, std::uint32_t congestion,
                                          std::uint32_t block_limit, std::span<const char> participating = {},
                                          const RunOptions& options = {});

}  // namespace lcs
