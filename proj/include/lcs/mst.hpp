#pragma once

// Boruvka MST on top of shortcut routing. Each phase builds a shortcut for
// the current fragments, elects leaders, finds every fragment's lightest
// outgoing edge and merges tail fragments into head fragments along it.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lcs/congest.hpp"
#include "lcs/construction.hpp"
#include "lcs/graph.hpp"
#include "lcs/shortcut.hpp"

namespace lcs {

struct OutgoingEdges {
  /// Lightest edge with exactly one endpoint in the part; nullopt if none.
  std::vector<std::optional<EdgeId>> per_part;
  /// At the chosen edge's endpoint inside the part: that edge.
  std::vector<std::optional<EdgeId>> endpoint_of;
  /// Whether each node learned that its part has an outgoing edge.
  std::vector<char> node_has_edge;
  RoundTrace trace;
};

/// Edges compare by weight, then by (smaller endpoint, larger endpoint) when
/// `tie_break` is set. Without it, all weights must be distinct.
OutgoingEdges min_outgoing_edge(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                const Shortcut& shortcut, std::uint32_t congestion, std::uint32_t block_bound,
                                std::span<const NodeId> node_leader, bool tie_break = false,
                                const RunOptions& options = {});

struct MstOptions {
  std::uint64_t seed = 1;
  /// Break weight ties by endpoint IDs instead of rejecting them.
  bool tie_break = false;
  double gamma = kDefaultGamma;
  /// 0 selects 8 ceil(log2 n).
  std::uint32_t max_phases = 0;
  RunOptions run;
};

struct MstPhase {
  std::uint32_t phase = 0;
  std::size_t parts = 0;
  std::uint32_t c = 0;  // accepted guess of the doubling search
  std::uint32_t b = 0;
  std::uint32_t trials = 0;
  std::size_t merges = 0;
  Round rounds = 0;
};

struct MstResult {
  bool success = false;
  std::vector<EdgeId> edges;  // sorted
  Weight weight = 0;
  /// Per node, per incident edge (in incident() order): edge is in the MST.
  std::vector<std::vector<char>> membership;
  /// Total MST weight as learned by each node.
  std::vector<Weight> node_weight;
  /// Phases that merged at least one fragment.
  std::uint32_t phases = 0;
  std::vector<MstPhase> per_phase;
  RoundTrace trace;
};

MstResult boruvka_mst(const Graph& graph, NodeId root = 0, const MstOptions& options = {});

}  // namespace lcs
