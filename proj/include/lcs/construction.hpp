#pragma once

// Shortcut construction as simulated distributed programs.
//
// core_slow: bottom-up sweep, one depth level every cutoff+1 rounds. A node
// collects the part IDs its parent edge can see and sends them to its parent
// one per round, unless there are more than `cutoff` (default 2c); then the
// parent edge becomes unusable.
//
// core_fast: the same sweep over sampled ("active") parts only, with
// threshold 4cp, followed by a pipelined upward routing of the full ID sets
// that stops at the first unusable edge.
//
// find_shortcut repeats core_fast + verification(3b) on the parts that are
// still bad; find_shortcut_doubling guesses (c, b) when they are unknown.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lcs/congest.hpp"
#include "lcs/graph.hpp"
#include "lcs/protocols.hpp"
#include "lcs/shortcut.hpp"

namespace lcs {

inline constexpr double kDefaultGamma = 12.0;

struct CoreResult {
  Shortcut shortcut;
  /// Per node: its parent edge was marked unusable.
  std::vector<char> unusable;
  /// Per node: L_v (core_slow) or the sampled list (core_fast), sorted.
  std::vector<std::vector<PartId>> seen;
  /// Per node: the full set of part IDs routed to it (core_fast Q_v; equals
  /// `seen` for core_slow).
  std::vector<std::vector<PartId>> routed;
  /// Per node and child: parts the parent learned are assigned to that
  /// child edge (empty when the edge is unusable), in children() order.
  std::vector<std::vector<std::vector<PartId>>> child_edge_parts;
  /// core_fast only: activation probability, threshold 4cp, per-part coin.
  double probability = 1.0;
  double threshold = 0.0;
  bool exact = true;  // p clamped to 1: every part active
  std::vector<char> active;
  Round sweep_rounds = 0;
  Round routing_rounds = 0;
  RoundTrace trace;
};

struct CoreSlowOptions {
  /// Edge becomes unusable when more than `cutoff` IDs arrive (default 2c).
  std::optional<std::uint32_t> cutoff;
  /// Parts that take part; empty means all. Others are inert.
  std::vector<char> participating;
  RunOptions run;
};

CoreResult core_slow(const Graph& graph, const RootedTree& tree, const Partition& partition, std::uint32_t c,
                     const CoreSlowOptions& options = {});

struct CoreFastOptions {
  double gamma = kDefaultGamma;
  /// Distinguishes independent coin flips of repeated invocations.
  std::uint64_t salt = 0;
  std::vector<char> participating;
  RunOptions run;
};

/// p = min(1, gamma ln(n) / (2c)).
double activation_probability(std::size_t node_count, std::uint32_t c, double gamma);

CoreResult core_fast(const Graph& graph, const RootedTree& tree, const Partition& partition, std::uint32_t c,
                     const SharedRandomness& randomness, const CoreFastOptions& options = {});

struct VerificationResult {
  std::vector<char> good;       // per part
  std::vector<char> node_good;  // per node
  /// Congestion c' of the tentative shortcut, learned by all nodes.
  std::uint32_t congestion = 0;
  RoundTrace trace;
};

/// Finds the parts whose tentative shortcut has at most `block_limit` blocks:
/// a tree-wide max learns c', then count_blocks_distributed runs with it.
VerificationResult verification(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                const Shortcut& tentative, std::uint32_t block_limit,
                                std::span<const char> participating = {}, const RunOptions& options = {});

struct IterationStats {
  std::size_t remaining = 0;
  std::size_t good = 0;
  std::uint32_t core_congestion = 0;  // shortcut-only load of this iteration's core output
  Round core_rounds = 0;
  Round verification_rounds = 0;
};

struct FindOptions {
  double gamma = kDefaultGamma;
  /// 0 selects 4 ceil(log2 N) + 8.
  std::uint32_t max_iterations = 0;
  std::uint64_t seed = 1;
  RunOptions run;
};

std::uint32_t default_max_iterations(std::size_t part_count);

struct FindResult {
  bool success = false;
  Shortcut shortcut;
  std::uint32_t iterations = 0;
  std::vector<PartId> unresolved;
  std::vector<IterationStats> per_iteration;
  RoundTrace trace;
};

FindResult find_shortcut(const Graph& graph, const RootedTree& tree, const Partition& partition, std::uint32_t c,
                         std::uint32_t b, const FindOptions& options = {});

struct DoublingAttempt {
  std::uint32_t c = 0;
  std::uint32_t b = 0;
  bool success = false;
  std::uint32_t iterations = 0;
  Round rounds = 0;
};

struct DoublingResult {
  bool success = false;
  std::uint32_t c = 0;
  std::uint32_t b = 0;
  FindResult last;
  std::vector<DoublingAttempt> attempts;
  RoundTrace trace;
};

/// Retries find_shortcut, doubling c and b alternately (c first) after each
/// failure, both capped at n. Fails only once (n, n) has failed.
DoublingResult find_shortcut_doubling(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                      std::uint32_t initial_c, std::uint32_t initial_b,
                                      const FindOptions& options = {});

}  // namespace lcs
