#pragma once

// Small whole-network protocols built directly on the engine: BFS tree
// construction, pipelined seed broadcast and tree-wide reductions.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lcs/congest.hpp"
#include "lcs/graph.hpp"
#include "lcs/rng.hpp"

namespace lcs {

enum class Aggregate { min, max, sum };

std::uint64_t combine(Aggregate op, std::uint64_t a, std::uint64_t b);
std::optional<std::uint64_t> combine(Aggregate op, std::optional<std::uint64_t> a, std::optional<std::uint64_t> b);

/// A random bit string known to every node. Every part derives its own
/// generator from (seed, part ID, salt), so all nodes of a part draw the same
/// coins without communicating.
class SharedRandomness {
 public:
  SharedRandomness() = default;
  explicit SharedRandomness(std::vector<std::uint64_t> words, std::size_t bit_count);

  /// Expands a 64-bit user seed to ceil(log2(n+1))^2 bits (at least 64).
  static SharedRandomness from_seed(std::uint64_t seed, std::size_t node_count);

  std::span<const std::uint64_t> words() const { return words_; }
  std::size_t bit_count() const { return bit_count_; }

  Rng stream(std::uint64_t part, std::uint64_t salt = 0) const;
  /// Uniform draw in [0, 1) from the part's stream.
  double unit(std::uint64_t part, std::uint64_t salt = 0) const;

  friend bool operator==(const SharedRandomness&, const SharedRandomness&) = default;

 private:
  std::uint64_t digest() const;
  std::vector<std::uint64_t> words_;
  std::size_t bit_count_ = 0;
};

struct SeedDistribution {
  /// The seed as reconstructed by each node.
  std::vector<SharedRandomness> received;
  RoundTrace trace;
};

/// Pipelined broadcast of the seed down `tree` in chunks of min(B, 64) bits;
/// takes depth(T) + ceil(bits / chunk) - 1 rounds.
SeedDistribution distribute_seed(const Graph& graph, const RootedTree& tree, const SharedRandomness& seed,
                                 const RunOptions& options = {});

struct BfsResult {
  RootedTree tree;
  RoundTrace trace;
};

/// Flooding BFS from `root`; a node adopts the smallest-ID neighbor among
/// those that reached it first. Produces the same tree as bfs_tree().
BfsResult distributed_bfs_tree(const Graph& graph, NodeId root, const RunOptions& options = {});

struct TreeReduction {
  /// Value every node holds afterwards (nullopt when no node contributed).
  std::vector<std::optional<std::uint64_t>> at_node;
  RoundTrace trace;
};

/// Convergecast of `values` to the root of `tree` followed by a broadcast of
/// the result; 2 * depth(T) rounds.
TreeReduction tree_allreduce(const Graph& graph, const RootedTree& tree,
                             std::span<const std::optional<std::uint64_t>> values, Aggregate op,
                             const RunOptions& options = {});

}  // namespace lcs
