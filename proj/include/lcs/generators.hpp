#pragma once

// Seeded instance generators. Everything random goes through rng.hpp so the
// same spec produces the same bytes on every platform.

#include <cstdint>
#include <optional>
#include <string>

#include "lcs/graph.hpp"

namespace lcs {

enum class Family { path, star, grid, torus_grid, planar_triangulation, tree_plus_chords };
enum class PartitionScheme { singletons, rows, bfs_balls, random_connected };
enum class WeightScheme { unit, uniform_distinct };

struct InstanceSpec {
  Family family = Family::path;
  /// Node count, or the row count for the grid families.
  std::uint32_t size = 4;
  /// Column count for the grid families (0: square).
  std::uint32_t width = 0;
  /// Extra non-tree edges for tree_plus_chords (default size / 2).
  std::optional<std::uint32_t> chords;
  PartitionScheme partition = PartitionScheme::singletons;
  /// Ball radius for bfs_balls, part count for random_connected.
  std::uint32_t k = 1;
  WeightScheme weights = WeightScheme::unit;
  std::uint64_t seed = 0;
};

struct Instance {
  Graph graph;
  Partition partition;
  NodeId root = 0;
};

Instance generate(const InstanceSpec& spec);

Graph make_graph(const InstanceSpec& spec);
Partition make_partition(const Graph& graph, const InstanceSpec& spec);

std::string to_string(Family family);
std::string to_string(PartitionScheme scheme);
std::string to_string(WeightScheme scheme);
Family parse_family(const std::string& name);
PartitionScheme parse_partition_scheme(const std::string& name);
WeightScheme parse_weight_scheme(const std::string& name);

}  // namespace lcs
