#include "lcs/generators.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>
#include <set>
#include <vector>

#include "lcs/rng.hpp"

namespace lcs {

namespace {

enum Stream : std::uint64_t { kGraphStream = 1, kPartitionStream = 2, kWeightStream = 3 };

std::uint32_t columns(const InstanceSpec& spec) { return spec.width ? spec.width : spec.size; }

bool is_grid(Family f) { return f == Family::grid || f == Family::torus_grid; }

std::vector<Edge> grid_edges(std::uint32_t rows, std::uint32_t cols, bool wrap) {
  std::vector<Edge> edges;
  auto id = [cols](std::uint32_t r, std::uint32_t c) { return r * cols + c; };
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), 1});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), 1});
      if (wrap && c + 1 == cols) edges.push_back({id(r, 0), id(r, c), 1});
      if (wrap && r + 1 == rows) edges.push_back({id(0, c), id(r, c), 1});
    }
  }
  return edges;
}

// Start from a triangle and repeatedly put a new vertex inside a random face.
std::vector<Edge> stacked_triangulation(std::uint32_t n, Rng& rng) {
  std::vector<Edge> edges{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}};
  std::vector<std::array<NodeId, 3>> faces{{0, 1, 2}};
  for (NodeId v = 3; v < n; ++v) {
    const auto f = uniform_below(rng, faces.size());
    const auto [a, b, c] = faces[f];
    edges.push_back({a, v, 1});
    edges.push_back({b, v, 1});
    edges.push_back({c, v, 1});
    faces[f] = {a, b, v};
    faces.push_back({b, c, v});
    faces.push_back({a, c, v});
  }
  return edges;
}

std::vector<Edge> tree_plus_chords(std::uint32_t n, std::uint32_t chords, Rng& rng) {
  std::vector<Edge> edges;
  std::set<std::pair<NodeId, NodeId>> present;
  for (NodeId v = 1; v < n; ++v) {
    const auto parent = static_cast<NodeId>(uniform_below(rng, v));
    edges.push_back({parent, v, 1});
    present.emplace(parent, v);
  }
  const std::uint64_t possible = std::uint64_t{n} * (n - 1) / 2 - (n - 1);
  chords = static_cast<std::uint32_t>(std::min<std::uint64_t>(chords, possible));
  while (chords > 0) {
    auto a = static_cast<NodeId>(uniform_below(rng, n));
    auto b = static_cast<NodeId>(uniform_below(rng, n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!present.emplace(a, b).second) continue;
    edges.push_back({a, b, 1});
    --chords;
  }
  return edges;
}

Partition bfs_balls(const Graph& graph, std::uint32_t radius, Rng& rng) {
  const std::size_t n = graph.node_count();
  std::vector<char> covered(n, 0);
  std::vector<NodeId> uncovered(n);
  std::iota(uncovered.begin(), uncovered.end(), NodeId{0});
  std::vector<std::vector<NodeId>> parts;
  std::vector<std::uint32_t> dist(n, 0);
  while (!uncovered.empty()) {
    const NodeId center = uncovered[uniform_below(rng, uncovered.size())];
    std::vector<NodeId> part{center};
    covered[center] = 1;
    dist[center] = 0;
    std::deque<NodeId> queue{center};
    while (!queue.empty()) {
      const NodeId x = queue.front();
      queue.pop_front();
      if (dist[x] == radius) continue;
      for (const auto& inc : graph.incident(x)) {
        if (covered[inc.neighbor]) continue;
        covered[inc.neighbor] = 1;
        dist[inc.neighbor] = dist[x] + 1;
        part.push_back(inc.neighbor);
        queue.push_back(inc.neighbor);
      }
    }
    parts.push_back(std::move(part));
    std::erase_if(uncovered, [&](NodeId v) { return covered[v] != 0; });
  }
  return Partition(n, std::move(parts));
}

// Multi-source growth: each step attaches a random frontier node to the part
// that reached it.
Partition random_connected(const Graph& graph, std::uint32_t k, Rng& rng) {
  const std::size_t n = graph.node_count();
  if (k == 0 || k > n) throw InvalidInput("random-connected needs 1 <= k <= n parts");
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  shuffle(std::span<NodeId>(order), rng);
  std::vector<std::optional<std::uint32_t>> label(n);
  std::vector<std::pair<NodeId, std::uint32_t>> frontier;
  for (std::uint32_t p = 0; p < k; ++p) label[order[p]] = p;
  for (std::uint32_t p = 0; p < k; ++p) {
    for (const auto& inc : graph.incident(order[p])) {
      if (!label[inc.neighbor]) frontier.emplace_back(inc.neighbor, p);
    }
  }
  while (!frontier.empty()) {
    const auto i = uniform_below(rng, frontier.size());
    const auto [v, p] = frontier[i];
    frontier[i] = frontier.back();
    frontier.pop_back();
    if (label[v]) continue;
    label[v] = p;
    for (const auto& inc : graph.incident(v)) {
      if (!label[inc.neighbor]) frontier.emplace_back(inc.neighbor, p);
    }
  }
  return Partition::from_labels(label);
}

}  // namespace

Graph make_graph(const InstanceSpec& spec) {
  const std::uint32_t n = spec.size;
  Rng rng(derive_seed(spec.seed, kGraphStream));
  std::vector<Edge> edges;
  std::size_t node_count = n;
  switch (spec.family) {
    case Family::path:
      if (n == 0) throw InvalidInput("path needs at least one node");
      for (NodeId v = 1; v < n; ++v) edges.push_back({v - 1, v, 1});
      break;
    case Family::star:
      if (n == 0) throw InvalidInput("star needs at least one node");
      for (NodeId v = 1; v < n; ++v) edges.push_back({0, v, 1});
      break;
    case Family::grid:
    case Family::torus_grid: {
      const auto cols = columns(spec);
      const bool wrap = spec.family == Family::torus_grid;
      if (n == 0 || cols == 0) throw InvalidInput("grid needs positive dimensions");
      if (wrap && (n < 3 || cols < 3)) throw InvalidInput("torus grid needs at least 3 rows and 3 columns");
      node_count = std::size_t{n} * cols;
      edges = grid_edges(n, cols, wrap);
      break;
    }
    case Family::planar_triangulation:
      if (n < 3) throw InvalidInput("triangulation needs at least 3 nodes");
      edges = stacked_triangulation(n, rng);
      break;
    case Family::tree_plus_chords:
      if (n == 0) throw InvalidInput("tree needs at least one node");
      edges = tree_plus_chords(n, spec.chords.value_or(n / 2), rng);
      break;
  }
  if (spec.weights == WeightScheme::uniform_distinct) {
    Rng wrng(derive_seed(spec.seed, kWeightStream));
    std::vector<Weight> w(edges.size());
    std::iota(w.begin(), w.end(), Weight{1});
    shuffle(std::span<Weight>(w), wrng);
    for (std::size_t e = 0; e < edges.size(); ++e) edges[e].weight = w[e];
  }
  return Graph(node_count, std::move(edges));
}

Partition make_partition(const Graph& graph, const InstanceSpec& spec) {
  Rng rng(derive_seed(spec.seed, kPartitionStream));
  switch (spec.partition) {
    case PartitionScheme::singletons:
      return Partition::singletons(graph.node_count());
    case PartitionScheme::rows: {
      if (!is_grid(spec.family)) throw InvalidInput("rows partition needs a grid family");
      const auto cols = columns(spec);
      std::vector<std::vector<NodeId>> parts(spec.size);
      for (NodeId v = 0; v < graph.node_count(); ++v) parts[v / cols].push_back(v);
      return Partition(graph.node_count(), std::move(parts));
    }
    case PartitionScheme::bfs_balls:
      return bfs_balls(graph, spec.k, rng);
    case PartitionScheme::random_connected:
      return random_connected(graph, spec.k, rng);
  }
  throw InvalidInput("unknown partition scheme");
}

Instance generate(const InstanceSpec& spec) {
  Instance out;
  out.graph = make_graph(spec);
  out.partition = make_partition(out.graph, spec);
  require_valid_partition(out.graph, out.partition);
  out.root = 0;
  return out;
}

namespace {

template <typename E, std::size_t N>
E parse_name(const std::array<std::pair<const char*, E>, N>& table, const std::string& name, const char* what) {
  for (const auto& [s, e] : table) {
    if (name == s) return e;
  }
  throw InvalidInput(std::string("unknown ") + what + " '" + name + "'");
}

template <typename E, std::size_t N>
std::string name_of(const std::array<std::pair<const char*, E>, N>& table, E value) {
  for (const auto& [s, e] : table) {
    if (e == value) return s;
  }
  return "?";
}

constexpr std::array<std::pair<const char*, Family>, 6> kFamilies{{
    {"path", Family::path},
    {"star", Family::star},
    {"grid", Family::grid},
    {"torus-grid", Family::torus_grid},
    {"random-planar-triangulation", Family::planar_triangulation},
    {"random-tree-plus-chords", Family::tree_plus_chords},
}};
constexpr std::array<std::pair<const char*, PartitionScheme>, 4> kSchemes{{
    {"singletons", PartitionScheme::singletons},
    {"rows", PartitionScheme::rows},
    {"bfs-balls", PartitionScheme::bfs_balls},
    {"random-connected", PartitionScheme::random_connected},
}};
constexpr std::array<std::pair<const char*, WeightScheme>, 2> kWeights{{
    {"unit", WeightScheme::unit},
    {"uniform-distinct", WeightScheme::uniform_distinct},
}};

}  // namespace

std::string to_string(Family family) { return name_of(kFamilies, family); }
std::string to_string(PartitionScheme scheme) { return name_of(kSchemes, scheme); }
std::string to_string(WeightScheme scheme) { return name_of(kWeights, scheme); }
Family parse_family(const std::string& name) { return parse_name(kFamilies, name, "graph family"); }
PartitionScheme parse_partition_scheme(const std::string& name) {
  return parse_name(kSchemes, name, "partition scheme");
}
WeightScheme parse_weight_scheme(const std::string& name) { return parse_name(kWeights, name, "weight scheme"); }

}  // namespace lcs
