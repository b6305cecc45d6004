#include "lcs/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace lcs {

Graph::Graph(std::size_t node_count, std::vector<Edge> edges) : edges_(std::move(edges)), adjacency_(node_count) {
  if (node_count == 0) throw InvalidInput("graph must have at least one node");
  std::set<std::pair<NodeId, NodeId>> seen;
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    Edge& edge = edges_[e];
    if (edge.u >= node_count || edge.v >= node_count) {
      throw InvalidInput("edge " + std::to_string(e) + " references a node outside 0.." + std::to_string(node_count - 1));
    }
    if (edge.u == edge.v) throw InvalidInput("self-loop at node " + std::to_string(edge.u));
    if (edge.u > edge.v) std::swap(edge.u, edge.v);
    if (!seen.emplace(edge.u, edge.v).second) {
      throw InvalidInput("parallel edge " + std::to_string(edge.u) + "-" + std::to_string(edge.v));
    }
    adjacency_[edge.u].push_back({edge.v, e});
    adjacency_[edge.v].push_back({edge.u, e});
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(), [](const Incidence& a, const Incidence& b) { return a.neighbor < b.neighbor; });
  }
}

std::optional<EdgeId> Graph::find_edge(NodeId a, NodeId b) const {
  const auto& list = adjacency_.at(a);
  auto it = std::lower_bound(list.begin(), list.end(), b,
                             [](const Incidence& inc, NodeId target) { return inc.neighbor < target; });
  if (it == list.end() || it->neighbor != b) return std::nullopt;
  return it->edge;
}

bool Graph::connected() const {
  const auto dist = bfs_distances(*this, 0);
  return std::none_of(dist.begin(), dist.end(), [](NodeId d) { return d == kNoNode; });
}

bool Graph::has_distinct_weights() const {
  std::set<Weight> weights;
  for (const auto& e : edges_) {
    if (!weights.insert(e.weight).second) return false;
  }
  return true;
}

std::vector<NodeId> bfs_distances(const Graph& graph, NodeId source) {
  std::vector<NodeId> dist(graph.node_count(), kNoNode);
  std::deque<NodeId> queue{source};
  dist.at(source) = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (const auto& inc : graph.incident(v)) {
      if (dist[inc.neighbor] == kNoNode) {
        dist[inc.neighbor] = dist[v] + 1;
        queue.push_back(inc.neighbor);
      }
    }
  }
  return dist;
}

RootedTree RootedTree::from_parents(const Graph& graph, NodeId root, std::vector<NodeId> parent) {
  const std::size_t n = graph.node_count();
  if (parent.size() != n) throw InvalidInput("parent array size does not match the graph");
  if (root >= n) throw InvalidInput("root out of range");
  if (parent[root] != kNoNode) throw InvalidInput("root must not have a parent");

  RootedTree tree;
  tree.root_ = root;
  tree.parent_ = std::move(parent);
  tree.parent_edge_.assign(n, kNoEdge);
  tree.children_.assign(n, {});
  tree.child_of_edge_.assign(graph.edge_count(), kNoNode);
  for (NodeId v = 0; v < n; ++v) {
    if (v == root) continue;
    const NodeId p = tree.parent_[v];
    if (p == kNoNode || p >= n) throw InvalidInput("node " + std::to_string(v) + " has no valid parent");
    const auto e = graph.find_edge(v, p);
    if (!e) throw InvalidInput("tree edge " + std::to_string(v) + "-" + std::to_string(p) + " is not a graph edge");
    tree.parent_edge_[v] = *e;
    tree.child_of_edge_[*e] = v;
    tree.children_[p].push_back(v);
  }

  // Depths by walking down from the root; anything unreached means a cycle
  // or a second root.
  tree.depth_.assign(n, std::numeric_limits<std::uint32_t>::max());
  tree.depth_[root] = 0;
  std::deque<NodeId> queue{root};
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    tree.order_.push_back(v);
    for (NodeId child : tree.children_[v]) {
      tree.depth_[child] = tree.depth_[v] + 1;
      queue.push_back(child);
    }
  }
  if (tree.order_.size() != n) throw InvalidInput("parent array does not describe a spanning tree");
  std::stable_sort(tree.order_.begin(), tree.order_.end(), [&](NodeId a, NodeId b) {
    return tree.depth_[a] != tree.depth_[b] ? tree.depth_[a] < tree.depth_[b] : a < b;
  });

  tree.height_.assign(n, 0);
  for (auto it = tree.order_.rbegin(); it != tree.order_.rend(); ++it) {
    const NodeId v = *it;
    if (v != root) {
      auto& h = tree.height_[tree.parent_[v]];
      h = std::max(h, tree.height_[v] + 1);
    }
    tree.max_depth_ = std::max(tree.max_depth_, tree.depth_[v]);
  }
  return tree;
}

bool RootedTree::is_ancestor(NodeId ancestor, NodeId v) const {
  if (depth_.at(ancestor) > depth_.at(v)) return false;
  while (depth_[v] > depth_[ancestor]) v = parent_[v];
  return v == ancestor;
}

RootedTree bfs_tree(const Graph& graph, NodeId root) {
  if (root >= graph.node_count()) throw InvalidInput("root out of range");
  const auto dist = bfs_distances(graph, root);
  std::vector<NodeId> parent(graph.node_count(), kNoNode);
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (dist[v] == kNoNode) throw InvalidInput("graph is disconnected: node " + std::to_string(v) + " unreachable");
    if (v == root) continue;
    for (const auto& inc : graph.incident(v)) {  // sorted, so the first hit is the smallest ID
      if (dist[inc.neighbor] + 1 == dist[v]) {
        parent[v] = inc.neighbor;
        break;
      }
    }
  }
  return RootedTree::from_parents(graph, root, std::move(parent));
}

Partition::Partition(std::size_t node_count, std::vector<std::vector<NodeId>> parts)
    : parts_(std::move(parts)), part_of_(node_count) {
  for (PartId p = 0; p < parts_.size(); ++p) {
    auto& members = parts_[p];
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (NodeId v : members) {
      if (v >= node_count) throw InvalidInput("part " + std::to_string(p) + " references node " + std::to_string(v));
      if (!part_of_[v]) part_of_[v] = p;
    }
  }
}

Partition Partition::singletons(std::size_t node_count) {
  std::vector<std::vector<NodeId>> parts(node_count);
  for (NodeId v = 0; v < node_count; ++v) parts[v] = {v};
  return Partition(node_count, std::move(parts));
}

Partition Partition::from_labels(const std::vector<std::optional<std::uint32_t>>& labels) {
  std::map<std::uint32_t, std::vector<NodeId>> groups;
  for (NodeId v = 0; v < labels.size(); ++v) {
    if (labels[v]) groups[*labels[v]].push_back(v);
  }
  std::vector<std::vector<NodeId>> parts;
  parts.reserve(groups.size());
  for (auto& [label, members] : groups) parts.push_back(std::move(members));
  return Partition(labels.size(), std::move(parts));
}

PartitionReport validate_partition(const Graph& graph, const Partition& partition) {
  PartitionReport report;
  const std::size_t n = graph.node_count();
  if (partition.node_count() != n) {
    throw InvalidInput("partition covers " + std::to_string(partition.node_count()) + " nodes, graph has " +
                       std::to_string(n));
  }
  std::vector<std::uint32_t> owners(n, 0);
  for (const auto& members : partition.parts()) {
    for (NodeId v : members) ++owners[v];
  }
  std::vector<char> in_part(n, 0);
  std::vector<char> seen(n, 0);
  for (PartId p = 0; p < partition.part_count(); ++p) {
    const auto members = partition.members(p);
    if (members.empty()) {
      report.empty_parts.push_back(p);
      continue;
    }
    if (std::any_of(members.begin(), members.end(), [&](NodeId v) { return owners[v] > 1; })) {
      report.overlapping_parts.push_back(p);
    }
    for (NodeId v : members) in_part[v] = 1;
    std::deque<NodeId> queue{members.front()};
    seen[members.front()] = 1;
    std::size_t reached = 0;
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      ++reached;
      for (const auto& inc : graph.incident(v)) {
        if (in_part[inc.neighbor] && !seen[inc.neighbor]) {
          seen[inc.neighbor] = 1;
          queue.push_back(inc.neighbor);
        }
      }
    }
    if (reached != members.size()) report.disconnected_parts.push_back(p);
    for (NodeId v : members) in_part[v] = seen[v] = 0;
  }
  report.valid = report.empty_parts.empty() && report.overlapping_parts.empty() && report.disconnected_parts.empty();
  return report;
}

void require_valid_partition(const Graph& graph, const Partition& partition) {
  const auto report = validate_partition(graph, partition);
  if (report.valid) return;
  if (!report.empty_parts.empty()) throw InvalidInput("part " + std::to_string(report.empty_parts[0]) + " is empty");
  if (!report.overlapping_parts.empty()) {
    throw InvalidInput("part " + std::to_string(report.overlapping_parts[0]) + " overlaps another part");
  }
  throw InvalidInput("part " + std::to_string(report.disconnected_parts[0]) + " does not induce a connected subgraph");
}

namespace {

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos != std::string::npos && line[pos] != '#') return line;
  }
  return {};
}

}  // namespace

Graph read_graph(std::istream& in) {
  std::istringstream header(next_content_line(in));
  long long n = -1;
  long long m = -1;
  if (!(header >> n >> m) || n <= 0 || m < 0) throw InvalidInput("graph header must be \"n m\" with n > 0");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    const std::string line = next_content_line(in);
    std::istringstream row(line);
    long long u = -1;
    long long v = -1;
    if (!(row >> u >> v) || u < 0 || v < 0) throw InvalidInput("malformed edge line " + std::to_string(i + 1));
    Weight w = 1;
    if (!(row >> w)) {
      if (!row.eof()) throw InvalidInput("malformed weight on edge line " + std::to_string(i + 1));
      w = 1;
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), w});
  }
  return Graph(static_cast<std::size_t>(n), std::move(edges));
}

void write_graph(std::ostream& out, const Graph& graph) {
  out << graph.node_count() << ' ' << graph.edge_count() << '\n';
  for (const auto& e : graph.edges()) out << e.u << ' ' << e.v << ' ' << e.weight << '\n';
}

Partition read_partition(std::istream& in, std::size_t node_count) {
  std::vector<std::vector<NodeId>> parts;
  std::string line;
  while (!(line = next_content_line(in)).empty()) {
    std::istringstream row(line);
    std::vector<NodeId> members;
    long long v = 0;
    while (row >> v) {
      if (v < 0) throw InvalidInput("negative node ID in partition");
      members.push_back(static_cast<NodeId>(v));
    }
    if (!row.eof()) throw InvalidInput("malformed partition line " + std::to_string(parts.size() + 1));
    parts.push_back(std::move(members));
  }
  return Partition(node_count, std::move(parts));
}

void write_partition(std::ostream& out, const Partition& partition) {
  for (const auto& members : partition.parts()) {
    for (std::size_t i = 0; i < members.size(); ++i) out << (i ? " " : "") << members[i];
    out << '\n';
  }
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open graph file " + path);
  return read_graph(in);
}

Partition load_partition(const std::string& path, std::size_t node_count) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open partition file " + path);
  return read_partition(in, node_count);
}

}  // namespace lcs
