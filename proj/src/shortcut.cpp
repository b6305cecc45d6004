#include "lcs/shortcut.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

#include "lcs/disjoint_sets.hpp"

namespace lcs {

Shortcut::Shortcut(const RootedTree& tree, std::size_t part_count) : tree_(&tree), edges_(part_count) {}

void Shortcut::check_part(PartId part) const {
  if (part >= edges_.size()) throw InvalidInput("unknown part ID " + std::to_string(part));
}

void Shortcut::add_tree_edge(PartId part, NodeId child) {
  check_part(part);
  if (child >= tree_->node_count() || child == tree_->root()) {
    throw InvalidInput("node " + std::to_string(child) + " does not name a tree edge");
  }
  auto& list = edges_[part];
  auto it = std::lower_bound(list.begin(), list.end(), child);
  if (it == list.end() || *it != child) list.insert(it, child);
}

void Shortcut::add_graph_edge(PartId part, EdgeId edge) {
  NodeId child = kNoNode;
  try {
    child = tree_->child_of_edge(edge);
  } catch (const std::out_of_range&) {
    throw InvalidInput("edge index " + std::to_string(edge) + " out of range");
  }
  if (child == kNoNode) throw InvalidInput("edge " + std::to_string(edge) + " is not a tree edge");
  add_tree_edge(part, child);
}

void Shortcut::assign(PartId part, std::vector<NodeId> children) {
  check_part(part);
  for (NodeId child : children) {
    if (child >= tree_->node_count() || child == tree_->root()) {
      throw InvalidInput("node " + std::to_string(child) + " does not name a tree edge");
    }
  }
  std::sort(children.begin(), children.end());
  children.erase(std::unique(children.begin(), children.end()), children.end());
  edges_[part] = std::move(children);
}

void Shortcut::clear(PartId part) {
  check_part(part);
  edges_[part].clear();
}

bool Shortcut::contains(PartId part, NodeId child) const {
  check_part(part);
  return std::binary_search(edges_[part].begin(), edges_[part].end(), child);
}

std::size_t Shortcut::total_assignments() const {
  std::size_t total = 0;
  for (const auto& list : edges_) total += list.size();
  return total;
}

Shortcut Shortcut::unite(const Shortcut& a, const Shortcut& b) {
  if (a.tree_ != b.tree_ || a.part_count() != b.part_count()) {
    throw InvalidInput("cannot unite shortcuts over different trees or partitions");
  }
  Shortcut out(*a.tree_, a.part_count());
  for (PartId p = 0; p < a.part_count(); ++p) {
    std::set_union(a.edges_[p].begin(), a.edges_[p].end(), b.edges_[p].begin(), b.edges_[p].end(),
                   std::back_inserter(out.edges_[p]));
  }
  return out;
}

CongestionProfile measure_congestion(const Graph& graph, const Partition& partition, const Shortcut& shortcut) {
  if (shortcut.part_count() != partition.part_count()) throw InvalidInput("shortcut and partition disagree on N");
  CongestionProfile profile;
  profile.per_edge_load.assign(graph.edge_count(), 0);
  profile.per_edge_shortcut_load.assign(graph.edge_count(), 0);
  const RootedTree& tree = shortcut.tree();
  for (PartId p = 0; p < partition.part_count(); ++p) {
    const auto h = shortcut.edges_of(p);
    for (NodeId child : h) ++profile.per_edge_shortcut_load[tree.parent_edge(child)];
    // Edge used by G[P_p] + H_p: in H_p, or both endpoints in P_p.
    std::vector<EdgeId> used;
    for (NodeId child : h) used.push_back(tree.parent_edge(child));
    for (NodeId v : partition.members(p)) {
      for (const auto& inc : graph.incident(v)) {
        if (inc.neighbor > v && partition.part_of(inc.neighbor) == p) used.push_back(inc.edge);
      }
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    for (EdgeId e : used) ++profile.per_edge_load[e];
  }
  for (auto load : profile.per_edge_load) profile.congestion = std::max(profile.congestion, load);
  for (auto load : profile.per_edge_shortcut_load) {
    profile.shortcut_congestion = std::max(profile.shortcut_congestion, load);
  }
  return profile;
}

std::uint32_t block_components(const Partition& partition, const Shortcut& shortcut, PartId part) {
  if (part >= partition.part_count() || part >= shortcut.part_count()) {
    throw InvalidInput("unknown part ID " + std::to_string(part));
  }
  const RootedTree& tree = shortcut.tree();
  DisjointSets sets(tree.node_count());
  for (NodeId child : shortcut.edges_of(part)) sets.unite(child, tree.parent(child));
  std::vector<std::uint32_t> roots;
  for (NodeId v : partition.members(part)) roots.push_back(sets.find(v));
  std::sort(roots.begin(), roots.end());
  return static_cast<std::uint32_t>(std::unique(roots.begin(), roots.end()) - roots.begin());
}

std::uint32_t part_dilation(const Graph& graph, const Partition& partition, const Shortcut& shortcut, PartId part) {
  if (part >= partition.part_count()) throw InvalidInput("unknown part ID " + std::to_string(part));
  const auto members = partition.members(part);
  if (members.empty()) return 0;
  const RootedTree& tree = shortcut.tree();

  // Local adjacency of G[P] + H restricted to the nodes it touches.
  std::vector<NodeId> nodes(members.begin(), members.end());
  for (NodeId child : shortcut.edges_of(part)) {
    nodes.push_back(child);
    nodes.push_back(tree.parent(child));
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  auto index_of = [&](NodeId v) {
    return static_cast<std::uint32_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
  };
  std::vector<std::vector<std::uint32_t>> adj(nodes.size());
  auto link = [&](NodeId a, NodeId b) {
    const auto ia = index_of(a);
    const auto ib = index_of(b);
    adj[ia].push_back(ib);
    adj[ib].push_back(ia);
  };
  for (NodeId v : members) {
    for (const auto& inc : graph.incident(v)) {
      if (inc.neighbor > v && partition.part_of(inc.neighbor) == part) link(v, inc.neighbor);
    }
  }
  for (NodeId child : shortcut.edges_of(part)) {
    if (!(partition.part_of(child) == part && partition.part_of(tree.parent(child)) == part)) {
      link(child, tree.parent(child));
    }
  }

  auto bfs = [&](std::uint32_t source, std::vector<std::uint32_t>& dist) {
    std::fill(dist.begin(), dist.end(), UINT32_MAX);
    std::deque<std::uint32_t> queue{source};
    dist[source] = 0;
    std::uint32_t far = 0;
    while (!queue.empty()) {
      const auto x = queue.front();
      queue.pop_front();
      far = std::max(far, dist[x]);
      for (auto y : adj[x]) {
        if (dist[y] == UINT32_MAX) {
          dist[y] = dist[x] + 1;
          queue.push_back(y);
        }
      }
    }
    return far;
  };

  std::vector<std::uint32_t> dist(nodes.size());
  bfs(index_of(members.front()), dist);
  std::vector<std::uint32_t> component;
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    if (dist[i] != UINT32_MAX) component.push_back(i);
  }
  std::uint32_t diameter = 0;
  for (auto source : component) diameter = std::max(diameter, bfs(source, dist));
  return diameter;
}

std::uint32_t measure_dilation(const Graph& graph, const Partition& partition, const Shortcut& shortcut) {
  std::uint32_t d = 0;
  for (PartId p = 0; p < partition.part_count(); ++p) d = std::max(d, part_dilation(graph, partition, shortcut, p));
  return d;
}

QualityReport measure_quality(const Graph& graph, const Partition& partition, const Shortcut& shortcut) {
  QualityReport report;
  auto profile = measure_congestion(graph, partition, shortcut);
  report.congestion = profile.congestion;
  report.shortcut_congestion = profile.shortcut_congestion;
  report.per_edge_load = std::move(profile.per_edge_load);
  report.per_edge_shortcut_load = std::move(profile.per_edge_shortcut_load);
  for (PartId p = 0; p < partition.part_count(); ++p) {
    report.per_part_blocks.push_back(block_components(partition, shortcut, p));
    report.block_parameter = std::max(report.block_parameter, report.per_part_blocks.back());
  }
  report.dilation = measure_dilation(graph, partition, shortcut);
  return report;
}

void write_shortcut(std::ostream& out, const Shortcut& shortcut) {
  for (PartId p = 0; p < shortcut.part_count(); ++p) {
    std::vector<EdgeId> ids;
    for (NodeId child : shortcut.edges_of(p)) ids.push_back(shortcut.tree().parent_edge(child));
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? " " : "") << ids[i];
    out << '\n';
  }
}

Shortcut read_shortcut(std::istream& in, const RootedTree& tree, std::size_t part_count) {
  Shortcut shortcut(tree, part_count);
  std::string line;
  PartId part = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (part >= part_count) {
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      throw InvalidInput("shortcut file lists more parts than the partition");
    }
    std::istringstream row(line);
    long long e = 0;
    while (row >> e) {
      if (e < 0) throw InvalidInput("negative edge index in shortcut file");
      shortcut.add_graph_edge(part, static_cast<EdgeId>(e));
    }
    if (!row.eof()) throw InvalidInput("malformed shortcut line " + std::to_string(part + 1));
    ++part;
  }
  return shortcut;
}

}  // namespace lcs
