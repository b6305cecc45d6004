#include "lcs/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <queue>

#include "json.hpp"

namespace lcs::oracle {

namespace {

using Mask = std::uint32_t;

// Components of (V, H) that contain a member, by depth-first labeling.
std::uint32_t label_blocks(const RootedTree& tree, std::span<const NodeId> h, std::span<const NodeId> members) {
  std::vector<std::vector<NodeId>> adj(tree.node_count());
  for (NodeId x : h) {
    adj[x].push_back(tree.parent(x));
    adj[tree.parent(x)].push_back(x);
  }
  std::vector<char> seen(tree.node_count(), 0);
  std::uint32_t count = 0;
  for (NodeId s : members) {
    if (seen[s]) continue;
    ++count;
    std::vector<NodeId> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      for (NodeId y : adj[x]) {
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      }
    }
  }
  return count;
}

std::uint32_t blocks_of_mask(const RootedTree& tree, std::span<const NodeId> tree_edges,
                             std::span<const NodeId> members, Mask mask) {
  std::vector<NodeId> h;
  for (std::size_t t = 0; t < tree_edges.size(); ++t) {
    if (mask >> t & 1U) h.push_back(tree_edges[t]);
  }
  return label_blocks(tree, h, members);
}

bool place(const std::vector<std::vector<Mask>>& options, std::size_t part, std::vector<std::uint32_t>& load,
           std::uint32_t c, std::vector<Mask>& chosen) {
  if (part == options.size()) return true;
  for (Mask m : options[part]) {
    bool fits = true;
    for (std::size_t t = 0; t < load.size(); ++t) {
      if ((m >> t & 1U) && load[t] + 1 > c) fits = false;
    }
    if (!fits) continue;
    for (std::size_t t = 0; t < load.size(); ++t) load[t] += m >> t & 1U;
    chosen[part] = m;
    if (place(options, part + 1, load, c, chosen)) return true;
    for (std::size_t t = 0; t < load.size(); ++t) load[t] -= m >> t & 1U;
  }
  return false;
}

}  // namespace

std::uint32_t Certificate::min_congestion(std::uint32_t b) const {
  std::uint32_t best = UINT32_MAX;
  for (const auto& p : frontier) {
    if (p.b <= b) best = std::min(best, p.c);
  }
  return best;
}

Certificate exhaustive_best_shortcut(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                     const SearchLimits& limits) {
  const std::size_t n = graph.node_count();
  if (n - 1 > limits.max_tree_edges || n - 1 > 31) throw InvalidInput("tree too large for exhaustive search");
  if (partition.part_count() > limits.max_parts) throw InvalidInput("too many parts for exhaustive search");
  const std::size_t parts = partition.part_count();

  std::vector<NodeId> tree_edges;
  for (NodeId v = 0; v < n; ++v) {
    if (v != tree.root()) tree_edges.push_back(v);
  }
  const std::size_t m = tree_edges.size();

  // Only edges of the part's Steiner subtree can matter: any other edge has
  // every node of the part on one side, so dropping it never merges blocks.
  std::vector<std::vector<std::size_t>> steiner(parts);
  std::vector<std::vector<std::uint32_t>> blocks(parts);
  std::uint32_t max_b = 1;
  for (PartId p = 0; p < parts; ++p) {
    const auto members = partition.members(p);
    if (members.empty()) throw InvalidInput("empty part");
    max_b = std::max<std::uint32_t>(max_b, static_cast<std::uint32_t>(members.size()));
    std::vector<std::uint32_t> below(n, 0);
    for (NodeId v : members) {
      for (NodeId x = v;; x = tree.parent(x)) {
        ++below[x];
        if (x == tree.root()) break;
      }
    }
    for (std::size_t t = 0; t < m; ++t) {
      const auto k = below[tree_edges[t]];
      if (k > 0 && k < members.size()) steiner[p].push_back(t);
    }
    const std::size_t s = steiner[p].size();
    blocks[p].resize(std::size_t{1} << s);
    for (Mask local = 0; local < (Mask{1} << s); ++local) {
      Mask global = 0;
      for (std::size_t j = 0; j < s; ++j) {
        if (local >> j & 1U) global |= Mask{1} << steiner[p][j];
      }
      blocks[p][local] = blocks_of_mask(tree, tree_edges, members, global);
    }
  }

  Certificate cert;
  cert.instance_hash = instance_hash(graph, tree, partition);
  std::uint32_t previous = UINT32_MAX;
  for (std::uint32_t b = 1; b <= max_b; ++b) {
    // Inclusion-minimal edge sets reaching <= b blocks, per part.
    std::vector<std::vector<Mask>> options(parts);
    for (PartId p = 0; p < parts; ++p) {
      const std::size_t s = steiner[p].size();
      std::vector<Mask> locals;
      for (Mask local = 0; local < (Mask{1} << s); ++local) {
        if (blocks[p][local] <= b) locals.push_back(local);
      }
      std::stable_sort(locals.begin(), locals.end(),
                       [](Mask a, Mask b2) { return std::popcount(a) < std::popcount(b2); });
      std::vector<Mask> minimal;
      for (Mask local : locals) {
        const bool dominated =
            std::any_of(minimal.begin(), minimal.end(), [&](Mask k) { return (local & k) == k; });
        if (!dominated) minimal.push_back(local);
      }
      for (Mask local : minimal) {
        Mask global = 0;
        for (std::size_t j = 0; j < s; ++j) {
          if (local >> j & 1U) global |= Mask{1} << steiner[p][j];
        }
        options[p].push_back(global);
      }
    }
    for (std::uint32_t c = 0; c <= parts; ++c) {
      std::vector<std::uint32_t> load(m, 0);
      std::vector<Mask> chosen(parts, 0);
      if (!place(options, 0, load, c, chosen)) continue;
      if (c < previous) {
        ParetoPoint point{c, b, {}};
        for (PartId p = 0; p < parts; ++p) {
          std::vector<NodeId> edges;
          for (std::size_t t = 0; t < m; ++t) {
            if (chosen[p] >> t & 1U) edges.push_back(tree_edges[t]);
          }
          point.witness.push_back(std::move(edges));
        }
        cert.frontier.push_back(std::move(point));
        previous = c;
      }
      break;
    }
  }
  return cert;
}

std::uint64_t instance_hash(const Graph& graph, const RootedTree& tree, const Partition& partition) {
  // FNV-1a over a canonical listing.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  feed(graph.node_count());
  for (const auto& e : graph.edges()) {
    feed(e.u);
    feed(e.v);
    feed(static_cast<std::uint64_t>(e.weight));
  }
  feed(tree.root());
  for (NodeId v = 0; v < tree.node_count(); ++v) feed(tree.parent(v));
  for (const auto& part : partition.parts()) {
    feed(part.size());
    for (NodeId v : part) feed(v);
  }
  return h;
}

std::string certificate_to_json(const Certificate& certificate) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(certificate.instance_hash));
  nlohmann::json j;
  j["instance_hash"] = hash;
  j["points"] = nlohmann::json::array();
  for (const auto& p : certificate.frontier) {
    j["points"].push_back({{"c", p.c}, {"b", p.b}, {"witness", p.witness}});
  }
  return j.dump(2);
}

Certificate certificate_from_json(const std::string& text) {
  Certificate cert;
  try {
    const auto j = nlohmann::json::parse(text);
    cert.instance_hash = std::stoull(j.at("instance_hash").get<std::string>(), nullptr, 16);
    for (const auto& p : j.at("points")) {
      cert.frontier.push_back({p.at("c").get<std::uint32_t>(), p.at("b").get<std::uint32_t>(),
                               p.at("witness").get<std::vector<std::vector<NodeId>>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed certificate: ") + e.what());
  }
  return cert;
}

Shortcut witness_shortcut(const RootedTree& tree, const ParetoPoint& point) {
  Shortcut s(tree, point.witness.size());
  for (PartId p = 0; p < point.witness.size(); ++p) s.assign(p, point.witness[p]);
  return s;
}

SpanningTree kruskal(const Graph& graph) {
  std::vector<EdgeId> order(graph.edge_count());
  for (EdgeId e = 0; e < order.size(); ++e) order[e] = e;
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    const auto& x = graph.edge(a);
    const auto& y = graph.edge(b);
    return std::tie(x.weight, x.u, x.v) < std::tie(y.weight, y.u, y.v);
  });
  std::vector<NodeId> up(graph.node_count());
  for (NodeId v = 0; v < up.size(); ++v) up[v] = v;
  auto root_of = [&](NodeId x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  };
  SpanningTree out;
  for (EdgeId e : order) {
    const auto a = root_of(graph.edge(e).u);
    const auto b = root_of(graph.edge(e).v);
    if (a == b) continue;
    up[a] = b;
    out.edges.push_back(e);
    out.weight += graph.edge(e).weight;
  }
  if (out.edges.size() + 1 != graph.node_count()) throw InvalidInput("graph is disconnected");
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

std::vector<std::vector<PartId>> replay_visibility(const RootedTree& tree, const Partition& partition,
                                                   std::span<const char> unusable,
                                                   std::span<const char> participating) {
  const std::size_t n = tree.node_count();
  std::vector<std::vector<PartId>> out(n);
  for (NodeId v = 0; v < n; ++v) {
    if (v == tree.root()) continue;
    // Walk v's subtree without descending through unusable edges below v.
    std::vector<NodeId> stack{v};
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      if (auto p = partition.part_of(x); p && (participating.empty() || participating[*p])) out[v].push_back(*p);
      for (NodeId y : tree.children(x)) {
        if (!unusable[y]) stack.push_back(y);
      }
    }
    std::sort(out[v].begin(), out[v].end());
    out[v].erase(std::unique(out[v].begin(), out[v].end()), out[v].end());
  }
  return out;
}

std::vector<std::uint32_t> recount_shortcut_load(const RootedTree& tree, const Shortcut& shortcut) {
  std::vector<std::uint32_t> load(tree.node_count(), 0);
  for (PartId p = 0; p < shortcut.part_count(); ++p) {
    for (NodeId x = 0; x < tree.node_count(); ++x) {
      if (shortcut.contains(p, x)) ++load[x];
    }
  }
  return load;
}

std::uint32_t count_blocks(const RootedTree& tree, const Partition& partition, const Shortcut& shortcut,
                           PartId part) {
  if (part >= partition.part_count()) throw InvalidInput("unknown part ID " + std::to_string(part));
  return label_blocks(tree, shortcut.edges_of(part), partition.members(part));
}

std::uint32_t eccentricity(const Graph& graph, NodeId source) {
  std::vector<std::int64_t> dist(graph.node_count(), -1);
  std::queue<NodeId> queue;
  queue.push(source);
  dist[source] = 0;
  std::int64_t far = 0;
  while (!queue.empty()) {
    const NodeId x = queue.front();
    queue.pop();
    far = std::max(far, dist[x]);
    for (const auto& inc : graph.incident(x)) {
      if (dist[inc.neighbor] < 0) {
        dist[inc.neighbor] = dist[x] + 1;
        queue.push(inc.neighbor);
      }
    }
  }
  return static_cast<std::uint32_t>(far);
}

bool induces_connected(const Graph& graph, std::span<const NodeId> nodes) {
  if (nodes.empty()) return false;
  std::vector<char> in(graph.node_count(), 0);
  for (NodeId v : nodes) in[v] = 1;
  std::vector<char> seen(graph.node_count(), 0);
  std::vector<NodeId> stack{nodes.front()};
  seen[nodes.front()] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    ++reached;
    for (const auto& inc : graph.incident(x)) {
      if (in[inc.neighbor] && !seen[inc.neighbor]) {
        seen[inc.neighbor] = 1;
        stack.push_back(inc.neighbor);
      }
    }
  }
  std::vector<NodeId> distinct(nodes.begin(), nodes.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  return reached == distinct.size();
}

}  // namespace lcs::oracle
