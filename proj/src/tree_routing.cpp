#include "lcs/tree_routing.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "lcs/disjoint_sets.hpp"

namespace lcs {

namespace {

constexpr Round kForever = std::numeric_limits<Round>::max();

// What one node knows about one subtree it belongs to.
struct LocalSlot {
  std::size_t subtree = 0;
  std::uint32_t label = 0;
  std::uint64_t priority = 0;  // (root depth, label)
  bool is_root = false;
  std::vector<NodeId> children;
};

std::uint64_t priority_of(const RootedTree& tree, const Subtree& s) {
  return (std::uint64_t{tree.depth(s.root)} << 32) | s.label;
}

std::vector<std::vector<LocalSlot>> build_views(const RootedTree& tree, const SubtreeFamily& family) {
  std::vector<std::vector<LocalSlot>> views(tree.node_count());
  for (std::size_t s = 0; s < family.subtrees.size(); ++s) {
    const Subtree& sub = family.subtrees[s];
    const auto prio = priority_of(tree, sub);
    views[sub.root].push_back({s, sub.label, prio, true, {}});
    for (NodeId x : sub.edges) views[x].push_back({s, sub.label, prio, false, {}});
  }
  for (auto& slots : views) {
    std::sort(slots.begin(), slots.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  }
  auto find = [&](NodeId v, std::uint32_t label) -> LocalSlot& {
    auto& slots = views[v];
    auto it = std::lower_bound(slots.begin(), slots.end(), label,
                               [](const LocalSlot& a, std::uint32_t l) { return a.label < l; });
    return *it;
  };
  for (const Subtree& sub : family.subtrees) {
    for (NodeId x : sub.edges) find(tree.parent(x), sub.label).children.push_back(x);
  }
  for (auto& slots : views) {
    for (auto& slot : slots) std::sort(slot.children.begin(), slot.children.end());
  }
  return views;
}

std::size_t slot_index(const std::vector<LocalSlot>& slots, std::uint32_t label) {
  auto it = std::lower_bound(slots.begin(), slots.end(), label,
                             [](const LocalSlot& a, std::uint32_t l) { return a.label < l; });
  if (it == slots.end() || it->label != label) return slots.size();
  return static_cast<std::size_t>(it - slots.begin());
}

Message encode(std::uint32_t label, unsigned label_bits, std::optional<std::uint64_t> value) {
  Message m;
  m.put(label, label_bits);
  m.put(value ? 1 : 0, 1);
  m.put(value.value_or(0), bits_for(value.value_or(0)));
  return m;
}

std::optional<std::uint64_t> decode_value(const Message& m) {
  if (m.get(1) == 0) return std::nullopt;
  return m.get(2);
}

class MultiUp {
 public:
  MultiUp(const RootedTree* tree, std::vector<LocalSlot> slots, std::vector<std::optional<std::uint64_t>> own,
          Aggregate op)
      : tree_(tree), slots_(std::move(slots)), acc_(std::move(own)), op_(op) {
    pending_.resize(slots_.size());
    done_.assign(slots_.size(), 0);
    rank_.assign(slots_.size(), 0);
    std::vector<std::size_t> up;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      pending_[i] = static_cast<std::uint32_t>(slots_[i].children.size());
      if (!slots_[i].is_root) up.push_back(i);
    }
    std::sort(up.begin(), up.end(), [&](auto a, auto b) { return slots_[a].priority < slots_[b].priority; });
    for (std::size_t r = 0; r < up.size(); ++r) rank_[up[r]] = static_cast<std::uint32_t>(r + 1);
  }

  void initialize(NodeContext& ctx) { step(ctx); }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    for (const auto& env : inbox) {
      const auto i = slot_index(slots_, static_cast<std::uint32_t>(env.message.get(0)));
      if (i == slots_.size() || pending_[i] == 0) {
        throw SimulationFault("unexpected convergecast message", ctx.id(), env.from, ctx.round());
      }
      acc_[i] = combine(op_, acc_[i], decode_value(env.message));
      --pending_[i];
    }
    step(ctx);
  }

  std::optional<std::uint64_t> root_value(std::size_t subtree) const {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (slots_[i].subtree == subtree && slots_[i].is_root) return acc_[i];
    }
    return std::nullopt;
  }
  const std::vector<Crossing>& crossings() const { return crossings_; }

 private:
  void step(NodeContext& ctx) {
    std::size_t best = slots_.size();
    bool waiting = false;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (pending_[i] > 0) {
        waiting = true;
        continue;
      }
      if (slots_[i].is_root || done_[i]) continue;
      if (best == slots_.size() || slots_[i].priority < slots_[best].priority) best = i;
    }
    if (best != slots_.size()) {
      ctx.send(tree_->parent(ctx.id()), encode(slots_[best].label, ctx.id_bits(), acc_[best]));
      done_[best] = 1;
      crossings_.push_back({ctx.id(), slots_[best].subtree, ctx.round(), rank_[best]});
    }
    bool more = false;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (!slots_[i].is_root && !done_[i] && pending_[i] == 0) more = true;
    }
    if (more) return;
    bool unsent = false;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (!slots_[i].is_root && !done_[i]) unsent = true;
    }
    if (!waiting && !unsent) {
      ctx.halt();
    } else {
      ctx.sleep_until(kForever);
    }
  }

  const RootedTree* tree_;
  std::vector<LocalSlot> slots_;
  std::vector<std::optional<std::uint64_t>> acc_;
  Aggregate op_;
  std::vector<std::uint32_t> pending_;
  std::vector<char> done_;
  std::vector<std::uint32_t> rank_;
  std::vector<Crossing> crossings_;
};

class MultiDown {
 public:
  MultiDown(std::vector<LocalSlot> slots, std::vector<std::optional<std::uint64_t>> root_messages)
      : slots_(std::move(slots)), message_(std::move(root_messages)) {
    have_.assign(slots_.size(), 0);
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      for (NodeId c : slots_[i].children) {
        if (std::find(child_.begin(), child_.end(), c) == child_.end()) child_.push_back(c);
      }
    }
    std::sort(child_.begin(), child_.end());
    queue_.resize(child_.size());
  }

  void initialize(NodeContext& ctx) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (slots_[i].is_root) arrive(i);
    }
    step(ctx);
  }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    for (const auto& env : inbox) {
      const auto i = slot_index(slots_, static_cast<std::uint32_t>(env.message.get(0)));
      if (i == slots_.size() || have_[i]) {
        throw SimulationFault("unexpected broadcast message", ctx.id(), env.from, ctx.round());
      }
      message_[i] = decode_value(env.message);
      arrive(i);
    }
    step(ctx);
  }

  /// (has arrived, message) for the slot of `subtree`.
  std::optional<std::optional<std::uint64_t>> received(std::size_t subtree) const {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (slots_[i].subtree == subtree && have_[i]) return message_[i];
    }
    return std::nullopt;
  }

 private:
  void arrive(std::size_t i) {
    have_[i] = 1;
    for (NodeId c : slots_[i].children) {
      const auto q = static_cast<std::size_t>(std::lower_bound(child_.begin(), child_.end(), c) - child_.begin());
      queue_[q].insert({slots_[i].priority, i});
    }
  }

  void step(NodeContext& ctx) {
    bool queued = false;
    for (std::size_t q = 0; q < child_.size(); ++q) {
      if (queue_[q].empty()) continue;
      const auto i = queue_[q].begin()->second;
      queue_[q].erase(queue_[q].begin());
      ctx.send(child_[q], encode(slots_[i].label, ctx.id_bits(), message_[i]));
      if (!queue_[q].empty()) queued = true;
    }
    if (queued) return;
    if (std::all_of(have_.begin(), have_.end(), [](char h) { return h != 0; })) {
      ctx.halt();
    } else {
      ctx.sleep_until(kForever);
    }
  }

  std::vector<LocalSlot> slots_;
  std::vector<std::optional<std::uint64_t>> message_;
  std::vector<char> have_;
  std::vector<NodeId> child_;
  std::vector<std::set<std::pair<std::uint64_t, std::size_t>>> queue_;
};

// One round: every node announces (participating, part ID) to all neighbors.
class PartAnnounce {
 public:
  PartAnnounce(bool member, PartId part) : member_(member), part_(part) {}

  void initialize(NodeContext& ctx) {
    Message m;
    m.put(member_ ? 1 : 0, 1);
    m.put(member_ ? part_ : 0, ctx.id_bits());
    for (const auto& inc : ctx.neighbors()) ctx.send(inc.neighbor, m);
  }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    if (member_) {
      for (const auto& env : inbox) {
        if (env.message.get(0) == 1 && env.message.get(1) == part_) same_.push_back(env.from);
      }
    }
    ctx.halt();
  }

  const std::vector<NodeId>& same_part() const { return same_; }

 private:
  bool member_;
  PartId part_;
  std::vector<NodeId> same_;
};

// One round of point-to-point messages to same-part neighbors.
class NeighborExchange {
 public:
  NeighborExchange(const std::vector<NodeId>* targets, const ShortcutNetwork::EdgeValue* value)
      : targets_(targets), value_(value) {}

  void initialize(NodeContext& ctx) {
    for (NodeId w : *targets_) {
      if (auto v = (*value_)(ctx.id(), w)) ctx.send(w, Message().put(*v, bits_for(*v)));
    }
  }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    for (const auto& env : inbox) got_.emplace_back(env.from, env.message.get(0));
    ctx.halt();
  }

  std::vector<std::pair<NodeId, std::uint64_t>> take() { return std::move(got_); }

 private:
  const std::vector<NodeId>* targets_;
  const ShortcutNetwork::EdgeValue* value_;
  std::vector<std::pair<NodeId, std::uint64_t>> got_;
};

std::vector<char> all_parts(std::size_t part_count, std::span<const char> participating) {
  if (participating.empty()) return std::vector<char>(part_count, 1);
  if (participating.size() != part_count) throw InvalidInput("participation mask must have one entry per part");
  return {participating.begin(), participating.end()};
}

}  // namespace

std::uint32_t family_load(const RootedTree& tree, const SubtreeFamily& family) {
  std::vector<std::uint32_t> load(tree.node_count(), 0);
  std::uint32_t worst = 0;
  for (const auto& s : family.subtrees) {
    for (NodeId x : s.edges) worst = std::max(worst, ++load.at(x));
  }
  return worst;
}

void validate_family(const RootedTree& tree, const SubtreeFamily& family, std::uint32_t declared_load) {
  const std::size_t n = tree.node_count();
  std::vector<std::pair<NodeId, std::uint32_t>> occupancy;
  for (std::size_t s = 0; s < family.subtrees.size(); ++s) {
    const Subtree& sub = family.subtrees[s];
    const std::string where = "subtree " + std::to_string(s) + ": ";
    if (sub.root >= n) throw InvalidInput(where + "root out of range");
    if (sub.label > n) throw InvalidInput(where + "label does not fit in an ID field");
    std::vector<NodeId> nodes{sub.root};
    for (NodeId x : sub.edges) {
      if (x >= n || x == tree.root()) throw InvalidInput(where + "edge " + std::to_string(x) + " is not a tree edge");
      if (x == sub.root) throw InvalidInput(where + "contains the edge above its own root");
      nodes.push_back(x);
    }
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
      throw InvalidInput(where + "lists an edge twice");
    }
    for (NodeId x : sub.edges) {
      if (!std::binary_search(nodes.begin(), nodes.end(), tree.parent(x))) {
        throw InvalidInput(where + "is not connected at node " + std::to_string(x));
      }
    }
    for (NodeId v : nodes) occupancy.emplace_back(v, sub.label);
  }
  std::sort(occupancy.begin(), occupancy.end());
  if (auto it = std::adjacent_find(occupancy.begin(), occupancy.end()); it != occupancy.end()) {
    throw InvalidInput("two subtrees with label " + std::to_string(it->second) + " share node " +
                       std::to_string(it->first));
  }
  const auto load = family_load(tree, family);
  if (load > declared_load) {
    throw InvalidInput("subtree family load " + std::to_string(load) + " exceeds declared " +
                       std::to_string(declared_load));
  }
}

MultiConvergecastResult multi_convergecast(const Graph& graph, const RootedTree& tree, const SubtreeFamily& family,
                                           std::uint32_t declared_load, const SubtreeValue& value, Aggregate op,
                                           const RunOptions& options) {
  validate_family(tree, family, declared_load);
  auto views = build_views(tree, family);
  std::vector<MultiUp> programs;
  programs.reserve(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    std::vector<std::optional<std::uint64_t>> own;
    for (const auto& slot : views[v]) own.push_back(value(slot.subtree, v));
    programs.emplace_back(&tree, std::move(views[v]), std::move(own), op);
  }
  MultiConvergecastResult out;
  out.trace = run_to_completion(graph, programs, options);
  out.at_root.resize(family.subtrees.size());
  for (std::size_t s = 0; s < family.subtrees.size(); ++s) {
    out.at_root[s] = programs[family.subtrees[s].root].root_value(s);
  }
  for (const auto& p : programs) {
    out.crossings.insert(out.crossings.end(), p.crossings().begin(), p.crossings().end());
  }
  return out;
}

MultiBroadcastResult multi_broadcast(const Graph& graph, const RootedTree& tree, const SubtreeFamily& family,
                                     std::uint32_t declared_load,
                                     std::span<const std::optional<std::uint64_t>> root_messages,
                                     const RunOptions& options) {
  validate_family(tree, family, declared_load);
  if (root_messages.size() != family.subtrees.size()) throw InvalidInput("need one root message per subtree");
  auto views = build_views(tree, family);
  std::vector<MultiDown> programs;
  programs.reserve(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    std::vector<std::optional<std::uint64_t>> start;
    for (const auto& slot : views[v]) {
      start.push_back(slot.is_root ? root_messages[slot.subtree] : std::nullopt);
    }
    programs.emplace_back(std::move(views[v]), std::move(start));
  }
  MultiBroadcastResult out;
  out.trace = run_to_completion(graph, programs, options);
  out.delivered.resize(family.subtrees.size());
  for (std::size_t s = 0; s < family.subtrees.size(); ++s) {
    const Subtree& sub = family.subtrees[s];
    std::vector<NodeId> nodes{sub.root};
    nodes.insert(nodes.end(), sub.edges.begin(), sub.edges.end());
    std::sort(nodes.begin(), nodes.end());
    for (NodeId v : nodes) {
      auto got = programs[v].received(s);
      if (!got) throw SimulationFault("broadcast did not reach a subtree node", v, sub.root, out.trace.rounds_elapsed);
      out.delivered[s].emplace_back(v, *got);
    }
  }
  return out;
}

SubtreeFamily block_family(const RootedTree& tree, const Partition& partition, const Shortcut& shortcut,
                           std::span<const char> participating) {
  const auto active = all_parts(partition.part_count(), participating);
  const std::size_t n = tree.node_count();
  SubtreeFamily family;
  for (PartId p = 0; p < partition.part_count(); ++p) {
    if (!active[p]) continue;
    const auto h = shortcut.edges_of(p);
    DisjointSets sets(n);
    for (NodeId x : h) sets.unite(x, tree.parent(x));
    // Group edges by component; the component root is its shallowest node.
    std::vector<std::pair<std::uint32_t, NodeId>> by_component;
    for (NodeId x : h) by_component.emplace_back(sets.find(x), x);
    std::sort(by_component.begin(), by_component.end());
    std::vector<std::uint32_t> seen;
    for (std::size_t i = 0; i < by_component.size();) {
      Subtree sub;
      sub.label = p;
      const auto comp = by_component[i].first;
      NodeId top = kNoNode;
      for (; i < by_component.size() && by_component[i].first == comp; ++i) {
        const NodeId x = by_component[i].second;
        sub.edges.push_back(x);
        const NodeId up = tree.parent(x);
        if (top == kNoNode || tree.depth(up) < tree.depth(top)) top = up;
      }
      sub.root = top;
      seen.push_back(comp);
      family.subtrees.push_back(std::move(sub));
    }
    std::sort(seen.begin(), seen.end());
    for (NodeId v : partition.members(p)) {
      if (!std::binary_search(seen.begin(), seen.end(), sets.find(v))) family.subtrees.push_back({p, v, {}});
    }
  }
  return family;
}

ShortcutNetwork::ShortcutNetwork(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                 const Shortcut& shortcut, std::uint32_t congestion,
                                 std::span<const char> participating, const RunOptions& options)
    : graph_(graph), tree_(tree), partition_(partition), congestion_(congestion), options_(options) {
  if (shortcut.part_count() != partition.part_count()) throw InvalidInput("shortcut and partition disagree on N");
  const auto active = all_parts(partition.part_count(), participating);
  family_ = block_family(tree, partition, shortcut, active);
  validate_family(tree, family_, congestion);
  const std::size_t n = graph.node_count();
  member_.assign(n, 0);
  block_of_.assign(n, SIZE_MAX);
  same_part_neighbors_.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    const auto p = partition.part_of(v);
    member_[v] = p && active[*p];
  }
  for (std::size_t s = 0; s < family_.subtrees.size(); ++s) {
    const Subtree& sub = family_.subtrees[s];
    auto claim = [&](NodeId x) {
      if (member_[x] && partition.part_of(x) == sub.label) block_of_[x] = s;
    };
    claim(sub.root);
    for (NodeId x : sub.edges) claim(x);
  }
  trace_.budget_bits = message_budget(n, options.kappa);
}

bool ShortcutNetwork::same_part(NodeId v, NodeId w) const {
  const auto& list = same_part_neighbors_.at(v);
  return std::find(list.begin(), list.end(), w) != list.end();
}

void ShortcutNetwork::discover_neighbors() {
  std::vector<PartAnnounce> programs;
  programs.reserve(graph_.node_count());
  for (NodeId v = 0; v < graph_.node_count(); ++v) {
    programs.emplace_back(member_[v] != 0, partition_.part_of(v).value_or(0));
  }
  trace_.append(run_to_completion(graph_, programs, options_), 1);
  for (NodeId v = 0; v < graph_.node_count(); ++v) same_part_neighbors_[v] = programs[v].same_part();
  discovered_ = true;
}

ShortcutNetwork::Values ShortcutNetwork::block_aggregate(const Values& member_values, Aggregate op) {
  const std::size_t n = graph_.node_count();
  if (member_values.size() != n) throw InvalidInput("need one value slot per node");
  auto up = multi_convergecast(
      graph_, tree_, family_, congestion_,
      [&](std::size_t s, NodeId v) -> std::optional<std::uint64_t> {
        return member_[v] && block_of_[v] == s ? member_values[v] : std::nullopt;
      },
      op, options_);
  trace_.append(up.trace, slot());
  auto down = multi_broadcast(graph_, tree_, family_, congestion_, up.at_root, options_);
  trace_.append(down.trace, slot());
  Values out(n);
  for (std::size_t s = 0; s < family_.subtrees.size(); ++s) {
    for (const auto& [v, value] : down.delivered[s]) {
      if (member_[v] && block_of_[v] == s) out[v] = value;
    }
  }
  return out;
}

ShortcutNetwork::Inbox ShortcutNetwork::exchange(const EdgeValue& value) {
  if (!discovered_) throw std::logic_error("exchange before discover_neighbors");
  const std::size_t n = graph_.node_count();
  static const std::vector<NodeId> kNone;
  std::vector<NeighborExchange> programs;
  programs.reserve(n);
  for (NodeId v = 0; v < n; ++v) programs.emplace_back(member_[v] ? &same_part_neighbors_[v] : &kNone, &value);
  trace_.append(run_to_completion(graph_, programs, options_), 1);
  Inbox out(n);
  for (NodeId v = 0; v < n; ++v) out[v] = programs[v].take();
  return out;
}

namespace {

using Values = ShortcutNetwork::Values;

// Supernode BFS over the part's supergraph from the blocks flagged as roots.
// Frontier members announce `tag`; a block joins at depth t when some member
// hears a tag equal to its own, and its uplink is the smallest (w * n + u).
struct SuperBfs {
  std::vector<std::optional<std::uint32_t>> depth;
  std::vector<std::optional<std::uint64_t>> uplink;
};

SuperBfs super_bfs(ShortcutNetwork& net, std::size_t n, const Values& is_root, std::uint32_t steps, const Values& tag) {
  SuperBfs bfs{std::vector<std::optional<std::uint32_t>>(n), std::vector<std::optional<std::uint64_t>>(n)};
  for (NodeId v = 0; v < n; ++v) {
    if (net.is_member(v) && is_root[v]) bfs.depth[v] = 0;
  }
  for (std::uint32_t t = 1; t < steps + 1; ++t) {
    auto inbox = net.exchange([&](NodeId from, NodeId) -> std::optional<std::uint64_t> {
      if (bfs.depth[from] == t - 1) return tag[from];
      return std::nullopt;
    });
    Values cand(n);
    for (NodeId v = 0; v < n; ++v) {
      if (!net.is_member(v) || bfs.depth[v]) continue;
      for (const auto& [w, x] : inbox[v]) {
        if (x != tag[v]) continue;
        cand[v] = combine(Aggregate::min, cand[v], std::uint64_t{w} * n + v);
      }
    }
    auto agg = net.block_aggregate(cand, Aggregate::min);
    for (NodeId v = 0; v < n; ++v) {
      if (net.is_member(v) && !bfs.depth[v] && agg[v]) {
        bfs.depth[v] = t;
        bfs.uplink[v] = agg[v];
      }
    }
  }
  return bfs;
}

// Leaves-to-root pass along the BFS uplinks. `sub` starts as each block's own
// value and ends as the aggregate of its BFS subtree; `fold` caps the result.
template <typename Fold>
void super_upcast(ShortcutNetwork& net, std::size_t n, const SuperBfs& bfs, Values& sub, std::uint32_t max_depth,
                  Aggregate op, Fold fold) {
  for (std::uint32_t t = max_depth; t >= 1; --t) {
    auto inbox = net.exchange([&](NodeId from, NodeId to) -> std::optional<std::uint64_t> {
      if (bfs.depth[from] != t || !sub[from]) return std::nullopt;
      if (*bfs.uplink[from] != std::uint64_t{to} * n + from) return std::nullopt;
      return sub[from];
    });
    Values add(n);
    for (NodeId v = 0; v < n; ++v) {
      for (const auto& [w, x] : inbox[v]) {
        (void)w;
        add[v] = combine(op, add[v], x);
      }
    }
    auto agg = net.block_aggregate(add, op);
    for (NodeId v = 0; v < n; ++v) {
      if (bfs.depth[v] == t - 1 && agg[v]) sub[v] = fold(*combine(op, sub[v], agg[v]));
    }
  }
}

// Min-flooding over the supergraph for `steps` supersteps.
Values flood_min(ShortcutNetwork& net, std::size_t n, Values label, std::uint32_t steps) {
  for (std::uint32_t step = 0; step < steps; ++step) {
    auto inbox = net.exchange([&](NodeId from, NodeId) { return label[from]; });
    Values cand = label;
    for (NodeId v = 0; v < n; ++v) {
      for (const auto& [w, x] : inbox[v]) {
        (void)w;
        cand[v] = combine(Aggregate::min, cand[v], x);
      }
    }
    label = net.block_aggregate(cand, Aggregate::min);
  }
  return label;
}

void require_bound(std::uint32_t b) {
  if (b == 0) throw InvalidInput("block bound must be at least 1");
}

}  // namespace

LeaderElection elect_leaders(const Graph& graph, const RootedTree& tree, const Partition& partition,
                             const Shortcut& shortcut, std::uint32_t congestion, std::uint32_t block_bound,
                             const RunOptions& options) {
  require_bound(block_bound);
  const std::size_t n = graph.node_count();
  ShortcutNetwork net(graph, tree, partition, shortcut, congestion, {}, options);
  net.discover_neighbors();
  Values own(n);
  for (NodeId v = 0; v < n; ++v) {
    if (net.is_member(v)) own[v] = v;
  }
  Values label = flood_min(net, n, net.block_aggregate(own, Aggregate::min), block_bound - 1);

  LeaderElection out;
  out.node_leader.assign(n, kNoNode);
  out.leader_of_part.assign(partition.part_count(), kNoNode);
  for (NodeId v = 0; v < n; ++v) {
    if (!label[v]) continue;
    out.node_leader[v] = static_cast<NodeId>(*label[v]);
    auto& leader = out.leader_of_part[*partition.part_of(v)];
    leader = std::min(leader, out.node_leader[v]);
  }
  out.trace = net.take_trace();
  return out;
}

PartAggregate part_convergecast(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                const Shortcut& shortcut, std::uint32_t congestion, std::uint32_t block_bound,
                                std::span<const NodeId> node_leader,
                                std::span<const std::optional<std::uint64_t>> values, Aggregate op,
                                const RunOptions& options) {
  require_bound(block_bound);
  const std::size_t n = graph.node_count();
  if (node_leader.size() != n || values.size() != n) throw InvalidInput("need one entry per node");
  ShortcutNetwork net(graph, tree, partition, shortcut, congestion, {}, options);
  net.discover_neighbors();

  Values mark(n);
  for (NodeId v = 0; v < n; ++v) {
    if (net.is_member(v) && node_leader[v] == v) mark[v] = 1;
  }
  const Values is_root = net.block_aggregate(mark, Aggregate::max);
  Values tag(n);
  for (NodeId v = 0; v < n; ++v) {
    if (net.is_member(v)) tag[v] = 0;
  }
  const auto bfs = super_bfs(net, n, is_root, block_bound - 1, tag);

  Values member_values(n);
  for (NodeId v = 0; v < n; ++v) {
    if (net.is_member(v)) member_values[v] = values[v];
  }
  Values sub = net.block_aggregate(member_values, op);
  super_upcast(net, n, bfs, sub, block_bound - 1, op, [](std::uint64_t x) { return x; });

  PartAggregate out;
  out.at_leader.resize(partition.part_count());
  for (NodeId v = 0; v < n; ++v) {
    if (net.is_member(v) && node_leader[v] == v) out.at_leader[*partition.part_of(v)] = sub[v];
  }
  out.trace = net.take_trace();
  return out;
}

PartDelivery part_broadcast(const Graph& graph, const RootedTree& tree, const Partition& partition,
                            const Shortcut& shortcut, std::uint32_t congestion, std::uint32_t block_bound,
                            std::span<const NodeId> node_leader,
                            std::span<const std::optional<std::uint64_t>> part_messages,
                            const RunOptions& options) {
  require_bound(block_bound);
  const std::size_t n = graph.node_count();
  if (node_leader.size() != n) throw InvalidInput("need one leader entry per node");
  if (part_messages.size() != partition.part_count()) throw InvalidInput("need one message per part");
  ShortcutNetwork net(graph, tree, partition, shortcut, congestion, {}, options);
  net.discover_neighbors();
  Values have(n);
  for (NodeId v = 0; v < n; ++v) {
    if (net.is_member(v) && node_leader[v] == v) have[v] = part_messages[*partition.part_of(v)];
  }
  PartDelivery out;
  out.at_node = flood_min(net, n, net.block_aggregate(have, Aggregate::min), block_bound - 1);
  out.trace = net.take_trace();
  return out;
}

BlockCountResult count_blocks_distributed(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                          const Shortcut& shortcut, std::uint32_t congestion,
                                          std::uint32_t block_limit, std::span<const char> participating,
                                          const RunOptions& options) {
  require_bound(block_limit);
  const std::size_t n = graph.node_count();
  const auto active = all_parts(partition.part_count(), participating);
  ShortcutNetwork net(graph, tree, partition, shortcut, congestion, active, options);
  net.discover_neighbors();
  const std::uint32_t steps = block_limit - 1;

  Values ids(n);
  for (NodeId v = 0; v < n; ++v) {
    if (net.is_member(v)) ids[v] = v;
  }
  const Values own = net.block_aggregate(ids, Aggregate::min);
  const Values label = flood_min(net, n, own, steps);

  // Roots are the blocks holding the node whose ID they ended up with.
  Values is_root(n);
  for (NodeId v = 0; v < n; ++v) {
    if (net.is_member(v) && label[v] == own[v]) is_root[v] = 1;
  }
  const auto bfs = super_bfs(net, n, is_root, steps, label);

  // Every supernode compares (label, reached) with its neighbors.
  auto code = [&](NodeId v) { return *label[v] * 2 + (bfs.depth[v] ? 1 : 0); };
  auto codes = net.exchange([&](NodeId from, NodeId) -> std::optional<std::uint64_t> { return code(from); });
  Values clash(n);
  for (NodeId v = 0; v < n; ++v) {
    if (!net.is_member(v)) continue;
    clash[v] = 0;
    for (const auto& [w, x] : codes[v]) {
      (void)w;
      if (x != code(v)) clash[v] = 1;
    }
  }
  clash = net.block_aggregate(clash, Aggregate::max);

  // Count reached supernodes per tree; a conflict saturates the count.
  const std::uint64_t cap = std::uint64_t{block_limit} + 1;
  Values count(n);
  for (NodeId v = 0; v < n; ++v) {
    if (bfs.depth[v]) count[v] = *clash[v] ? cap : 1;
  }
  super_upcast(net, n, bfs, count, steps, Aggregate::sum, [cap](std::uint64_t x) { return std::min(x, cap); });

  // The root decides and the verdict travels back down the BFS tree.
  Values verdict(n);
  for (NodeId v = 0; v < n; ++v) {
    if (bfs.depth[v] == 0u) verdict[v] = *count[v] <= block_limit ? 2 : 1;
  }
  for (std::uint32_t t = 1; t <= steps; ++t) {
    auto inbox = net.exchange([&](NodeId from, NodeId) -> std::optional<std::uint64_t> {
      if (bfs.depth[from] == t - 1 && verdict[from]) return verdict[from];
      return std::nullopt;
    });
    Values cand(n);
    for (NodeId v = 0; v < n; ++v) {
      if (bfs.depth[v] != t) continue;
      for (const auto& [w, x] : inbox[v]) {
        // Only accept from neighbors that announced the same (label, reached) code.
        for (const auto& [u, c] : codes[v]) {
          if (u == w && c == code(v)) cand[v] = combine(Aggregate::min, cand[v], x);
        }
      }
    }
    auto agg = net.block_aggregate(cand, Aggregate::min);
    for (NodeId v = 0; v < n; ++v) {
      if (bfs.depth[v] == t && agg[v]) verdict[v] = agg[v];
    }
  }

  BlockCountResult out;
  out.node_good.assign(n, 0);
  out.good.assign(partition.part_count(), 0);
  std::vector<char> any_bad(partition.part_count(), 0);
  for (NodeId v = 0; v < n; ++v) {
    if (!net.is_member(v)) continue;
    out.node_good[v] = verdict[v] == 2u;
    if (!out.node_good[v]) any_bad[*partition.part_of(v)] = 1;
  }
  for (PartId p = 0; p < partition.part_count(); ++p) {
    out.good[p] = active[p] && !any_bad[p] && !partition.members(p).empty();
  }
  out.trace = net.take_trace();
  return out;
}

}  // namespace lcs
