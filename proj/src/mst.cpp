#include "lcs/mst.hpp"

#include <algorithm>
#include <tuple>

#include "lcs/protocols.hpp"
#include "lcs/tree_routing.hpp"

namespace lcs {

namespace {

// One round: every node tells all neighbors its label, if it has one.
class LabelExchange {
 public:
  explicit LabelExchange(std::optional<std::uint64_t> label) : label_(label) {}

  void initialize(NodeContext& ctx) {
    Message m;
    m.put(label_ ? 1 : 0, 1);
    m.put(label_.value_or(0), ctx.id_bits());
    for (const auto& inc : ctx.neighbors()) ctx.send(inc.neighbor, m);
  }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    for (const auto& env : inbox) {
      heard_.emplace_back(env.from, env.message.get(0) ? std::optional<std::uint64_t>(env.message.get(1))
                                                       : std::nullopt);
    }
    ctx.halt();
  }

  std::optional<std::uint64_t> of(NodeId neighbor) const {
    for (const auto& [w, label] : heard_) {
      if (w == neighbor) return label;
    }
    return std::nullopt;
  }

 private:
  std::optional<std::uint64_t> label_;
  std::vector<std::pair<NodeId, std::optional<std::uint64_t>>> heard_;
};

// One round: a node marks one incident edge and tells the other endpoint.
class EdgeNotice {
 public:
  explicit EdgeNotice(std::optional<NodeId> target) : target_(target) {}

  void initialize(NodeContext& ctx) {
    if (target_) ctx.send(*target_, Message().put(1, 1));
  }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    for (const auto& env : inbox) from_.push_back(env.from);
    ctx.halt();
  }

  const std::vector<NodeId>& from() const { return from_; }

 private:
  std::optional<NodeId> target_;
  std::vector<NodeId> from_;
};

std::vector<LabelExchange> exchange_labels(const Graph& graph, const std::vector<std::optional<std::uint64_t>>& label,
                                           RoundTrace& trace, const RunOptions& options) {
  std::vector<LabelExchange> programs;
  programs.reserve(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) programs.emplace_back(label[v]);
  trace.append(run_to_completion(graph, programs, options), 1);
  return programs;
}

void check_weights(const Graph& graph, bool tie_break) {
  const unsigned limit = 3 * id_bits(graph.node_count()) - 1;
  for (const auto& e : graph.edges()) {
    if (e.weight < 0) throw InvalidInput("edge weights must be non-negative");
    if (bits_for(static_cast<std::uint64_t>(e.weight)) > limit) {
      throw InvalidInput("edge weight " + std::to_string(e.weight) + " does not fit in " + std::to_string(limit) +
                         " bits");
    }
  }
  if (!tie_break && !graph.has_distinct_weights()) {
    throw InvalidInput("edge weights are not distinct; enable tie breaking");
  }
}

auto edge_key(const Edge& e) { return std::make_tuple(e.weight, e.u, e.v); }

}  // namespace

OutgoingEdges min_outgoing_edge(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                const Shortcut& shortcut, std::uint32_t congestion, std::uint32_t block_bound,
                                std::span<const NodeId> node_leader, bool tie_break, const RunOptions& options) {
  check_weights(graph, tie_break);
  const std::size_t n = graph.node_count();
  OutgoingEdges out;
  out.trace.budget_bits = message_budget(n, options.kappa);

  std::vector<std::optional<std::uint64_t>> own(n);
  for (NodeId v = 0; v < n; ++v) {
    if (auto p = partition.part_of(v)) own[v] = *p;
  }
  auto heard = exchange_labels(graph, own, out.trace, options);

  // Each member's lightest incident edge leaving its part.
  std::vector<std::optional<EdgeId>> local(n);
  for (NodeId v = 0; v < n; ++v) {
    if (!own[v]) continue;
    for (const auto& inc : graph.incident(v)) {
      if (heard[v].of(inc.neighbor) == own[v]) continue;
      if (!local[v] || edge_key(graph.edge(inc.edge)) < edge_key(graph.edge(*local[v]))) local[v] = inc.edge;
    }
  }

  auto gather = [&](const std::vector<std::optional<std::uint64_t>>& values) {
    auto up = part_convergecast(graph, tree, partition, shortcut, congestion, block_bound, node_leader, values,
                                Aggregate::min, options);
    out.trace.append(up.trace);
    auto down = part_broadcast(graph, tree, partition, shortcut, congestion, block_bound, node_leader, up.at_leader,
                               options);
    out.trace.append(down.trace);
    return down.at_node;
  };

  std::vector<std::optional<std::uint64_t>> weights(n);
  for (NodeId v = 0; v < n; ++v) {
    if (local[v]) weights[v] = static_cast<std::uint64_t>(graph.edge(*local[v]).weight);
  }
  const auto lightest = gather(weights);

  std::vector<std::optional<std::uint64_t>> chosen_key(n);
  if (tie_break) {
    std::vector<std::optional<std::uint64_t>> keys(n);
    for (NodeId v = 0; v < n; ++v) {
      if (local[v] && lightest[v] == weights[v]) {
        const auto& e = graph.edge(*local[v]);
        keys[v] = std::uint64_t{e.u} * n + e.v;
      }
    }
    chosen_key = gather(keys);
  }

  out.per_part.assign(partition.part_count(), std::nullopt);
  out.endpoint_of.assign(n, std::nullopt);
  out.node_has_edge.assign(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    out.node_has_edge[v] = lightest[v].has_value();
    if (!local[v] || lightest[v] != weights[v]) continue;
    const auto& e = graph.edge(*local[v]);
    if (tie_break && chosen_key[v] != std::uint64_t{e.u} * n + e.v) continue;
    out.endpoint_of[v] = local[v];
    out.per_part[*partition.part_of(v)] = local[v];
  }
  return out;
}

MstResult boruvka_mst(const Graph& graph, NodeId root, const MstOptions& options) {
  const std::size_t n = graph.node_count();
  if (root >= n) throw InvalidInput("root out of range");
  if (!graph.connected()) throw InvalidInput("graph is disconnected");
  check_weights(graph, options.tie_break);

  MstResult out;
  out.trace.budget_bits = message_budget(n, options.run.kappa);
  auto bfs = distributed_bfs_tree(graph, root, options.run);
  const RootedTree tree = std::move(bfs.tree);
  out.trace.append(bfs.trace);
  auto shared = distribute_seed(graph, tree, SharedRandomness::from_seed(options.seed, n), options.run);
  out.trace.append(shared.trace);

  std::uint32_t log_n = 0;
  while ((std::size_t{1} << log_n) < n) ++log_n;
  const std::uint32_t cap = options.max_phases ? options.max_phases : 8 * log_n;

  std::vector<std::optional<std::uint32_t>> label(n);
  for (NodeId v = 0; v < n; ++v) label[v] = v;
  out.membership.resize(n);
  for (NodeId v = 0; v < n; ++v) out.membership[v].assign(graph.degree(v), 0);
  auto mark = [&](NodeId v, NodeId w) {
    const auto inc = graph.incident(v);
    for (std::size_t k = 0; k < inc.size(); ++k) {
      if (inc[k].neighbor == w) out.membership[v][k] = 1;
    }
  };
  auto is_head = [&](NodeId v, std::uint64_t part_label, std::uint32_t phase) {
    return shared.received[v].unit(part_label, phase) < 0.5;
  };

  std::uint32_t c_guess = 1;
  std::uint32_t b_guess = 1;
  std::uint32_t attempts = 0;
  bool finished = n == 1;
  for (std::uint32_t phase = 0; !finished; ++phase) {
    RoundTrace phase_trace;
    phase_trace.budget_bits = out.trace.budget_bits;
    const Partition partition = Partition::from_labels(label);

    FindOptions find;
    find.gamma = options.gamma;
    find.seed = derive_seed(options.seed, phase, 0x6d7374ULL);
    find.run = options.run;
    auto doubling = find_shortcut_doubling(graph, tree, partition, c_guess, b_guess, find);
    phase_trace.append(doubling.trace);
    if (!doubling.success) {
      out.trace.append(phase_trace);
      return out;
    }
    c_guess = doubling.c;
    b_guess = doubling.b;
    const Shortcut& shortcut = doubling.last.shortcut;

    // Everyone learns the realized congestion, which bounds every routing slot.
    std::vector<std::optional<std::uint64_t>> load(n, 0);
    for (PartId p = 0; p < partition.part_count(); ++p) {
      for (NodeId x : shortcut.edges_of(p)) load[x] = *load[x] + 1;
    }
    auto congestion = tree_allreduce(graph, tree, load, Aggregate::max, options.run);
    phase_trace.append(congestion.trace);
    const auto c_route = static_cast<std::uint32_t>(congestion.at_node[tree.root()].value_or(0));
    const std::uint32_t b_route = 3 * b_guess;

    auto leaders = elect_leaders(graph, tree, partition, shortcut, c_route, b_route, options.run);
    phase_trace.append(leaders.trace);
    auto outgoing = min_outgoing_edge(graph, tree, partition, shortcut, c_route, b_route, leaders.node_leader,
                                      options.tie_break, options.run);
    phase_trace.append(outgoing.trace);

    std::vector<std::optional<std::uint64_t>> pending(n);
    for (NodeId v = 0; v < n; ++v) pending[v] = outgoing.node_has_edge[v] ? 1 : 0;
    auto any = tree_allreduce(graph, tree, pending, Aggregate::max, options.run);
    phase_trace.append(any.trace);
    MstPhase stats{phase, partition.part_count(), c_guess, b_guess,
                   static_cast<std::uint32_t>(doubling.attempts.size()), 0, 0};
    if (any.at_node[tree.root()].value_or(0) == 0) {
      finished = true;
      stats.rounds = phase_trace.rounds_elapsed;
      out.per_phase.push_back(stats);
      out.trace.append(phase_trace);
      break;
    }
    if (attempts++ >= cap) {
      out.trace.append(phase_trace);
      return out;
    }

    // A tail endpoint merges when the fragment across its edge is a head.
    std::vector<std::optional<std::uint64_t>> wide(n);
    for (NodeId v = 0; v < n; ++v) wide[v] = label[v];
    auto heard = exchange_labels(graph, wide, phase_trace, options.run);
    std::vector<std::optional<NodeId>> target(n);
    std::vector<std::optional<std::uint64_t>> adopt(n);
    for (NodeId v = 0; v < n; ++v) {
      if (!outgoing.endpoint_of[v]) continue;
      const NodeId w = graph.edge(*outgoing.endpoint_of[v]).other(v);
      const auto theirs = heard[v].of(w);
      if (is_head(v, *label[v], phase) || !theirs || !is_head(v, *theirs, phase)) continue;
      target[v] = w;
      adopt[v] = *theirs;
    }
    std::vector<EdgeNotice> notices;
    notices.reserve(n);
    for (NodeId v = 0; v < n; ++v) notices.emplace_back(target[v]);
    phase_trace.append(run_to_completion(graph, notices, options.run), 1);
    for (NodeId v = 0; v < n; ++v) {
      if (target[v]) mark(v, *target[v]);
      for (NodeId w : notices[v].from()) mark(v, w);
    }

    // The whole tail fragment adopts the head's label.
    auto up = part_convergecast(graph, tree, partition, shortcut, c_route, b_route, leaders.node_leader, adopt,
                                Aggregate::min, options.run);
    phase_trace.append(up.trace);
    auto down = part_broadcast(graph, tree, partition, shortcut, c_route, b_route, leaders.node_leader,
                               up.at_leader, options.run);
    phase_trace.append(down.trace);
    for (NodeId v = 0; v < n; ++v) {
      if (down.at_node[v]) label[v] = static_cast<std::uint32_t>(*down.at_node[v]);
    }
    for (const auto& a : up.at_leader) stats.merges += a.has_value();
    if (stats.merges > 0) ++out.phases;
    stats.rounds = phase_trace.rounds_elapsed;
    out.per_phase.push_back(stats);
    out.trace.append(phase_trace);
  }

  // Each edge is counted by its smaller endpoint.
  std::vector<std::optional<std::uint64_t>> share(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    const auto inc = graph.incident(v);
    for (std::size_t k = 0; k < inc.size(); ++k) {
      if (out.membership[v][k] && v < inc[k].neighbor) {
        share[v] = *share[v] + static_cast<std::uint64_t>(graph.edge(inc[k].edge).weight);
        out.edges.push_back(inc[k].edge);
      }
    }
  }
  auto total = tree_allreduce(graph, tree, share, Aggregate::sum, options.run);
  out.trace.append(total.trace);
  for (NodeId v = 0; v < n; ++v) out.node_weight.push_back(static_cast<Weight>(total.at_node[v].value_or(0)));
  out.weight = out.node_weight[tree.root()];
  std::sort(out.edges.begin(), out.edges.end());
  out.success = true;
  return out;
}

}  // namespace lcs
