#include "lcs/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "lcs/tree_routing.hpp"

namespace lcs {

namespace {

constexpr Round kForever = std::numeric_limits<Round>::max();
constexpr std::uint64_t kIdMessage = 0;
constexpr std::uint64_t kControlMessage = 1;

Message tagged(std::uint64_t kind, std::uint64_t id, unsigned id_width) {
  return Message().put(kind, 1).put(id, id_width);
}

// One depth level every `slot` rounds, deepest first. Children's IDs arrive
// during the slot before their parent acts.
class LevelSweep {
 public:
  LevelSweep(const RootedTree* tree, std::optional<PartId> own, std::uint32_t cutoff, Round slot)
      : tree_(tree), own_(own), cutoff_(cutoff), slot_(slot) {}

  void initialize(NodeContext& ctx) {
    const NodeId v = ctx.id();
    start_ = Round{tree_->max_depth() - tree_->depth(v)} * slot_;
    const auto kids = tree_->children(v);
    child_sets_.resize(kids.size());
    child_unusable_.assign(kids.size(), 0);
    if (start_ == 0) {
      act(ctx);
    } else {
      ctx.sleep_until(start_);
    }
  }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    for (const auto& env : inbox) {
      const auto kids = tree_->children(ctx.id());
      const auto k = static_cast<std::size_t>(std::lower_bound(kids.begin(), kids.end(), env.from) - kids.begin());
      if (k == kids.size() || kids[k] != env.from) {
        throw SimulationFault("sweep message from a non-child", ctx.id(), env.from, ctx.round());
      }
      if (env.message.get(0) == kControlMessage) {
        child_unusable_[k] = 1;
      } else {
        child_sets_[k].push_back(static_cast<PartId>(env.message.get(1)));
      }
    }
    if (acted_) {
      send_next(ctx);
    } else if (ctx.round() >= start_) {
      act(ctx);
    } else {
      ctx.sleep_until(start_);
    }
  }

  bool unusable() const { return unusable_; }
  const std::vector<PartId>& seen() const { return list_; }
  std::vector<std::vector<PartId>> child_edge_parts() const {
    std::vector<std::vector<PartId>> out(child_sets_.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (!child_unusable_[k]) out[k] = child_sets_[k];
    }
    return out;
  }

 private:
  void act(NodeContext& ctx) {
    acted_ = true;
    if (own_) list_.push_back(*own_);
    for (const auto& s : child_sets_) list_.insert(list_.end(), s.begin(), s.end());
    std::sort(list_.begin(), list_.end());
    list_.erase(std::unique(list_.begin(), list_.end()), list_.end());
    if (ctx.id() == tree_->root()) {
      ctx.halt();
      return;
    }
    if (list_.size() > cutoff_) {
      unusable_ = true;
      ctx.send(tree_->parent(ctx.id()), tagged(kControlMessage, 0, ctx.id_bits()));
      ctx.halt();
      return;
    }
    send_next(ctx);
  }

  void send_next(NodeContext& ctx) {
    if (next_ < list_.size()) {
      ctx.send(tree_->parent(ctx.id()), tagged(kIdMessage, list_[next_++], ctx.id_bits()));
    }
    if (next_ >= list_.size()) ctx.halt();
  }

  const RootedTree* tree_;
  std::optional<PartId> own_;
  std::uint32_t cutoff_;
  Round slot_;
  Round start_ = 0;
  bool acted_ = false;
  bool unusable_ = false;
  std::size_t next_ = 0;
  std::vector<PartId> list_;
  std::vector<std::vector<PartId>> child_sets_;
  std::vector<char> child_unusable_;
};

// Pipelined upward routing of every part ID up to the first unusable edge.
// Each round a node forwards the smallest ID it has not forwarded yet; once
// its usable children have all signalled completion and nothing is left, it
// sends an end marker.
class RouteUp {
 public:
  RouteUp(const RootedTree* tree, std::optional<PartId> own, bool parent_usable, std::vector<char> child_usable)
      : tree_(tree), parent_usable_(parent_usable), child_usable_(std::move(child_usable)) {
    if (own) queue_.insert(*own);
    waiting_ = static_cast<std::size_t>(std::count(child_usable_.begin(), child_usable_.end(), 1));
    child_sets_.resize(child_usable_.size());
  }

  void initialize(NodeContext& ctx) { step(ctx); }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    const auto kids = tree_->children(ctx.id());
    for (const auto& env : inbox) {
      const auto k = static_cast<std::size_t>(std::lower_bound(kids.begin(), kids.end(), env.from) - kids.begin());
      if (k == kids.size() || kids[k] != env.from || !child_usable_[k]) {
        throw SimulationFault("routing message over an unusable or non-tree edge", ctx.id(), env.from, ctx.round());
      }
      if (env.message.get(0) == kControlMessage) {
        --waiting_;
      } else {
        const auto id = static_cast<PartId>(env.message.get(1));
        child_sets_[k].push_back(id);
        queue_.insert(id);
      }
    }
    step(ctx);
  }

  std::vector<PartId> routed() const { return {queue_.begin(), queue_.end()}; }
  std::vector<std::vector<PartId>> child_edge_parts() const {
    auto out = child_sets_;
    for (auto& s : out) std::sort(s.begin(), s.end());
    return out;
  }

 private:
  void step(NodeContext& ctx) {
    if (parent_usable_) {
      for (PartId id : queue_) {
        if (forwarded_.count(id)) continue;
        ctx.send(tree_->parent(ctx.id()), tagged(kIdMessage, id, ctx.id_bits()));
        forwarded_.insert(id);
        return;
      }
      if (waiting_ == 0) {
        ctx.send(tree_->parent(ctx.id()), tagged(kControlMessage, 0, ctx.id_bits()));
        ctx.halt();
        return;
      }
    } else if (waiting_ == 0) {
      ctx.halt();
      return;
    }
    ctx.sleep_until(kForever);
  }

  const RootedTree* tree_;
  bool parent_usable_;
  std::vector<char> child_usable_;
  std::set<PartId> queue_;
  std::set<PartId> forwarded_;
  std::size_t waiting_ = 0;
  std::vector<std::vector<PartId>> child_sets_;
};

std::vector<char> participation(const Partition& partition, const std::vector<char>& mask) {
  if (mask.empty()) return std::vector<char>(partition.part_count(), 1);
  if (mask.size() != partition.part_count()) throw InvalidInput("participation mask must have one entry per part");
  return mask;
}

struct SweepOutput {
  std::vector<char> unusable;
  std::vector<std::vector<PartId>> seen;
  std::vector<std::vector<std::vector<PartId>>> child_edge_parts;
  RoundTrace trace;
};

SweepOutput run_sweep(const Graph& graph, const RootedTree& tree, const std::vector<std::optional<PartId>>& own,
                      std::uint32_t cutoff, const RunOptions& options) {
  std::vector<LevelSweep> programs;
  programs.reserve(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) programs.emplace_back(&tree, own[v], cutoff, Round{cutoff} + 1);
  SweepOutput out;
  out.trace = run_to_completion(graph, programs, options);
  for (const auto& p : programs) {
    out.unusable.push_back(p.unusable());
    out.seen.push_back(p.seen());
    out.child_edge_parts.push_back(p.child_edge_parts());
  }
  return out;
}

void check_common(const Graph& graph, const RootedTree& tree, const Partition& partition, std::uint32_t c) {
  if (c == 0) throw InvalidInput("congestion guess must be at least 1");
  if (tree.node_count() != graph.node_count() || partition.node_count() != graph.node_count()) {
    throw InvalidInput("graph, tree and partition sizes differ");
  }
}

}  // namespace

CoreResult core_slow(const Graph& graph, const RootedTree& tree, const Partition& partition, std::uint32_t c,
                     const CoreSlowOptions& options) {
  check_common(graph, tree, partition, c);
  const auto active = participation(partition, options.participating);
  const std::uint32_t cutoff = options.cutoff.value_or(2 * c);
  std::vector<std::optional<PartId>> own(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (auto p = partition.part_of(v); p && active[*p]) own[v] = *p;
  }
  auto sweep = run_sweep(graph, tree, own, cutoff, options.run);

  CoreResult out;
  out.shortcut = Shortcut(tree, partition.part_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (v == tree.root() || sweep.unusable[v]) continue;
    for (PartId p : sweep.seen[v]) out.shortcut.add_tree_edge(p, v);
  }
  out.unusable = std::move(sweep.unusable);
  out.routed = sweep.seen;
  out.seen = std::move(sweep.seen);
  out.child_edge_parts = std::move(sweep.child_edge_parts);
  out.threshold = cutoff;
  out.active = active;
  out.sweep_rounds = sweep.trace.rounds_elapsed;
  out.trace = std::move(sweep.trace);
  return out;
}

double activation_probability(std::size_t node_count, std::uint32_t c, double gamma) {
  if (c == 0) throw InvalidInput("congestion guess must be at least 1");
  if (!(gamma > 0)) throw InvalidInput("gamma must be positive");
  const double p = gamma * std::log(static_cast<double>(node_count)) / (2.0 * c);
  return p <= 0 || p >= 1 ? 1.0 : p;
}

CoreResult core_fast(const Graph& graph, const RootedTree& tree, const Partition& partition, std::uint32_t c,
                     const SharedRandomness& randomness, const CoreFastOptions& options) {
  check_common(graph, tree, partition, c);
  const auto participating = participation(partition, options.participating);
  const std::size_t n = graph.node_count();

  CoreResult out;
  out.probability = activation_probability(n, c, options.gamma);
  out.exact = out.probability == 1.0;
  out.threshold = 4.0 * c * out.probability;
  out.active.assign(partition.part_count(), 0);
  for (PartId p = 0; p < partition.part_count(); ++p) {
    if (!participating[p]) continue;
    out.active[p] = out.exact || randomness.unit(p, options.salt) < out.probability;
  }

  // |L| >= t  <=>  |L| > ceil(t) - 1 for integer list sizes.
  const auto cutoff = static_cast<std::uint32_t>(std::ceil(out.threshold)) - 1;
  std::vector<std::optional<PartId>> sampled(n);
  std::vector<std::optional<PartId>> own(n);
  for (NodeId v = 0; v < n; ++v) {
    const auto p = partition.part_of(v);
    if (!p || !participating[*p]) continue;
    own[v] = *p;
    if (out.active[*p]) sampled[v] = *p;
  }
  auto sweep = run_sweep(graph, tree, sampled, cutoff, options.run);
  out.sweep_rounds = sweep.trace.rounds_elapsed;

  std::vector<RouteUp> programs;
  programs.reserve(n);
  for (NodeId v = 0; v < n; ++v) {
    const auto kids = tree.children(v);
    std::vector<char> child_usable(kids.size());
    for (std::size_t k = 0; k < kids.size(); ++k) child_usable[k] = !sweep.unusable[kids[k]];
    programs.emplace_back(&tree, own[v], v != tree.root() && !sweep.unusable[v], std::move(child_usable));
  }
  RoundTrace routing = run_to_completion(graph, programs, options.run);
  out.routing_rounds = routing.rounds_elapsed;

  out.shortcut = Shortcut(tree, partition.part_count());
  for (NodeId v = 0; v < n; ++v) {
    out.routed.push_back(programs[v].routed());
    out.child_edge_parts.push_back(programs[v].child_edge_parts());
    if (v == tree.root() || sweep.unusable[v]) continue;
    for (PartId p : out.routed.back()) out.shortcut.add_tree_edge(p, v);
  }
  out.unusable = std::move(sweep.unusable);
  out.seen = std::move(sweep.seen);
  out.trace = std::move(sweep.trace);
  out.trace.append(routing);
  return out;
}

VerificationResult verification(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                const Shortcut& tentative, std::uint32_t block_limit,
                                std::span<const char> participating, const RunOptions& options) {
  const std::size_t n = graph.node_count();
  std::vector<char> active(participating.begin(), participating.end());
  if (active.empty()) active.assign(partition.part_count(), 1);
  if (active.size() != partition.part_count()) throw InvalidInput("participation mask must have one entry per part");

  // Each node knows the parts assigned to its parent edge.
  std::vector<std::uint32_t> load(n, 0);
  for (PartId p = 0; p < tentative.part_count(); ++p) {
    if (!active[p]) continue;
    for (NodeId x : tentative.edges_of(p)) ++load[x];
  }
  std::vector<std::optional<std::uint64_t>> values(n);
  for (NodeId v = 0; v < n; ++v) values[v] = load[v];
  auto reduction = tree_allreduce(graph, tree, values, Aggregate::max, options);

  VerificationResult out;
  out.congestion = static_cast<std::uint32_t>(reduction.at_node[tree.root()].value_or(0));
  auto count = count_blocks_distributed(graph, tree, partition, tentative, out.congestion, block_limit, active,
                                        options);
  out.good = std::move(count.good);
  out.node_good = std::move(count.node_good);
  out.trace = std::move(reduction.trace);
  out.trace.append(count.trace);
  return out;
}

std::uint32_t default_max_iterations(std::size_t part_count) {
  std::uint32_t log = 0;
  while ((std::size_t{1} << log) < part_count) ++log;
  return 4 * log + 8;
}

FindResult find_shortcut(const Graph& graph, const RootedTree& tree, const Partition& partition, std::uint32_t c,
                         std::uint32_t b, const FindOptions& options) {
  check_common(graph, tree, partition, c);
  if (b == 0) throw InvalidInput("block guess must be at least 1");
  require_valid_partition(graph, partition);
  const std::size_t n = graph.node_count();
  const std::uint32_t limit = options.max_iterations ? options.max_iterations
                                                     : default_max_iterations(partition.part_count());

  FindResult out;
  out.shortcut = Shortcut(tree, partition.part_count());
  const auto seed = SharedRandomness::from_seed(options.seed, n);
  auto shared = distribute_seed(graph, tree, seed, options.run);
  for (NodeId v = 0; v < n; ++v) {
    if (!(shared.received[v] == seed)) throw SimulationFault("seed broadcast corrupted", v, kNoNode, 0);
  }
  out.trace = std::move(shared.trace);

  std::vector<char> remaining(partition.part_count(), 1);
  bool done = partition.part_count() == 0;
  while (!done && out.iterations < limit) {
    IterationStats stats;
    stats.remaining = static_cast<std::size_t>(std::count(remaining.begin(), remaining.end(), 1));
    CoreFastOptions core_options;
    core_options.gamma = options.gamma;
    core_options.salt = out.iterations;
    core_options.participating = remaining;
    core_options.run = options.run;
    auto core = core_fast(graph, tree, partition, c, shared.received[tree.root()], core_options);
    stats.core_rounds = core.trace.rounds_elapsed;
    stats.core_congestion = measure_congestion(graph, partition, core.shortcut).shortcut_congestion;
    out.trace.append(core.trace);

    auto check = verification(graph, tree, partition, core.shortcut, 3 * b, remaining, options.run);
    stats.verification_rounds = check.trace.rounds_elapsed;
    out.trace.append(check.trace);
    for (PartId p = 0; p < partition.part_count(); ++p) {
      if (!remaining[p] || !check.good[p]) continue;
      out.shortcut.assign(p, {core.shortcut.edges_of(p).begin(), core.shortcut.edges_of(p).end()});
      remaining[p] = 0;
      ++stats.good;
    }
    out.per_iteration.push_back(stats);
    ++out.iterations;

    // Termination check: does any node still belong to a bad part?
    std::vector<std::optional<std::uint64_t>> flags(n);
    for (NodeId v = 0; v < n; ++v) {
      const auto p = partition.part_of(v);
      flags[v] = p && remaining[*p] ? 1 : 0;
    }
    auto any = tree_allreduce(graph, tree, flags, Aggregate::max, options.run);
    out.trace.append(any.trace);
    done = any.at_node[tree.root()].value_or(0) == 0;
  }
  out.success = done;
  for (PartId p = 0; p < partition.part_count(); ++p) {
    if (remaining[p]) out.unresolved.push_back(p);
  }
  return out;
}

DoublingResult find_shortcut_doubling(const Graph& graph, const RootedTree& tree, const Partition& partition,
                                      std::uint32_t initial_c, std::uint32_t initial_b,
                                      const FindOptions& options) {
  if (initial_c == 0 || initial_b == 0) throw InvalidInput("initial guesses must be at least 1");
  const auto ceiling = static_cast<std::uint32_t>(std::max<std::size_t>(graph.node_count(), 1));
  DoublingResult out;
  std::uint32_t c = std::min(initial_c, ceiling);
  std::uint32_t b = std::min(initial_b, ceiling);
  bool grow_c = true;
  for (std::uint32_t trial = 0;; ++trial) {
    FindOptions attempt = options;
    attempt.seed = derive_seed(options.seed, trial, 0x646f75626c65ULL);
    auto result = find_shortcut(graph, tree, partition, c, b, attempt);
    out.trace.append(result.trace);
    out.attempts.push_back({c, b, result.success, result.iterations, result.trace.rounds_elapsed});
    out.c = c;
    out.b = b;
    out.last = std::move(result);
    if (out.last.success) {
      out.success = true;
      return out;
    }
    if (c == ceiling && b == ceiling) return out;
    if ((grow_c && c < ceiling) || b == ceiling) {
      c = std::min(2 * c, ceiling);
    } else {
      b = std::min(2 * b, ceiling);
    }
    grow_c = !grow_c;
  }
}

}  // namespace lcs
