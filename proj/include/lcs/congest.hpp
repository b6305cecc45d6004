#pragma once

// Lockstep simulator for the synchronous CONGEST model.
//
// Every node runs a program object. Round 0 is initialization; in every later
// round r each awake node receives the messages its neighbors sent in round
// r-1 and may send at most one message per incident edge. A message may carry
// at most B = kappa * ceil(log2(n+1)) bits. The run ends in the round in which
// the last node halts.

#include <algorithm>
#include <array>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcs/graph.hpp"
#include "lcs/rng.hpp"

namespace lcs {

using Round = std::uint64_t;

inline constexpr unsigned kDefaultKappa = 4;

/// Bits needed for IDs and counts in 0..n: ceil(log2(n+1)), at least 1.
unsigned id_bits(std::size_t node_count);

/// Per-edge, per-round message budget B.
unsigned message_budget(std::size_t node_count, unsigned kappa = kDefaultKappa);

/// Bits needed to write `value` in binary (at least 1).
unsigned bits_for(std::uint64_t value);

/// A message is a short tuple of fixed-width unsigned fields. Its bit length
/// is the sum of the declared widths.
class Message {
 public:
  static constexpr std::size_t kMaxFields = 4;

  Message() = default;

  /// Appends a field; throws std::invalid_argument when `value` needs more
  /// than `width` bits.
  Message& put(std::uint64_t value, unsigned width);

  std::uint64_t get(std::size_t index) const;
  std::size_t field_count() const { return count_; }
  unsigned bit_length() const { return bits_; }

  friend bool operator==(const Message& a, const Message& b);

 private:
  std::array<std::uint64_t, kMaxFields> values_{};
  std::array<std::uint8_t, kMaxFields> widths_{};
  std::uint8_t count_ = 0;
  unsigned bits_ = 0;
};

struct Envelope {
  NodeId from = 0;
  Message message;
};

/// Hard error raised when a program breaks the model rules.
class SimulationFault : public std::runtime_error {
 public:
  SimulationFault(const std::string& what, NodeId node, NodeId peer, Round round);

  NodeId node() const { return node_; }
  NodeId peer() const { return peer_; }
  Round round() const { return round_; }

 private:
  NodeId node_;
  NodeId peer_;
  Round round_;
};

struct MessageRecord {
  Round round = 0;  // round in which the message was sent
  NodeId sender = 0;
  NodeId receiver = 0;
  unsigned bits = 0;
  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

struct RoundTrace {
  Round rounds_elapsed = 0;
  std::uint64_t messages = 0;
  std::uint64_t bits = 0;
  unsigned max_bits_on_edge_per_round = 0;
  unsigned budget_bits = 0;
  std::vector<MessageRecord> log;

  /// Sequential composition: `later` starts after this trace ends. When
  /// `charged` is given the later stage occupies exactly that many rounds
  /// (a fixed schedule slot), which must not be shorter than what it used.
  void append(const RoundTrace& later, std::optional<Round> charged = std::nullopt);

  friend bool operator==(const RoundTrace&, const RoundTrace&) = default;
};

enum class RunStatus { completed, timed_out };

struct RunResult {
  RunStatus status = RunStatus::completed;
  RoundTrace trace;
  bool ok() const { return status == RunStatus::completed; }
};

struct RunOptions {
  Round round_limit = 1'000'000;
  unsigned kappa = kDefaultKappa;
  bool log_messages = false;
  /// Seed of the private per-node PRNG streams.
  std::uint64_t seed = 0;
  /// Re-executes every handler from a snapshot of its pre-round state and
  /// checks that it sends the same messages.
  bool check_causality = false;
};

class EngineCore;

/// The window through which a program talks to the network in one round.
class NodeContext {
 public:
  NodeId id() const { return id_; }
  Round round() const { return round_; }
  std::size_t node_count() const;
  std::span<const Incidence> neighbors() const;
  unsigned budget_bits() const;
  unsigned id_bits() const;

  /// Queues one message for delivery to `neighbor` in the next round.
  void send(NodeId neighbor, Message message);
  void halt();
  /// The node is not invoked again before round `round` unless a message
  /// arrives earlier.
  void sleep_until(Round round);
  Rng& rng() { return *rng_; }

 private:
  friend class EngineCore;
  struct Capture {
    std::vector<std::pair<NodeId, Message>> sends;
    bool halted = false;
  };

  NodeContext(EngineCore* core, NodeId id, Round round, Rng* rng, Capture* capture)
      : core_(core), id_(id), round_(round), rng_(rng), capture_(capture) {}

  EngineCore* core_;
  NodeId id_;
  Round round_;
  Rng* rng_;
  Capture* capture_;
};

template <typename P>
concept NodeProgram = std::copy_constructible<P> && requires(P p, NodeContext& ctx, std::span<const Envelope> inbox) {
  p.initialize(ctx);
  p.on_round(ctx, inbox);
};

/// Mailboxes, budget enforcement and the round clock; the templated run()
/// below drives it.
class EngineCore {
 public:
  EngineCore(const Graph& graph, const RunOptions& options);

  const Graph& graph() const { return graph_; }
  const RunOptions& options() const { return options_; }
  unsigned budget() const { return budget_; }
  unsigned id_width() const { return id_width_; }

  NodeContext context(NodeId v, Round round) { return NodeContext(this, v, round, &rngs_[v], nullptr); }
  NodeContext capture_context(NodeId v, Round round, Rng* rng, NodeContext::Capture* capture) {
    return NodeContext(this, v, round, rng, capture);
  }

  bool all_halted() const { return live_ == 0; }
  bool halted(NodeId v) const { return halted_[v] != 0; }
  /// Round in which the next handler invocation must happen.
  Round next_round(Round current) const;
  /// Moves round-(r-1) sends into inboxes for round r.
  void deliver(Round r);
  bool should_run(NodeId v, Round r) const { return !halted_[v] && (!inbox_[v].empty() || wake_[v] <= r); }
  void mark_invoked(NodeId v, Round r) { wake_[v] = r + 1; }
  std::span<const Envelope> inbox(NodeId v) const { return inbox_[v]; }
  Rng& rng(NodeId v) { return rngs_[v]; }

  /// Sends made by v in the current round (for the causality check).
  std::vector<std::pair<NodeId, Message>> sends_of(NodeId v, std::size_t from_index) const;
  std::size_t send_log_size() const { return round_sends_.size(); }
  void verify_replay(NodeId v, Round r, std::size_t first_send, bool halted_before,
                     const NodeContext::Capture& replay) const;

  RoundTrace& trace() { return trace_; }

 private:
  friend class NodeContext;
  void do_send(NodeId from, NodeId to, Message message, Round round);
  void do_halt(NodeId v);
  void do_sleep(NodeId v, Round round);

  const Graph& graph_;
  RunOptions options_;
  unsigned budget_;
  unsigned id_width_;
  std::size_t live_;
  std::vector<char> halted_;
  std::vector<Round> wake_;
  std::vector<Rng> rngs_;
  std::vector<std::vector<Round>> last_send_;  // per node, per adjacency slot
  std::vector<std::vector<Envelope>> inbox_;
  std::vector<std::vector<Envelope>> next_inbox_;
  std::vector<std::tuple<NodeId, NodeId, Message>> round_sends_;
  std::size_t in_flight_ = 0;
  RoundTrace trace_;
};

/// Runs one program per node until all halt or `options.round_limit` passes.
/// Programs are updated in place so that callers can read node outputs.
template <NodeProgram P>
RunResult run(const Graph& graph, std::vector<P>& programs, const RunOptions& options = {}) {
  if (programs.size() != graph.node_count()) throw InvalidInput("need exactly one program per node");
  if (options.round_limit == 0) throw InvalidInput("round limit must be positive");
  EngineCore core(graph, options);
  const std::size_t n = graph.node_count();

  auto invoke = [&](NodeId v, Round r, auto&& handler) {
    if (!options.check_causality) {
      NodeContext ctx = core.context(v, r);
      handler(programs[v], ctx);
      return;
    }
    P snapshot = programs[v];
    Rng rng_snapshot = core.rng(v);
    const bool halted_before = core.halted(v);
    const std::size_t first_send = core.send_log_size();
    NodeContext ctx = core.context(v, r);
    handler(programs[v], ctx);
    NodeContext::Capture capture;
    NodeContext replay = core.capture_context(v, r, &rng_snapshot, &capture);
    handler(snapshot, replay);
    core.verify_replay(v, r, first_send, halted_before, capture);
  };

  for (NodeId v = 0; v < n; ++v) {
    invoke(v, 0, [](P& program, NodeContext& ctx) { program.initialize(ctx); });
  }
  Round r = 0;
  RunResult result;
  for (;;) {
    if (core.all_halted()) break;
    const Round next = core.next_round(r);
    if (next > options.round_limit) {
      result.status = RunStatus::timed_out;
      r = options.round_limit;
      break;
    }
    core.deliver(next);
    r = next;
    for (NodeId v = 0; v < n; ++v) {
      if (!core.should_run(v, r)) continue;
      core.mark_invoked(v, r);
      const auto inbox = core.inbox(v);
      invoke(v, r, [inbox](P& program, NodeContext& ctx) { program.on_round(ctx, inbox); });
    }
  }
  result.trace = std::move(core.trace());
  result.trace.rounds_elapsed = r;
  return result;
}

/// Runs and converts a timeout into a SimulationFault; for protocols whose
/// schedule guarantees termination.
template <NodeProgram P>
RoundTrace run_to_completion(const Graph& graph, std::vector<P>& programs, const RunOptions& options = {}) {
  RunResult result = run(graph, programs, options);
  if (!result.ok()) {
    throw SimulationFault("protocol did not terminate within the round limit", kNoNode, kNoNode,
                          options.round_limit);
  }
  return std::move(result.trace);
}

}  // namespace lcs
