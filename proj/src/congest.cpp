#include "lcs/congest.hpp"

#include <bit>
#include <limits>

namespace lcs {

unsigned bits_for(std::uint64_t value) { return value == 0 ? 1U : static_cast<unsigned>(std::bit_width(value)); }

unsigned id_bits(std::size_t node_count) { return bits_for(node_count); }

unsigned message_budget(std::size_t node_count, unsigned kappa) {
  if (kappa == 0) throw InvalidInput("kappa must be positive");
  return kappa * id_bits(node_count);
}

Message& Message::put(std::uint64_t value, unsigned width) {
  if (count_ == kMaxFields) throw std::invalid_argument("message has too many fields");
  if (width == 0 || width > 64) throw std::invalid_argument("field width must be in 1..64");
  if (width < 64 && (value >> width) != 0) {
    throw std::invalid_argument("value " + std::to_string(value) + " does not fit in " + std::to_string(width) +
                                " bits");
  }
  values_[count_] = value;
  widths_[count_] = static_cast<std::uint8_t>(width);
  ++count_;
  bits_ += width;
  return *this;
}

std::uint64_t Message::get(std::size_t index) const {
  if (index >= count_) throw std::out_of_range("message field index");
  return values_[index];
}

bool operator==(const Message& a, const Message& b) {
  if (a.count_ != b.count_) return false;
  for (std::size_t i = 0; i < a.count_; ++i) {
    if (a.values_[i] != b.values_[i] || a.widths_[i] != b.widths_[i]) return false;
  }
  return true;
}

SimulationFault::SimulationFault(const std::string& what, NodeId node, NodeId peer, Round round)
    : std::runtime_error(what + " (node " + (node == kNoNode ? std::string("-") : std::to_string(node)) + ", peer " +
                         (peer == kNoNode ? std::string("-") : std::to_string(peer)) + ", round " +
                         std::to_string(round) + ")"),
      node_(node),
      peer_(peer),
      round_(round) {}

void RoundTrace::append(const RoundTrace& later, std::optional<Round> charged) {
  const Round length = charged.value_or(later.rounds_elapsed);
  if (length < later.rounds_elapsed) {
    throw SimulationFault("stage used " + std::to_string(later.rounds_elapsed) + " rounds but its slot is " +
                              std::to_string(length),
                          kNoNode, kNoNode, rounds_elapsed);
  }
  for (const auto& record : later.log) {
    MessageRecord shifted = record;
    shifted.round += rounds_elapsed;
    log.push_back(shifted);
  }
  rounds_elapsed += length;
  messages += later.messages;
  bits += later.bits;
  max_bits_on_edge_per_round = std::max(max_bits_on_edge_per_round, later.max_bits_on_edge_per_round);
  budget_bits = std::max(budget_bits, later.budget_bits);
}

std::size_t NodeContext::node_count() const { return core_->graph().node_count(); }

std::span<const Incidence> NodeContext::neighbors() const { return core_->graph().incident(id_); }

unsigned NodeContext::budget_bits() const { return core_->budget(); }

unsigned NodeContext::id_bits() const { return core_->id_width(); }

void NodeContext::send(NodeId neighbor, Message message) {
  if (capture_) {
    capture_->sends.emplace_back(neighbor, std::move(message));
    return;
  }
  core_->do_send(id_, neighbor, std::move(message), round_);
}

void NodeContext::halt() {
  if (capture_) {
    capture_->halted = true;
    return;
  }
  core_->do_halt(id_);
}

void NodeContext::sleep_until(Round round) {
  if (capture_) return;
  core_->do_sleep(id_, round);
}

EngineCore::EngineCore(const Graph& graph, const RunOptions& options)
    : graph_(graph),
      options_(options),
      budget_(message_budget(graph.node_count(), options.kappa)),
      id_width_(id_bits(graph.node_count())),
      live_(graph.node_count()),
      halted_(graph.node_count(), 0),
      wake_(graph.node_count(), 1),
      last_send_(graph.node_count()),
      inbox_(graph.node_count()),
      next_inbox_(graph.node_count()) {
  const std::size_t n = graph.node_count();
  rngs_.reserve(n);
  for (NodeId v = 0; v < n; ++v) {
    rngs_.emplace_back(derive_seed(options.seed, v, 0x6e6f6465ULL));
    last_send_[v].assign(graph.degree(v), std::numeric_limits<Round>::max());
  }
  trace_.budget_bits = budget_;
}

Round EngineCore::next_round(Round current) const {
  if (in_flight_ > 0) return current + 1;
  Round next = std::numeric_limits<Round>::max();
  for (NodeId v = 0; v < halted_.size(); ++v) {
    if (!halted_[v]) next = std::min(next, wake_[v]);
  }
  return std::max(next, current + 1);
}

void EngineCore::deliver(Round) {
  for (NodeId v = 0; v < inbox_.size(); ++v) {
    inbox_[v].clear();
    if (halted_[v]) {
      next_inbox_[v].clear();
      continue;
    }
    std::swap(inbox_[v], next_inbox_[v]);
    std::sort(inbox_[v].begin(), inbox_[v].end(),
              [](const Envelope& a, const Envelope& b) { return a.from < b.from; });
  }
  in_flight_ = 0;
  round_sends_.clear();
}

void EngineCore::do_send(NodeId from, NodeId to, Message message, Round round) {
  const auto adjacency = graph_.incident(from);
  const auto it = std::lower_bound(adjacency.begin(), adjacency.end(), to,
                                   [](const Incidence& inc, NodeId target) { return inc.neighbor < target; });
  if (it == adjacency.end() || it->neighbor != to) {
    throw SimulationFault("send to a non-neighbor", from, to, round);
  }
  if (halted_[from]) throw SimulationFault("halted node attempted to send", from, to, round);
  const auto slot = static_cast<std::size_t>(it - adjacency.begin());
  if (last_send_[from][slot] == round) {
    throw SimulationFault("more than one message on one edge in one round", from, to, round);
  }
  const unsigned bits = message.bit_length();
  if (bits > budget_) {
    throw SimulationFault("message of " + std::to_string(bits) + " bits exceeds the budget of " +
                              std::to_string(budget_) + " bits",
                          from, to, round);
  }
  last_send_[from][slot] = round;
  ++trace_.messages;
  trace_.bits += bits;
  trace_.max_bits_on_edge_per_round = std::max(trace_.max_bits_on_edge_per_round, bits);
  if (options_.log_messages) trace_.log.push_back({round, from, to, bits});
  if (options_.check_causality) round_sends_.emplace_back(from, to, message);
  next_inbox_[to].push_back({from, std::move(message)});
  ++in_flight_;
}

void EngineCore::do_halt(NodeId v) {
  if (!halted_[v]) {
    halted_[v] = 1;
    --live_;
  }
}

void EngineCore::do_sleep(NodeId v, Round round) { wake_[v] = std::max(wake_[v], round); }

std::vector<std::pair<NodeId, Message>> EngineCore::sends_of(NodeId v, std::size_t from_index) const {
  std::vector<std::pair<NodeId, Message>> out;
  for (std::size_t i = from_index; i < round_sends_.size(); ++i) {
    const auto& [from, to, message] = round_sends_[i];
    if (from == v) out.emplace_back(to, message);
  }
  return out;
}

void EngineCore::verify_replay(NodeId v, Round r, std::size_t first_send, bool halted_before,
                               const NodeContext::Capture& replay) const {
  const auto actual = sends_of(v, first_send);
  if (actual != replay.sends) {
    throw SimulationFault("handler output is not a function of its state and inbox", v, kNoNode, r);
  }
  const bool halted_now = halted_[v] != 0;
  if ((halted_now && !halted_before) != replay.halted) {
    throw SimulationFault("halting decision differs on replay", v, kNoNode, r);
  }
}

}  // namespace lcs
