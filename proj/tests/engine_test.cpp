#include <gtest/gtest.h>

#include <limits>

#include "lcs/congest.hpp"
#include "test_support.hpp"

namespace lcs {
namespace {

using testing::path_graph;
using testing::star_graph;

// Node 0 pushes a token down the path; everyone else forwards it once.
struct Flood {
  bool has = false;
  void initialize(NodeContext& ctx) {
    if (ctx.id() == 0) {
      forward(ctx, kNoNode);
    } else {
      ctx.sleep_until(std::numeric_limits<Round>::max());
    }
  }
  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    if (!inbox.empty() && !has) forward(ctx, inbox.front().from);
  }
  void forward(NodeContext& ctx, NodeId from) {
    has = true;
    for (const auto& inc : ctx.neighbors()) {
      if (inc.neighbor != from) ctx.send(inc.neighbor, Message().put(1, 1));
    }
    ctx.halt();
  }
};

// Center pings every leaf, leaves answer, center halts after all answers.
struct Echo {
  std::size_t replies = 0;
  void initialize(NodeContext& ctx) {
    if (ctx.id() == 0) {
      for (const auto& inc : ctx.neighbors()) ctx.send(inc.neighbor, Message().put(0, 1));
    }
    ctx.sleep_until(std::numeric_limits<Round>::max());
  }
  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    if (ctx.id() != 0) {
      ctx.send(0, Message().put(1, 1));
      ctx.halt();
      return;
    }
    replies += inbox.size();
    if (replies == ctx.neighbors().size()) ctx.halt();
  }
};

struct HaltAtOnce {
  void initialize(NodeContext& ctx) { ctx.halt(); }
  void on_round(NodeContext&, std::span<const Envelope>) {}
};

// Sends `width` bits to its first neighbor, optionally twice.
struct Sender {
  unsigned width = 1;
  bool twice = false;
  NodeId target = 1;
  void initialize(NodeContext& ctx) {
    if (ctx.id() == 0) {
      ctx.send(target, Message().put(0, width));
      if (twice) ctx.send(target, Message().put(0, width));
    }
    ctx.halt();
  }
  void on_round(NodeContext&, std::span<const Envelope>) {}
};

// Node 1 halts immediately; node 0 keeps sending to it for a few rounds.
struct DropProbe {
  std::size_t received = 0;
  void initialize(NodeContext& ctx) {
    if (ctx.id() == 1) ctx.halt();
  }
  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    received += inbox.size();
    if (ctx.id() == 0 && ctx.round() < 3) ctx.send(1, Message().put(1, 1));
    if (ctx.round() >= 4) ctx.halt();
  }
};

struct Sleeper {
  Round wake = 5;
  Round woke_at = 0;
  void initialize(NodeContext& ctx) { ctx.sleep_until(wake); }
  void on_round(NodeContext& ctx, std::span<const Envelope>) {
    woke_at = ctx.round();
    ctx.halt();
  }
};

struct Forever {
  void initialize(NodeContext& ctx) { ctx.sleep_until(std::numeric_limits<Round>::max()); }
  void on_round(NodeContext&, std::span<const Envelope>) {}
};

// Gossips random bits; exercises the per-node generators.
struct Gossip {
  void initialize(NodeContext& ctx) { step(ctx); }
  void on_round(NodeContext& ctx, std::span<const Envelope>) { step(ctx); }
  void step(NodeContext& ctx) {
    if (ctx.round() >= 6) {
      ctx.halt();
      return;
    }
    for (const auto& inc : ctx.neighbors()) {
      if (ctx.rng()() % 2) ctx.send(inc.neighbor, Message().put(ctx.rng()() % 8, 3));
    }
  }
};

int g_calls = 0;

// Sends a different message on the replayed call: impure on purpose.
struct Impure {
  void initialize(NodeContext& ctx) {
    if (ctx.id() == 0) ctx.send(1, Message().put(static_cast<std::uint64_t>(g_calls++ % 2), 1));
    ctx.halt();
  }
  void on_round(NodeContext&, std::span<const Envelope>) {}
};

TEST(Budget, LogarithmicInNodeCount) {
  EXPECT_EQ(id_bits(1), 1u);
  EXPECT_EQ(id_bits(4), 3u);
  EXPECT_EQ(id_bits(7), 3u);
  EXPECT_EQ(id_bits(8), 4u);
  EXPECT_EQ(message_budget(7), 4u * 3u);
  EXPECT_EQ(message_budget(1000), 4u * 10u);
  EXPECT_EQ(message_budget(1000, 2), 2u * 10u);
  EXPECT_THROW(message_budget(10, 0), InvalidInput);
}

TEST(MessageTest, FieldsRoundTrip) {
  Message m;
  m.put(5, 3).put(0, 1).put(1023, 10);
  EXPECT_EQ(m.field_count(), 3u);
  EXPECT_EQ(m.bit_length(), 14u);
  EXPECT_EQ(m.get(0), 5u);
  EXPECT_EQ(m.get(2), 1023u);
  EXPECT_THROW(m.put(8, 3), std::invalid_argument);
  EXPECT_THROW((void)m.get(3), std::out_of_range);
}

TEST(Engine, FloodOnPathTakesOneRoundPerHop) {
  const Graph g = path_graph(4);
  std::vector<Flood> programs(4);
  const auto result = run(g, programs);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result.trace.rounds_elapsed, 3u);
  EXPECT_EQ(result.trace.messages, 3u);
  for (const auto& p : programs) EXPECT_TRUE(p.has);
}

TEST(Engine, HaltingInInitializeTakesZeroRounds) {
  const Graph g = path_graph(5);
  std::vector<HaltAtOnce> programs(5);
  EXPECT_EQ(run(g, programs).trace.rounds_elapsed, 0u);
}

TEST(Engine, EchoOnStarTakesTwoRounds) {
  const Graph g = star_graph(5);
  std::vector<Echo> programs(5);
  const auto result = run(g, programs);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result.trace.rounds_elapsed, 2u);
  EXPECT_EQ(programs[0].replies, 4u);
  EXPECT_EQ(result.trace.messages, 8u);
}

TEST(Engine, RejectsSendToNonNeighbor) {
  const Graph g = path_graph(3);
  std::vector<Sender> programs(3, Sender{1, false, 2});
  EXPECT_THROW(run(g, programs), SimulationFault);
}

TEST(Engine, RejectsTwoMessagesOnOneEdgeInOneRound) {
  const Graph g = path_graph(3);
  std::vector<Sender> programs(3, Sender{1, true, 1});
  EXPECT_THROW(run(g, programs), SimulationFault);
}

TEST(Engine, RejectsMessagesOverBudget) {
  const Graph g = path_graph(5);
  const unsigned budget = message_budget(5);
  std::vector<Sender> ok(5, Sender{budget, false, 1});
  const auto result = run(g, ok);
  EXPECT_EQ(result.trace.max_bits_on_edge_per_round, budget);
  std::vector<Sender> over(5, Sender{budget + 1, false, 1});
  try {
    run(g, over);
    FAIL() << "oversized message accepted";
  } catch (const SimulationFault& fault) {
    EXPECT_EQ(fault.node(), 0u);
    EXPECT_EQ(fault.peer(), 1u);
    EXPECT_EQ(fault.round(), 0u);
  }
}

TEST(Engine, HaltedNodesDropIncomingMessages) {
  const Graph g = path_graph(2);
  std::vector<DropProbe> programs(2);
  const auto result = run(g, programs);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(programs[1].received, 0u);
  EXPECT_EQ(result.trace.messages, 2u);
}

TEST(Engine, SleepingNodeWakesOnSchedule) {
  const Graph g = path_graph(2);
  std::vector<Sleeper> programs{Sleeper{5}, Sleeper{9}};
  const auto result = run(g, programs);
  EXPECT_EQ(programs[0].woke_at, 5u);
  EXPECT_EQ(programs[1].woke_at, 9u);
  EXPECT_EQ(result.trace.rounds_elapsed, 9u);
}

TEST(Engine, DeadlockTimesOut) {
  const Graph g = path_graph(3);
  std::vector<Forever> programs(3);
  RunOptions options;
  options.round_limit = 50;
  const auto result = run(g, programs, options);
  EXPECT_EQ(result.status, RunStatus::timed_out);
  EXPECT_THROW(run_to_completion(g, programs, options), SimulationFault);
}

TEST(Engine, CausalityCheckCatchesImpureHandlers) {
  const Graph g = path_graph(2);
  std::vector<Impure> programs(2);
  RunOptions options;
  options.check_causality = true;
  EXPECT_THROW(run(g, programs, options), SimulationFault);
}

TEST(Engine, SameSeedGivesIdenticalTraces) {
  const auto inst = testing::grid_instance(5, 5, PartitionScheme::singletons, 1, 3);
  RunOptions options = testing::logged();
  options.seed = 77;
  std::vector<Gossip> a(inst.graph.node_count());
  std::vector<Gossip> b(inst.graph.node_count());
  const auto ra = run(inst.graph, a, options);
  const auto rb = run(inst.graph, b, options);
  EXPECT_EQ(ra.trace, rb.trace);
  options.seed = 78;
  std::vector<Gossip> c(inst.graph.node_count());
  EXPECT_NE(run(inst.graph, c, options).trace, ra.trace);
  options.check_causality = true;
  options.seed = 77;
  std::vector<Gossip> d(inst.graph.node_count());
  EXPECT_EQ(run(inst.graph, d, options).trace, ra.trace);
}

TEST(Trace, AppendShiftsRoundsAndChargesSlots) {
  RoundTrace first;
  first.rounds_elapsed = 3;
  first.log.push_back({1, 0, 1, 4});
  RoundTrace second;
  second.rounds_elapsed = 2;
  second.messages = 1;
  second.log.push_back({0, 1, 0, 5});
  first.append(second, 4);
  EXPECT_EQ(first.rounds_elapsed, 7u);
  ASSERT_EQ(first.log.size(), 2u);
  EXPECT_EQ(first.log[1].round, 3u);
  EXPECT_EQ(first.messages, 1u);
  RoundTrace third;
  third.rounds_elapsed = 6;
  EXPECT_THROW(first.append(third, 5), SimulationFault);
}

}  // namespace
}  // namespace lcs
