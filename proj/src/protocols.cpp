#include "lcs/protocols.hpp"

#include <algorithm>

namespace lcs {

std::uint64_t combine(Aggregate op, std::uint64_t a, std::uint64_t b) {
  switch (op) {
    case Aggregate::min:
      return std::min(a, b);
    case Aggregate::max:
      return std::max(a, b);
    case Aggregate::sum:
      return a + b;
  }
  return a;
}

std::optional<std::uint64_t> combine(Aggregate op, std::optional<std::uint64_t> a, std::optional<std::uint64_t> b) {
  if (!a) return b;
  if (!b) return a;
  return combine(op, *a, *b);
}

SharedRandomness::SharedRandomness(std::vector<std::uint64_t> words, std::size_t bit_count)
    : words_(std::move(words)), bit_count_(bit_count) {
  if (bit_count_ == 0 || bit_count_ > 64 * words_.size()) throw InvalidInput("seed bit count out of range");
  if (bit_count_ % 64 != 0) words_.back() &= (std::uint64_t{1} << (bit_count_ % 64)) - 1;
}

SharedRandomness SharedRandomness::from_seed(std::uint64_t seed, std::size_t node_count) {
  const std::size_t log_n = id_bits(node_count);
  const std::size_t bits = std::max<std::size_t>(64, log_n * log_n);
  std::vector<std::uint64_t> words((bits + 63) / 64);
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = derive_seed(seed, i, 0x73656564ULL);
  return SharedRandomness(std::move(words), bits);
}

std::uint64_t SharedRandomness::digest() const {
  std::uint64_t h = mix64(bit_count_);
  for (auto w : words_) h = mix64(h ^ w);
  return h;
}

Rng SharedRandomness::stream(std::uint64_t part, std::uint64_t salt) const {
  return Rng(derive_seed(digest(), part, salt));
}

double SharedRandomness::unit(std::uint64_t part, std::uint64_t salt) const {
  Rng rng = stream(part, salt);
  return uniform_unit(rng);
}

namespace {

std::uint64_t extract_bits(std::span<const std::uint64_t> words, std::size_t offset, unsigned width) {
  std::uint64_t out = 0;
  for (unsigned i = 0; i < width; ++i) {
    const std::size_t bit = offset + i;
    out |= ((words[bit / 64] >> (bit % 64)) & 1ULL) << i;
  }
  return out;
}

void deposit_bits(std::vector<std::uint64_t>& words, std::size_t offset, unsigned width, std::uint64_t value) {
  for (unsigned i = 0; i < width; ++i) {
    const std::size_t bit = offset + i;
    if ((value >> i) & 1ULL) words[bit / 64] |= 1ULL << (bit % 64);
  }
}

class SeedBroadcast {
 public:
  SeedBroadcast(const RootedTree* tree, std::span<const std::uint64_t> seed_words, std::size_t bit_count,
                bool is_root)
      : tree_(tree), bit_count_(bit_count), words_((bit_count + 63) / 64, 0) {
    if (is_root) std::copy(seed_words.begin(), seed_words.end(), words_.begin());
  }

  void initialize(NodeContext& ctx) {
    chunk_ = std::min(ctx.budget_bits(), 64U);
    chunks_ = (bit_count_ + chunk_ - 1) / chunk_;
    if (ctx.id() == tree_->root()) {
      have_ = chunks_;
      forward(ctx, 0);
      next_ = 1;
      if (next_ >= chunks_ || tree_->children(ctx.id()).empty()) ctx.halt();
    }
  }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    if (ctx.id() == tree_->root()) {
      forward(ctx, next_++);
      if (next_ >= chunks_) ctx.halt();
      return;
    }
    for (const auto& env : inbox) {
      if (env.from != tree_->parent(ctx.id())) continue;
      const unsigned width = width_of(have_);
      deposit_bits(words_, have_ * chunk_, width, env.message.get(0));
      forward(ctx, have_);
      ++have_;
    }
    if (have_ == chunks_) ctx.halt();
  }

  SharedRandomness result() const { return SharedRandomness(words_, bit_count_); }

 private:
  unsigned width_of(std::size_t index) const {
    return static_cast<unsigned>(std::min<std::size_t>(chunk_, bit_count_ - index * chunk_));
  }

  void forward(NodeContext& ctx, std::size_t index) {
    const unsigned width = width_of(index);
    const std::uint64_t value = extract_bits(words_, index * chunk_, width);
    for (NodeId child : tree_->children(ctx.id())) ctx.send(child, Message().put(value, width));
  }

  const RootedTree* tree_;
  std::size_t bit_count_;
  std::vector<std::uint64_t> words_;
  unsigned chunk_ = 64;
  std::size_t chunks_ = 0;
  std::size_t have_ = 0;
  std::size_t next_ = 0;
};

class BfsFlood {
 public:
  explicit BfsFlood(NodeId root) : root_(root) {}

  void initialize(NodeContext& ctx) {
    if (ctx.id() != root_) return;
    depth_ = 0;
    for (const auto& inc : ctx.neighbors()) ctx.send(inc.neighbor, Message().put(1, 1));
    ctx.halt();
  }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    if (inbox.empty()) return;
    parent_ = inbox.front().from;  // inbox is sorted by sender
    depth_ = static_cast<std::uint32_t>(ctx.round());
    for (const auto& inc : ctx.neighbors()) {
      if (inc.neighbor != parent_) ctx.send(inc.neighbor, Message().put(1, 1));
    }
    ctx.halt();
  }

  NodeId parent() const { return parent_; }

 private:
  NodeId root_;
  NodeId parent_ = kNoNode;
  std::uint32_t depth_ = 0;
};

class AllReduce {
 public:
  AllReduce(const RootedTree* tree, std::optional<std::uint64_t> own, Aggregate op)
      : tree_(tree), op_(op), value_(own) {}

  void initialize(NodeContext& ctx) {
    pending_ = tree_->children(ctx.id()).size();
    if (pending_ == 0) finish_up(ctx);
  }

  void on_round(NodeContext& ctx, std::span<const Envelope> inbox) {
    const NodeId self = ctx.id();
    for (const auto& env : inbox) {
      const bool present = env.message.get(0) != 0;
      const std::optional<std::uint64_t> value =
          present ? std::optional<std::uint64_t>(env.message.get(1)) : std::nullopt;
      if (env.from == tree_->parent(self)) {
        value_ = value;
        send_down(ctx);
        ctx.halt();
        return;
      }
      value_ = combine(op_, value_, value);
      --pending_;
    }
    if (pending_ == 0 && !sent_up_) finish_up(ctx);
  }

  std::optional<std::uint64_t> value() const { return value_; }

 private:
  static Message encode(std::optional<std::uint64_t> v) {
    Message m;
    m.put(v ? 1 : 0, 1);
    m.put(v.value_or(0), bits_for(v.value_or(0)));
    return m;
  }

  void finish_up(NodeContext& ctx) {
    sent_up_ = true;
    if (ctx.id() == tree_->root()) {
      send_down(ctx);
      ctx.halt();
      return;
    }
    ctx.send(tree_->parent(ctx.id()), encode(value_));
  }

  void send_down(NodeContext& ctx) {
    for (NodeId child : tree_->children(ctx.id())) ctx.send(child, encode(value_));
  }

  const RootedTree* tree_;
  Aggregate op_;
  std::optional<std::uint64_t> value_;
  std::size_t pending_ = 0;
  bool sent_up_ = false;
};

}  // namespace

SeedDistribution distribute_seed(const Graph& graph, const RootedTree& tree, const SharedRandomness& seed,
                                 const RunOptions& options) {
  std::vector<SeedBroadcast> programs;
  programs.reserve(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    programs.emplace_back(&tree, seed.words(), seed.bit_count(), v == tree.root());
  }
  SeedDistribution out;
  out.trace = run_to_completion(graph, programs, options);
  out.received.reserve(programs.size());
  for (const auto& p : programs) out.received.push_back(p.result());
  return out;
}

BfsResult distributed_bfs_tree(const Graph& graph, NodeId root, const RunOptions& options) {
  if (root >= graph.node_count()) throw InvalidInput("root out of range");
  if (!graph.connected()) throw InvalidInput("graph is disconnected");
  std::vector<BfsFlood> programs(graph.node_count(), BfsFlood(root));
  RoundTrace trace = run_to_completion(graph, programs, options);
  std::vector<NodeId> parent(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) parent[v] = programs[v].parent();
  return {RootedTree::from_parents(graph, root, std::move(parent)), std::move(trace)};
}

TreeReduction tree_allreduce(const Graph& graph, const RootedTree& tree,
                             std::span<const std::optional<std::uint64_t>> values, Aggregate op,
                             const RunOptions& options) {
  if (values.size() != graph.node_count()) throw InvalidInput("need one value slot per node");
  std::vector<AllReduce> programs;
  programs.reserve(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) programs.emplace_back(&tree, values[v], op);
  TreeReduction out;
  out.trace = run_to_completion(graph, programs, options);
  for (const auto& p : programs) out.at_node.push_back(p.value());
  return out;
}

}  // namespace lcs
