// Command-line driver: instance generation, shortcut construction, quality
// checks, MST runs and exhaustive audits. Results go out as JSON.
//
// Exit codes: 0 success, 1 input error, 2 algorithmic failure.

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "lcs/construction.hpp"
#include "lcs/generators.hpp"
#include "lcs/graph.hpp"
#include "lcs/mst.hpp"
#include "lcs/oracle.hpp"
#include "lcs/shortcut.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace lcs;

constexpr int kSchema = 1;
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitFailure = 2;

struct SourceFlags {
  std::string instance;
  std::string partition;
  std::string spec;
  std::string family = "grid";
  std::uint32_t size = 6;
  std::uint32_t width = 0;
  std::optional<std::uint32_t> chords;
  std::string scheme = "singletons";
  std::uint32_t k = 1;
  std::string weights = "unit";
  NodeId root = 0;
};

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string trace;
};

void add_source(CLI::App* app, SourceFlags& s) {
  app->add_option("--instance", s.instance, "graph file (\"n m\" then \"u v [w]\" lines)");
  app->add_option("--partition", s.partition, "partition file, one part per line");
  app->add_option("--spec", s.spec, "instance spec as inline JSON or a JSON file");
  app->add_option("--family", s.family, "path|star|grid|torus-grid|random-planar-triangulation|random-tree-plus-chords");
  app->add_option("--size", s.size, "node count, or rows for grid families");
  app->add_option("--width", s.width, "columns for grid families (0: square)");
  app->add_option("--chords", s.chords, "extra edges for random-tree-plus-chords");
  app->add_option("--scheme", s.scheme, "singletons|rows|bfs-balls|random-connected");
  app->add_option("--k", s.k, "ball radius or part count");
  app->add_option("--weights", s.weights, "unit|uniform-distinct");
  app->add_option("--root", s.root, "tree root");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

InstanceSpec spec_from(const SourceFlags& s, std::uint64_t seed) {
  InstanceSpec spec;
  spec.family = parse_family(s.family);
  spec.size = s.size;
  spec.width = s.width;
  spec.chords = s.chords;
  spec.partition = parse_partition_scheme(s.scheme);
  spec.k = s.k;
  spec.weights = parse_weight_scheme(s.weights);
  spec.seed = seed;
  if (s.spec.empty()) return spec;
  const std::string text = s.spec.front() == '{' ? s.spec : slurp(s.spec);
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InvalidInput("spec is not a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "family") {
        spec.family = parse_family(value.get<std::string>());
      } else if (key == "size") {
        spec.size = value.get<std::uint32_t>();
      } else if (key == "width") {
        spec.width = value.get<std::uint32_t>();
      } else if (key == "chords") {
        spec.chords = value.get<std::uint32_t>();
      } else if (key == "partition") {
        spec.partition = parse_partition_scheme(value.get<std::string>());
      } else if (key == "k") {
        spec.k = value.get<std::uint32_t>();
      } else if (key == "weights") {
        spec.weights = parse_weight_scheme(value.get<std::string>());
      } else if (key == "seed") {
        throw InvalidInput("give the seed with --seed so it is recorded with the result");
      } else {
        throw InvalidInput("unknown spec field '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad spec field: ") + e.what());
  }
  return spec;
}

Instance load_instance(const SourceFlags& s, std::uint64_t seed) {
  Instance inst;
  if (!s.instance.empty()) {
    inst.graph = load_graph(s.instance);
    inst.partition =
        s.partition.empty() ? Partition::singletons(inst.graph.node_count()) : load_partition(s.partition, inst.graph.node_count());
  } else {
    inst = generate(spec_from(s, seed));
  }
  if (inst.graph.node_count() == 0) throw InvalidInput("empty graph");
  if (!inst.graph.connected()) throw InvalidInput("graph is not connected");
  if (s.root >= inst.graph.node_count()) throw InvalidInput("root out of range");
  inst.root = s.root;
  require_valid_partition(inst.graph, inst.partition);
  return inst;
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << j.dump(2) << '\n';
}

void dump_trace(const RoundTrace& trace, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  for (const auto& m : trace.log) out << m.round << ' ' << m.sender << ' ' << m.receiver << ' ' << m.bits << '\n';
}

json trace_json(const RoundTrace& trace) {
  return {{"rounds", trace.rounds_elapsed},
          {"messages", trace.messages},
          {"bits", trace.bits},
          {"max_bits_on_edge_per_round", trace.max_bits_on_edge_per_round},
          {"budget_bits", trace.budget_bits}};
}

json quality_json(const QualityReport& q, std::uint32_t depth) {
  return {{"c_measured", q.shortcut_congestion},
          {"congestion_with_part_edges", q.congestion},
          {"b_measured", q.block_parameter},
          {"d_measured", q.dilation},
          {"tree_depth", depth},
          {"per_part_blocks", q.per_part_blocks}};
}

json header(const char* command, std::uint64_t seed, const Instance& inst) {
  return {{"schema", kSchema},
          {"command", command},
          {"seed", seed},
          {"nodes", inst.graph.node_count()},
          {"edges", inst.graph.edge_count()},
          {"parts", inst.partition.part_count()},
          {"root", inst.root}};
}

RunOptions run_options(const Common& common) {
  RunOptions run;
  run.seed = common.seed;
  run.log_messages = !common.trace.empty();
  return run;
}

struct GenerateFlags {
  SourceFlags source;
  Common common;
};

int cmd_generate(const GenerateFlags& f) {
  const auto inst = generate(spec_from(f.source, f.common.seed));
  if (!f.common.out.empty()) {
    std::ofstream graph_out(f.common.out + ".graph");
    std::ofstream part_out(f.common.out + ".part");
    if (!graph_out || !part_out) throw InvalidInput("cannot write under " + f.common.out);
    write_graph(graph_out, inst.graph);
    write_partition(part_out, inst.partition);
  }
  json j = header("generate", f.common.seed, inst);
  if (!f.common.out.empty()) {
    j["graph_file"] = f.common.out + ".graph";
    j["partition_file"] = f.common.out + ".part";
  }
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

struct ConstructFlags {
  SourceFlags source;
  Common common;
  std::string mode = "find";
  std::uint32_t c = 1;
  std::uint32_t b = 1;
  double gamma = kDefaultGamma;
  std::uint32_t max_iterations = 0;
  std::string shortcut_out;
};

int cmd_construct(const ConstructFlags& f) {
  const auto inst = load_instance(f.source, f.common.seed);
  const auto tree = bfs_tree(inst.graph, inst.root);
  const RunOptions run = run_options(f.common);
  json j = header("construct", f.common.seed, inst);
  j["mode"] = f.mode;
  j["c"] = f.c;
  j["b"] = f.b;
  j["gamma"] = f.gamma;

  Shortcut shortcut;
  RoundTrace trace;
  bool success = true;
  if (f.mode == "slow") {
    CoreSlowOptions options;
    options.run = run;
    auto core = core_slow(inst.graph, tree, inst.partition, f.c, options);
    shortcut = std::move(core.shortcut);
    trace = std::move(core.trace);
    j["iterations"] = 1;
  } else if (f.mode == "fast") {
    CoreFastOptions options;
    options.gamma = f.gamma;
    options.run = run;
    const auto randomness = SharedRandomness::from_seed(f.common.seed, inst.graph.node_count());
    auto core = core_fast(inst.graph, tree, inst.partition, f.c, randomness, options);
    j["probability"] = core.probability;
    j["threshold"] = core.threshold;
    shortcut = std::move(core.shortcut);
    trace = std::move(core.trace);
    j["iterations"] = 1;
  } else if (f.mode == "find" || f.mode == "doubling") {
    FindOptions options;
    options.gamma = f.gamma;
    options.max_iterations = f.max_iterations;
    options.seed = f.common.seed;
    options.run = run;
    FindResult found;
    if (f.mode == "find") {
      found = find_shortcut(inst.graph, tree, inst.partition, f.c, f.b, options);
    } else {
      auto doubled = find_shortcut_doubling(inst.graph, tree, inst.partition, f.c, f.b, options);
      json attempts = json::array();
      for (const auto& a : doubled.attempts) {
        attempts.push_back({{"c", a.c}, {"b", a.b}, {"success", a.success}, {"iterations", a.iterations},
                            {"rounds", a.rounds}});
      }
      j["attempts"] = attempts;
      j["accepted_c"] = doubled.c;
      j["accepted_b"] = doubled.b;
      found = std::move(doubled.last);
      found.trace = std::move(doubled.trace);
      found.success = doubled.success;
    }
    success = found.success;
    j["iterations"] = found.iterations;
    j["unresolved"] = found.unresolved;
    shortcut = std::move(found.shortcut);
    trace = std::move(found.trace);
  } else {
    throw InvalidInput("unknown mode '" + f.mode + "'");
  }

  const auto q = measure_quality(inst.graph, inst.partition, shortcut);
  j["success"] = success;
  j.update(quality_json(q, tree.max_depth()));
  j["trace"] = trace_json(trace);
  j["rounds"] = trace.rounds_elapsed;
  if (!f.shortcut_out.empty()) {
    std::ofstream out(f.shortcut_out);
    if (!out) throw InvalidInput("cannot write " + f.shortcut_out);
    write_shortcut(out, shortcut);
  }
  dump_trace(trace, f.common.trace);
  emit(j, f.common.out);
  return success ? kExitOk : kExitFailure;
}

struct VerifyFlags {
  SourceFlags source;
  Common common;
  std::string shortcut;
  std::optional<std::uint32_t> b_limit;
};

int cmd_verify(const VerifyFlags& f) {
  const auto inst = load_instance(f.source, f.common.seed);
  const auto tree = bfs_tree(inst.graph, inst.root);
  std::ifstream in(f.shortcut);
  if (!in) throw InvalidInput("cannot open " + f.shortcut);
  const auto shortcut = read_shortcut(in, tree, inst.partition.part_count());
  const auto q = measure_quality(inst.graph, inst.partition, shortcut);
  json j = header("verify-quality", f.common.seed, inst);
  j.update(quality_json(q, tree.max_depth()));
  bool success = true;
  if (f.b_limit) {
    const auto v = verification(inst.graph, tree, inst.partition, shortcut, *f.b_limit, {}, run_options(f.common));
    json good = json::array();
    for (char g : v.good) {
      good.push_back(g != 0);
      success = success && g != 0;
    }
    j["b_limit"] = *f.b_limit;
    j["good"] = good;
    j["learned_congestion"] = v.congestion;
    j["trace"] = trace_json(v.trace);
    dump_trace(v.trace, f.common.trace);
  }
  j["success"] = success;
  emit(j, f.common.out);
  return success ? kExitOk : kExitFailure;
}

struct MstFlags {
  SourceFlags source;
  Common common;
  bool tie_break = false;
  double gamma = kDefaultGamma;
  std::string csv;
};

int cmd_mst(const MstFlags& f) {
  const auto inst = load_instance(f.source, f.common.seed);
  MstOptions options;
  options.seed = f.common.seed;
  options.tie_break = f.tie_break;
  options.gamma = f.gamma;
  options.run = run_options(f.common);
  const auto mst = boruvka_mst(inst.graph, inst.root, options);
  json j = header("mst", f.common.seed, inst);
  j["success"] = mst.success;
  j["weight"] = mst.weight;
  j["phases"] = mst.phases;
  j["total_rounds"] = mst.trace.rounds_elapsed;
  j["edges_selected"] = mst.edges.size();
  j["trace"] = trace_json(mst.trace);
  json phases = json::array();
  for (const auto& p : mst.per_phase) {
    phases.push_back({{"phase", p.phase}, {"parts", p.parts}, {"c", p.c}, {"b", p.b}, {"trials", p.trials},
                      {"merges", p.merges}, {"rounds", p.rounds}});
  }
  j["per_phase"] = phases;
  if (!f.csv.empty()) {
    std::ofstream out(f.csv);
    if (!out) throw InvalidInput("cannot write " + f.csv);
    out << "phase,parts,c,b,rounds\n";
    for (const auto& p : mst.per_phase) out << p.phase << ',' << p.parts << ',' << p.c << ',' << p.b << ',' << p.rounds << '\n';
  }
  dump_trace(mst.trace, f.common.trace);
  emit(j, f.common.out);
  return mst.success ? kExitOk : kExitFailure;
}

struct AuditFlags {
  SourceFlags source;
  Common common;
  bool kruskal = false;
};

int cmd_audit(const AuditFlags& f) {
  const auto inst = load_instance(f.source, f.common.seed);
  if (f.kruskal) {
    const auto mst = oracle::kruskal(inst.graph);
    json j = header("audit", f.common.seed, inst);
    j["kruskal_weight"] = mst.weight;
    j["kruskal_edges"] = mst.edges;
    emit(j, f.common.out);
    return kExitOk;
  }
  const auto tree = bfs_tree(inst.graph, inst.root);
  const auto cert = oracle::exhaustive_best_shortcut(inst.graph, tree, inst.partition);
  json j = json::parse(oracle::certificate_to_json(cert));
  j["schema"] = kSchema;
  j["seed"] = f.common.seed;
  emit(j, f.common.out);
  return kExitOk;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "seed for generation and randomized steps");
  app->add_option("--out", c.out, "output path (JSON result, or file prefix for generate)");
  app->add_option("--trace", c.trace, "write one \"round sender receiver bits\" line per message");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-congestion shortcut experiments"};
  app.require_subcommand(1);

  GenerateFlags gen;
  auto* generate_cmd = app.add_subcommand("generate", "write a seeded instance");
  add_source(generate_cmd, gen.source);
  add_common(generate_cmd, gen.common);

  ConstructFlags con;
  auto* construct_cmd = app.add_subcommand("construct", "build a shortcut and report its quality");
  add_source(construct_cmd, con.source);
  add_common(construct_cmd, con.common);
  construct_cmd->add_option("--mode", con.mode, "slow|fast|find|doubling")
      ->check(CLI::IsMember({"slow", "fast", "find", "doubling"}));
  construct_cmd->add_option("--c", con.c, "congestion guess");
  construct_cmd->add_option("--b", con.b, "block guess");
  construct_cmd->add_option("--gamma", con.gamma, "sampling constant");
  construct_cmd->add_option("--max-iter", con.max_iterations, "iteration cap (0: default)");
  construct_cmd->add_option("--shortcut-out", con.shortcut_out, "write the shortcut");

  VerifyFlags ver;
  auto* verify_cmd = app.add_subcommand("verify-quality", "measure a stored shortcut");
  add_source(verify_cmd, ver.source);
  add_common(verify_cmd, ver.common);
  verify_cmd->add_option("--shortcut", ver.shortcut, "shortcut file")->required();
  verify_cmd->add_option("--b-limit", ver.b_limit, "also run distributed verification with this block limit");

  MstFlags mst;
  auto* mst_cmd = app.add_subcommand("mst", "run the shortcut-based MST");
  add_source(mst_cmd, mst.source);
  add_common(mst_cmd, mst.common);
  mst_cmd->add_flag("--tie-break", mst.tie_break, "order equal weights by endpoint IDs");
  mst_cmd->add_option("--gamma", mst.gamma, "sampling constant");
  mst_cmd->add_option("--csv", mst.csv, "per-phase metrics CSV");

  AuditFlags aud;
  auto* audit_cmd = app.add_subcommand("audit", "exhaustive (c, b) frontier of a tiny instance");
  add_source(audit_cmd, aud.source);
  add_common(audit_cmd, aud.common);
  audit_cmd->add_flag("--kruskal", aud.kruskal, "report the Kruskal MST instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen);
    if (*construct_cmd) return cmd_construct(con);
    if (*verify_cmd) return cmd_verify(ver);
    if (*mst_cmd) return cmd_mst(mst);
    if (*audit_cmd) return cmd_audit(aud);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const SimulationFault& e) {
    std::cerr << "simulation fault: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
