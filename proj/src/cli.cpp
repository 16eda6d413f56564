#include "coa/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "coa/attack_graph.hpp"
#include "coa/config.hpp"
#include "coa/error.hpp"
#include "coa/export.hpp"
#include "coa/report.hpp"
#include "coa/scoring.hpp"
#include "coa/search.hpp"
#include "coa/temporal.hpp"

namespace coa::cli {

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::string> vertices, arcs, vulndb, out, dot, heuristic, edge_weight;
  std::optional<VertexId> source, target;
  std::optional<bool> strict_cve;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  bool no_reverse = false;
  bool strict_goal = false;
  bool timing = false;
};

void add_common(CLI::App& cmd, Flags& f) {
  cmd.add_option("-c,--config", f.config_path, "Run configuration file (TOML-style)");
  cmd.add_option("--vertices", f.vertices, "MULVAL VERTICES.CSV");
  cmd.add_option("--arcs", f.arcs, "MULVAL ARCS.CSV");
  cmd.add_option("--vulndb", f.vulndb, "Vulnerability records (JSON array or CSV)");
  cmd.add_option("--source", f.source, "Attack source vertex id");
  cmd.add_option("--target", f.target, "Attack target vertex id");
  cmd.add_option("--heuristic", f.heuristic, "reachable-sum | dp-exact")
      ->check(CLI::IsMember({"reachable-sum", "dp-exact"}));
  cmd.add_option("--edge-weight", f.edge_weight, "src | dst | avg")->check(CLI::IsMember({"src", "dst", "avg"}));
  cmd.add_flag("--strict-cve,!--lenient-cve", f.strict_cve, "Fail on vulExists nodes without a CVE record");
  cmd.add_option("--seed", f.seed, "Seed for the temporal model and MCTS");
  cmd.add_option("--out", f.out, "Report (or DOT, for export) output file; stdout if omitted");
  cmd.add_option("--dot", f.dot, "Also write a Graphviz rendering here");
  cmd.add_flag("--no-reverse-arcs", f.no_reverse, "ARCS.CSV is already in src,dst order");
}

std::string read_file(const std::string& path, const char* what) {
  if (path.empty()) throw ValidationError(std::string("no ") + what + " file given");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(std::string("cannot open ") + what + " file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

// Errors from a named input file get the path prepended.
template <typename Fn>
auto with_file_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  } catch (const DuplicateIdError& e) {
    throw DuplicateIdError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

RunConfig resolve(const Flags& f) {
  RunConfig rc;
  if (!f.config_path.empty()) {
    const std::string text = read_file(f.config_path, "config");
    const ConfigFile file = with_file_context(f.config_path, [&] { return ConfigFile::parse(text); });
    apply_config_file(file, std::filesystem::path(f.config_path).parent_path().string(), rc);
  }
  if (f.vertices) rc.vertices_path = *f.vertices;
  if (f.arcs) rc.arcs_path = *f.arcs;
  if (f.vulndb) rc.vulndb_path = *f.vulndb;
  if (f.out) rc.output_path = *f.out;
  if (f.dot) rc.dot_path = *f.dot;
  if (f.source) rc.source = *f.source;
  if (f.target) rc.target = *f.target;
  if (f.heuristic) rc.heuristic = *parse_heuristic_mode(*f.heuristic);
  if (f.edge_weight) rc.edge_weight = *parse_edge_weight_mode(*f.edge_weight);
  if (f.strict_cve) rc.scoring.strict_cve = *f.strict_cve;
  if (f.no_reverse) rc.reverse_arcs = false;
  if (f.timing) rc.timing = true;
  if (f.seed) {
    if (rc.temporal) rc.temporal->seed = *f.seed;
    if (rc.mcts) rc.mcts->seed = *f.seed;
  }
  if (f.iterations && rc.mcts) rc.mcts->iterations = *f.iterations;
  if (f.strict_goal && rc.mcts) rc.mcts->strict_goal = true;
  if (rc.source && rc.target && *rc.source == *rc.target) throw ValidationError("source and target must differ");
  return rc;
}

struct Loaded {
  std::shared_ptr<const AttackGraph> graph;
  std::optional<VulnDb> db;
};

Loaded load_inputs(const RunConfig& rc) {
  const std::string vtext = read_file(rc.vertices_path, "vertices");
  const std::string atext = read_file(rc.arcs_path, "arcs");
  auto vertices = with_file_context(rc.vertices_path, [&] { return parse_vertices(vtext); });
  auto arcs = with_file_context(rc.arcs_path, [&] { return parse_arcs(atext, rc.reverse_arcs); });
  Loaded l;
  l.graph = std::make_shared<const AttackGraph>(AttackGraph::build(std::move(vertices), std::move(arcs)));
  if (!rc.vulndb_path.empty()) {
    const std::string dtext = read_file(rc.vulndb_path, "vulnerability database");
    l.db = with_file_context(rc.vulndb_path, [&] { return load_vuln_db(dtext); });
  }
  return l;
}

std::pair<VertexId, VertexId> require_query(const RunConfig& rc, const char* command) {
  if (!rc.source || !rc.target)
    throw ValidationError(std::string(command) + " needs a source and a target (--source/--target or [query])");
  return {*rc.source, *rc.target};
}

WeightedGraph score(const Loaded& l, const RunConfig& rc, VertexId source, VertexId target) {
  ScoreAssignment scores = assign_node_scores(*l.graph, l.db.value_or(VulnDb{}), source, target, rc.scoring);
  return edge_weights(l.graph, std::move(scores), rc.edge_weight);
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file(path, content);
  }
}

ReportContext context(const RunConfig& rc, const WeightedGraph& wg, const char* command) {
  ReportContext ctx;
  ctx.command = command;
  ctx.source = wg.scores.source;
  ctx.target = wg.scores.target;
  ctx.edge_weight = rc.edge_weight;
  ctx.include_timing = rc.timing;
  ctx.warnings = wg.scores.warnings;
  return ctx;
}

int cmd_plan(const RunConfig& rc, std::ostream& out) {
  const auto [source, target] = require_query(rc, "plan");
  const Loaded l = load_inputs(rc);
  const WeightedGraph wg = score(l, rc, source, target);
  const SearchResult result = plan(wg, source, target, PlanOptions{rc.heuristic, false});
  emit(rc.output_path, dump_report(search_report(result, context(rc, wg, "plan"))), out);
  if (!rc.dot_path.empty()) write_file(rc.dot_path, export_dot(*wg.graph, &wg.scores, result.path));
  return kOk;
}

int cmd_temporal(const RunConfig& rc, std::ostream& out) {
  const auto [source, target] = require_query(rc, "temporal");
  if (!rc.temporal) throw ValidationError("temporal needs a [temporal] section in the config");
  if (!rc.mcts) throw ValidationError("temporal needs an [mcts] section in the config");
  const Loaded l = load_inputs(rc);
  const TimeVaryingModel model = build_model(score(l, rc, source, target), *rc.temporal);
  const Comparison c = compare(model, source, target, *rc.mcts, rc.temporal->trials, rc.heuristic);
  const Json report = temporal_report(c, model, *rc.mcts, rc.temporal->trials, rc.temporal->default_availability,
                                      context(rc, model.base, "temporal"));
  emit(rc.output_path, dump_report(report), out);
  if (!rc.dot_path.empty()) write_file(rc.dot_path, export_dot(*model.base.graph, &model.base.scores, c.mcts.recommended_path));
  return kOk;
}

int cmd_export(const RunConfig& rc, std::ostream& out) {
  const Loaded l = load_inputs(rc);
  std::string dot;
  if (rc.source && rc.target) {
    const WeightedGraph wg = score(l, rc, *rc.source, *rc.target);
    dot = export_dot(*wg.graph, &wg.scores);
  } else {
    dot = export_dot(*l.graph);
  }
  emit(rc.dot_path.empty() ? rc.output_path : rc.dot_path, dot, out);
  return kOk;
}

int cmd_validate(const RunConfig& rc, std::ostream& out) {
  const Loaded l = load_inputs(rc);
  out << "vertices: " << l.graph->size() << "\n";
  out << "arcs: " << l.graph->arc_count() << "\n";
  out << "acyclic: " << (l.graph->acyclic() ? "yes" : "no") << "\n";
  if (l.db) out << "vulnerability records: " << l.db->size() << "\n";
  if (rc.source && rc.target) {
    const WeightedGraph wg = score(l, rc, *rc.source, *rc.target);
    for (const auto& w : wg.scores.warnings) out << "warning: " << w << "\n";
    const auto h = heuristic_reachable_sum(wg, *rc.target);
    out << "target reachable: " << (h(*wg.graph, *rc.source) ? "yes" : "no") << "\n";
  }
  if (l.graph->acyclic() && rc.temporal && rc.source && rc.target) {
    // Model parameters are checked too when present.
    build_model(score(l, rc, *rc.source, *rc.target), *rc.temporal);
  }
  out << "ok\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attack course-of-action planner over MULVAL attack graphs", "coa"};
  app.require_subcommand(1);
  Flags f;
  auto* plan_cmd = app.add_subcommand("plan", "Highest-value attack path by best-first search");
  auto* temporal_cmd = app.add_subcommand("temporal", "Static plan vs. MCTS plan under network dynamics");
  auto* export_cmd = app.add_subcommand("export", "Graphviz rendering of the attack graph");
  auto* validate_cmd = app.add_subcommand("validate", "Parse and check the inputs");
  for (auto* cmd : {plan_cmd, temporal_cmd, export_cmd, validate_cmd}) add_common(*cmd, f);
  for (auto* cmd : {plan_cmd, temporal_cmd}) cmd->add_flag("--timing", f.timing, "Record wall-clock time in the report");
  temporal_cmd->add_option("--iterations", f.iterations, "Override mcts.iterations");
  temporal_cmd->add_flag("--strict-goal", f.strict_goal, "Rollouts that miss the target score 0");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("coa");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    const RunConfig rc = resolve(f);
    if (plan_cmd->parsed()) return cmd_plan(rc, out);
    if (temporal_cmd->parsed()) return cmd_temporal(rc, out);
    if (export_cmd->parsed()) return cmd_export(rc, out);
    return cmd_validate(rc, out);
  } catch (const NoPathError& e) {
    err << "no path: " << e.what() << "\n";
    return kNoPath;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace coa::cli
