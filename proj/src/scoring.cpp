#include "coa/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "coa/error.hpp"
#include "text.hpp"

namespace coa {

namespace {

bool in_cvss_range(double x) { return x >= 0.0 && x <= kMaxCvss; }

std::string strip_quotes(std::string_view s) {
  s = detail::trim(s);
  while (!s.empty() && (s.front() == '\'' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '\'' || s.back() == '"')) s.remove_suffix(1);
  return std::string(s);
}

VulnDb load_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError(0, "vulnerability database must be a JSON array");
  VulnDb db;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const auto where = "record " + std::to_string(i);
    if (!item.is_object()) throw ParseError(0, where + " is not an object");
    const auto field = [&](const char* key) -> const nlohmann::json& {
      const auto it = item.find(key);
      if (it == item.end()) throw ParseError(0, where + " lacks '" + key + "'");
      return *it;
    };
    const auto& id = field("cveId");
    const auto& base = field("baseScore");
    const auto& expl = field("exploitabilityScore");
    if (!id.is_string()) throw ParseError(0, where + ": cveId must be a string");
    if (!base.is_number() || !expl.is_number()) throw ParseError(0, where + ": scores must be numbers");
    db.add({id.get<std::string>(), base.get<double>(), expl.get<double>()});
  }
  return db;
}

VulnDb load_csv(std::string_view text) {
  VulnDb db;
  bool header = true;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto parts = detail::split(line, ',');
    if (header) {
      header = false;
      if (parts.size() != 3 || detail::trim(parts[0]) != "cveId" || detail::trim(parts[1]) != "baseScore" ||
          detail::trim(parts[2]) != "exploitabilityScore")
        throw ParseError(line_no, "expected header 'cveId,baseScore,exploitabilityScore'");
      return;
    }
    if (parts.size() != 3) throw ParseError(line_no, "expected 3 fields, found " + std::to_string(parts.size()));
    const auto base = detail::parse_double(parts[1]);
    const auto expl = detail::parse_double(parts[2]);
    if (!base || !expl) throw ParseError(line_no, "scores must be decimal numbers");
    try {
      db.add({strip_quotes(parts[0]), *base, *expl});
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DuplicateIdError& e) {
      throw DuplicateIdError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return db;
}

}  // namespace

void VulnDb::add(VulnRecord record) {
  if (record.cve_id.empty()) throw ValidationError("empty cveId");
  if (!in_cvss_range(record.base_score))
    throw ValidationError(record.cve_id + ": baseScore " + std::to_string(record.base_score) + " outside [0,10]");
  if (!in_cvss_range(record.exploitability_score))
    throw ValidationError(record.cve_id + ": exploitabilityScore " + std::to_string(record.exploitability_score) +
                          " outside [0,10]");
  const std::string key = record.cve_id;
  if (!records_.emplace(key, std::move(record)).second) throw DuplicateIdError("duplicate cveId " + key);
}

const VulnRecord* VulnDb::find(std::string_view cve_id) const {
  const auto it = records_.find(cve_id);
  return it == records_.end() ? nullptr : &it->second;
}

VulnDb load_vuln_db(std::string_view text) {
  const std::string_view body = detail::trim(text.starts_with("\xEF\xBB\xBF") ? text.substr(3) : text);
  if (body.empty()) return {};
  if (body.front() == '[') return load_json(body);
  return load_csv(text);
}

double score_vul(double base_score, double exploitability_score) {
  if (!in_cvss_range(base_score) || !in_cvss_range(exploitability_score))
    throw DomainError("CVSS scores must lie in [0,10]");
  return base_score * exploitability_score / 10.0;
}

ScoreAssignment assign_node_scores(const AttackGraph& graph, const VulnDb& db, VertexId source, VertexId target,
                                   const ScoringOptions& options) {
  const std::size_t source_index = graph.require_index(source);
  const std::size_t target_index = graph.require_index(target);
  if (source == target) throw ValidationError("source and target must differ");

  ScoreAssignment out;
  out.source = source;
  out.target = target;
  out.values.assign(graph.size(), 0.0);

  std::vector<std::string> missing;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (i == source_index || i == target_index) continue;
    const Vertex& v = graph.vertex_at(i);
    const Predicate p = parse_predicate(v.label);
    if (p.name == options.vulnerability_predicate) {
      const std::string cve = p.args.size() >= 2 ? strip_quotes(p.args[1]) : std::string();
      const VulnRecord* rec = cve.empty() ? nullptr : db.find(cve);
      if (rec) {
        out.values[i] = score_vul(rec->base_score, rec->exploitability_score);
      } else {
        missing.push_back("node " + std::to_string(v.id) + " (" + (cve.empty() ? "no CVE argument" : cve) + ")");
      }
    } else if (std::find(options.privilege_predicates.begin(), options.privilege_predicates.end(), p.name) !=
               options.privilege_predicates.end()) {
      out.values[i] = kPrivilegeValue;
    }
  }
  out.values[source_index] = kSourceValue;
  out.values[target_index] = kTargetValue;

  if (!missing.empty()) {
    if (options.strict_cve) {
      std::string msg = "missing CVE records:";
      for (const auto& m : missing) msg += " " + m + ",";
      msg.pop_back();
      throw MissingCveError(msg);
    }
    for (const auto& m : missing) out.warnings.push_back("missing CVE record for " + m + "; scored 0");
  }
  return out;
}

std::string_view to_string(EdgeWeightMode mode) {
  switch (mode) {
    case EdgeWeightMode::Src:
      return "src";
    case EdgeWeightMode::Dst:
      return "dst";
    case EdgeWeightMode::Avg:
      return "avg";
  }
  return "dst";
}

std::optional<EdgeWeightMode> parse_edge_weight_mode(std::string_view text) {
  if (text == "src") return EdgeWeightMode::Src;
  if (text == "dst") return EdgeWeightMode::Dst;
  if (text == "avg") return EdgeWeightMode::Avg;
  return std::nullopt;
}

double combine_weight(EdgeWeightMode mode, double src_value, double dst_value) {
  switch (mode) {
    case EdgeWeightMode::Src:
      return src_value;
    case EdgeWeightMode::Dst:
      return dst_value;
    case EdgeWeightMode::Avg:
      return (src_value + dst_value) / 2.0;
  }
  return dst_value;
}

std::optional<double> WeightedGraph::weight(VertexId src, VertexId dst) const {
  const auto k = graph->arc_index(src, dst);
  if (!k) return std::nullopt;
  return weights[*k];
}

WeightedGraph edge_weights(std::shared_ptr<const AttackGraph> graph, ScoreAssignment scores, EdgeWeightMode mode) {
  if (!graph) throw ValidationError("edge_weights: null graph");
  if (scores.values.size() != graph->size()) throw ValidationError("score assignment does not cover the graph");
  WeightedGraph wg;
  wg.weights.reserve(graph->arc_count());
  for (std::size_t k = 0; k < graph->arc_count(); ++k) {
    const auto& r = graph->arc_ref(k);
    wg.weights.push_back(combine_weight(mode, scores.values[r.src], scores.values[r.dst]));
  }
  wg.graph = std::move(graph);
  wg.scores = std::move(scores);
  wg.mode = mode;
  return wg;
}

}  // namespace coa
