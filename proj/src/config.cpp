#include "coa/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "coa/error.hpp"
#include "text.hpp"

namespace coa {

namespace {

bool is_bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class LineReader {
 public:
  LineReader(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ == s_.size() || s_[pos_] == '#';
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no_, what); }

  std::string quoted() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ == s_.size()) break;
        c = s_[pos_++];
        if (c == 'n') c = '\n';
        else if (c == 't') c = '\t';
        else if (c != '"' && c != '\\') fail("unsupported escape sequence");
      }
      out += c;
    }
    if (pos_ == s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  std::string key() {
    skip_ws();
    if (peek() == '"') return quoted();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_bare_key_char(s_[pos_])) ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string dotted_key() {
    std::string k = key();
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      k += "." + key();
      skip_ws();
    }
    return k;
  }

  ConfigFile::Scalar scalar() {
    skip_ws();
    if (peek() == '"') return quoted();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
           s_[pos_] != '\t')
      ++pos_;
    const std::string_view token = s_.substr(start, pos_ - start);
    if (token == "true") return true;
    if (token == "false") return false;
    std::string cleaned;
    for (const char c : token)
      if (c != '_') cleaned += c;
    const auto number = detail::parse_double(cleaned);
    if (!number) fail("invalid value '" + std::string(token) + "'");
    return *number;
  }

  ConfigFile::Value value() {
    skip_ws();
    if (peek() != '[') {
      auto s = scalar();
      return std::visit([](auto&& v) -> ConfigFile::Value { return v; }, std::move(s));
    }
    ++pos_;
    std::vector<ConfigFile::Scalar> items;
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return items;
    }
    while (true) {
      items.push_back(scalar());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        if (peek() == ']') {
          ++pos_;
          break;
        }
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return items;
  }

 private:
  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

std::string type_name(const ConfigFile::Value& v) {
  switch (v.index()) {
    case 0:
      return "boolean";
    case 1:
      return "number";
    case 2:
      return "string";
    default:
      return "array";
  }
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile file;
  std::string section;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    LineReader r(line, line_no);
    if (r.done()) return;
    if (r.peek() == '[') {
      r.expect('[');
      section = r.dotted_key();
      r.expect(']');
      if (!r.done()) r.fail("unexpected text after section header");
      file.sections_.push_back(section);
      return;
    }
    const std::string key = r.dotted_key();
    r.expect('=');
    Value v = r.value();
    if (!r.done()) r.fail("unexpected text after value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!file.values_.emplace(full, std::move(v)).second) r.fail("duplicate key '" + full + "'");
  });
  return file;
}

bool ConfigFile::has_section(std::string_view section) const {
  if (std::find(sections_.begin(), sections_.end(), section) != sections_.end()) return true;
  const std::string prefix = std::string(section) + ".";
  return std::any_of(values_.begin(), values_.end(), [&](const auto& kv) { return kv.first.starts_with(prefix); });
}

std::vector<std::string> ConfigFile::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

const ConfigFile::Value* ConfigFile::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::optional<std::string> ConfigFile::get_string(const std::string& key) const {
  const Value* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  throw ValidationError("config key '" + key + "' must be a string, found " + type_name(*v));
}

std::optional<double> ConfigFile::get_number(const std::string& key) const {
  const Value* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* d = std::get_if<double>(v)) return *d;
  throw ValidationError("config key '" + key + "' must be a number, found " + type_name(*v));
}

std::optional<std::int64_t> ConfigFile::get_integer(const std::string& key) const {
  const auto d = get_number(key);
  if (!d) return std::nullopt;
  if (std::floor(*d) != *d || std::abs(*d) > 9.0e15)
    throw ValidationError("config key '" + key + "' must be an integer");
  return static_cast<std::int64_t>(*d);
}

std::optional<bool> ConfigFile::get_bool(const std::string& key) const {
  const Value* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* b = std::get_if<bool>(v)) return *b;
  throw ValidationError("config key '" + key + "' must be true or false, found " + type_name(*v));
}

std::optional<std::vector<std::string>> ConfigFile::get_string_list(const std::string& key) const {
  const Value* v = find(key);
  if (!v) return std::nullopt;
  const auto* items = std::get_if<std::vector<Scalar>>(v);
  if (!items) throw ValidationError("config key '" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : *items) {
    const auto* s = std::get_if<std::string>(&item);
    if (!s) throw ValidationError("config key '" + key + "' must be an array of strings");
    out.push_back(*s);
  }
  return out;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "input.vertices",          "input.arcs",          "input.vulndb",          "input.reverse_arcs",
      "query.source",            "query.target",        "scoring.edge_weight",   "scoring.strict_cve",
      "scoring.privilege_predicates", "scoring.vulnerability_predicate", "search.heuristic",
      "output.out",              "output.dot",          "output.timing",         "temporal.availability",
      "temporal.drift",          "temporal.horizon",    "temporal.seed",         "temporal.trials",
      "mcts.iterations",         "mcts.exploration",    "mcts.rollout_depth_cap", "mcts.seed",
      "mcts.strict_goal"};
  return keys;
}

constexpr std::string_view kArcSection = "temporal.arcs.";

std::pair<VertexId, VertexId> parse_arc_key(std::string_view key) {
  const std::size_t arrow = key.find("->");
  const auto fail = [&]() -> ValidationError {
    return ValidationError("arc availability key '" + std::string(key) + "' must look like \"src->dst\"");
  };
  if (arrow == std::string_view::npos) throw fail();
  const auto src = detail::parse_int<std::int64_t>(key.substr(0, arrow));
  const auto dst = detail::parse_int<std::int64_t>(key.substr(arrow + 2));
  if (!src || !dst || *src < 1 || *dst < 1 || *src > std::numeric_limits<VertexId>::max() ||
      *dst > std::numeric_limits<VertexId>::max())
    throw fail();
  return {static_cast<VertexId>(*src), static_cast<VertexId>(*dst)};
}

VertexId to_vertex_id(std::int64_t v, const std::string& key) {
  if (v < 1 || v > std::numeric_limits<VertexId>::max())
    throw ValidationError("config key '" + key + "' is not a valid vertex id");
  return static_cast<VertexId>(v);
}

std::size_t to_count(std::int64_t v, const std::string& key) {
  if (v < 0) throw ValidationError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

void apply_config_file(const ConfigFile& file, const std::string& base_dir, RunConfig& config) {
  for (const auto& key : file.keys()) {
    if (key.starts_with(kArcSection)) continue;
    if (!known_keys().contains(key)) throw ValidationError("unknown config key '" + key + "'");
  }
  const auto path = [&](const std::string& key, std::string& dst) {
    if (const auto v = file.get_string(key)) {
      const std::filesystem::path p(*v);
      dst = (p.is_absolute() || base_dir.empty()) ? p.string() : (std::filesystem::path(base_dir) / p).string();
    }
  };
  path("input.vertices", config.vertices_path);
  path("input.arcs", config.arcs_path);
  path("input.vulndb", config.vulndb_path);
  path("output.out", config.output_path);
  path("output.dot", config.dot_path);
  if (const auto v = file.get_bool("input.reverse_arcs")) config.reverse_arcs = *v;
  if (const auto v = file.get_integer("query.source")) config.source = to_vertex_id(*v, "query.source");
  if (const auto v = file.get_integer("query.target")) config.target = to_vertex_id(*v, "query.target");
  if (const auto v = file.get_string("scoring.edge_weight")) {
    const auto mode = parse_edge_weight_mode(*v);
    if (!mode) throw ValidationError("scoring.edge_weight must be src, dst or avg");
    config.edge_weight = *mode;
  }
  if (const auto v = file.get_bool("scoring.strict_cve")) config.scoring.strict_cve = *v;
  if (const auto v = file.get_string_list("scoring.privilege_predicates")) config.scoring.privilege_predicates = *v;
  if (const auto v = file.get_string("scoring.vulnerability_predicate")) config.scoring.vulnerability_predicate = *v;
  if (const auto v = file.get_string("search.heuristic")) {
    const auto mode = parse_heuristic_mode(*v);
    if (!mode) throw ValidationError("search.heuristic must be reachable-sum or dp-exact");
    config.heuristic = *mode;
  }
  if (const auto v = file.get_bool("output.timing")) config.timing = *v;

  if (file.has_section("temporal")) {
    TemporalParams t = config.temporal.value_or(TemporalParams{});
    if (const auto v = file.get_number("temporal.availability")) t.default_availability = *v;
    if (const auto v = file.get_number("temporal.drift")) t.drift = *v;
    if (const auto v = file.get_integer("temporal.horizon")) t.horizon = to_count(*v, "temporal.horizon");
    if (const auto v = file.get_integer("temporal.seed")) t.seed = static_cast<std::uint64_t>(*v);
    if (const auto v = file.get_integer("temporal.trials")) t.trials = to_count(*v, "temporal.trials");
    for (const auto& key : file.keys()) {
      if (!key.starts_with(kArcSection)) continue;
      t.arc_availability[parse_arc_key(std::string_view(key).substr(kArcSection.size()))] = *file.get_number(key);
    }
    config.temporal = t;
  }
  if (file.has_section("mcts")) {
    MctsConfig m = config.mcts.value_or(MctsConfig{});
    if (const auto v = file.get_integer("mcts.iterations")) m.iterations = to_count(*v, "mcts.iterations");
    if (const auto v = file.get_number("mcts.exploration")) m.exploration_c = *v;
    if (const auto v = file.get_integer("mcts.rollout_depth_cap")) m.rollout_depth_cap = to_count(*v, "mcts.rollout_depth_cap");
    if (const auto v = file.get_integer("mcts.seed")) m.seed = static_cast<std::uint64_t>(*v);
    if (const auto v = file.get_bool("mcts.strict_goal")) m.strict_goal = *v;
    config.mcts = m;
  }
}

TimeVaryingModel build_model(WeightedGraph base, const TemporalParams& params) {
  const AttackGraph& g = *base.graph;
  TimeVaryingModel model;
  model.edge_availability.assign(g.arc_count(), params.default_availability);
  for (const auto& [arc, p] : params.arc_availability) {
    const auto k = g.arc_index(arc.first, arc.second);
    if (!k)
      throw ValidationError("availability given for " + std::to_string(arc.first) + "->" + std::to_string(arc.second) +
                            ", which is not an arc of the graph");
    model.edge_availability[*k] = p;
  }
  model.base = std::move(base);
  model.score_drift = params.drift;
  model.horizon = params.horizon;
  model.seed = params.seed;
  model.validate();
  return model;
}

}  // namespace coa
