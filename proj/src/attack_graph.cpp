#include "coa/attack_graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <queue>

#include "coa/error.hpp"
#include "coa/export.hpp"
#include "text.hpp"

namespace coa {

std::string_view to_string(VertexKind kind) {
  switch (kind) {
    case VertexKind::Leaf:
      return "LEAF";
    case VertexKind::And:
      return "AND";
    case VertexKind::Or:
      return "OR";
  }
  return "LEAF";
}

namespace {

struct Field {
  std::string_view text;
  bool quoted = false;
};

// Comma-separated fields where a field may be wrapped in double quotes and
// then contain commas. No escape sequences: MULVAL never emits them.
std::vector<Field> split_quoted(std::string_view line, std::size_t line_no) {
  std::vector<Field> fields;
  std::size_t i = 0;
  while (true) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i < line.size() && line[i] == '"') {
      const std::size_t close = line.find('"', i + 1);
      if (close == std::string_view::npos) throw ParseError(line_no, "unbalanced quotes");
      fields.push_back({line.substr(i + 1, close - i - 1), true});
      i = close + 1;
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i == line.size()) break;
      if (line[i] != ',') throw ParseError(line_no, "unexpected text after closing quote");
      ++i;
    } else {
      const std::size_t comma = line.find(',', i);
      const std::string_view raw =
          line.substr(i, comma == std::string_view::npos ? std::string_view::npos : comma - i);
      if (raw.find('"') != std::string_view::npos) throw ParseError(line_no, "unbalanced quotes");
      fields.push_back({detail::trim(raw), false});
      if (comma == std::string_view::npos) break;
      i = comma + 1;
    }
  }
  return fields;
}

VertexId parse_vertex_id(std::string_view text, std::size_t line_no) {
  const auto value = detail::parse_int<std::int64_t>(text);
  if (!value) throw ParseError(line_no, "expected an integer vertex id, got '" + std::string(text) + "'");
  if (*value < 1 || *value > std::numeric_limits<VertexId>::max())
    throw ParseError(line_no, "vertex id out of range: " + std::string(text));
  return static_cast<VertexId>(*value);
}

VertexKind parse_kind(std::string_view text, std::size_t line_no) {
  if (text == "LEAF") return VertexKind::Leaf;
  if (text == "AND") return VertexKind::And;
  if (text == "OR") return VertexKind::Or;
  throw ParseError(line_no, "unknown vertex kind '" + std::string(text) + "'");
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

std::vector<Vertex> parse_vertices(std::string_view text) {
  std::vector<Vertex> out;
  std::unordered_map<VertexId, std::size_t> seen;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split_quoted(line, line_no);
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 fields, found " + std::to_string(fields.size()));
    Vertex v;
    v.id = parse_vertex_id(fields[0].text, line_no);
    v.label = std::string(fields[1].text);
    if (v.label.empty()) throw ParseError(line_no, "empty label");
    v.kind = parse_kind(fields[2].text, line_no);
    const auto metric = detail::parse_double(fields[3].text);
    if (!metric) throw ParseError(line_no, "expected a numeric metric, got '" + std::string(fields[3].text) + "'");
    v.metric = *metric;
    if (const auto [it, inserted] = seen.emplace(v.id, line_no); !inserted)
      throw DuplicateIdError("line " + std::to_string(line_no) + ": duplicate vertex id " + std::to_string(v.id) +
                             " (first defined on line " + std::to_string(it->second) + ")");
    out.push_back(std::move(v));
  });
  return out;
}

std::vector<Arc> parse_arcs(std::string_view text, bool reverse) {
  std::vector<Arc> out;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto parts = detail::split(line, ',');
    if (parts.size() < 2) throw ParseError(line_no, "expected at least 2 fields");
    for (std::size_t k = 2; k < parts.size(); ++k) {
      if (!detail::parse_int<std::int64_t>(detail::trim(parts[k])))
        throw ParseError(line_no, "expected an integer, got '" + std::string(detail::trim(parts[k])) + "'");
    }
    const VertexId first = parse_vertex_id(detail::trim(parts[0]), line_no);
    const VertexId second = parse_vertex_id(detail::trim(parts[1]), line_no);
    out.push_back(reverse ? Arc{second, first} : Arc{first, second});
  });
  return out;
}

std::string serialize_vertices(std::span<const Vertex> vertices) {
  std::string out;
  for (const auto& v : vertices) {
    out += std::to_string(v.id);
    out += ",\"";
    out += v.label;
    out += "\",\"";
    out += to_string(v.kind);
    out += "\",";
    out += format_number(v.metric);
    out += '\n';
  }
  return out;
}

std::string serialize_arcs(std::span<const Arc> arcs, bool reverse) {
  std::string out;
  for (const auto& a : arcs) {
    const auto [first, second] = reverse ? std::pair{a.dst, a.src} : std::pair{a.src, a.dst};
    out += std::to_string(first) + "," + std::to_string(second) + ",-1\n";
  }
  return out;
}

Predicate parse_predicate(std::string_view label) noexcept {
  const auto fallback = [&] { return Predicate{std::string(label), {}}; };
  try {
    const std::string_view trimmed = detail::trim(label);
    const std::size_t open = trimmed.find('(');
    if (open == std::string_view::npos || trimmed.empty() || trimmed.back() != ')') return fallback();
    const std::string_view name = trimmed.substr(0, open);
    if (!is_identifier(name)) return fallback();

    const std::string_view body = trimmed.substr(open + 1, trimmed.size() - open - 2);
    Predicate p{std::string(name), {}};
    if (detail::trim(body).empty()) return p;

    int depth = 0;
    char quote = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
      const char c = body[i];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '\'' || c == '"') {
        quote = c;
      } else if (c == '(') {
        ++depth;
      } else if (c == ')') {
        if (--depth < 0) return fallback();
      } else if (c == ',' && depth == 0) {
        p.args.emplace_back(detail::trim(body.substr(start, i - start)));
        start = i + 1;
      }
    }
    if (quote || depth != 0) return fallback();
    p.args.emplace_back(detail::trim(body.substr(start)));
    return p;
  } catch (...) {
    return fallback();
  }
}

AttackGraph AttackGraph::build(std::vector<Vertex> vertices, std::vector<Arc> arcs) {
  AttackGraph g;
  std::sort(vertices.begin(), vertices.end(), [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].id == 0) throw ValidationError("vertex id must be >= 1");
    if (vertices[i].label.empty()) throw ValidationError("vertex " + std::to_string(vertices[i].id) + " has an empty label");
    if (!g.index_.emplace(vertices[i].id, i).second)
      throw DuplicateIdError("duplicate vertex id " + std::to_string(vertices[i].id));
  }
  g.vertices_ = std::move(vertices);

  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  std::vector<std::string> problems;
  for (const auto& a : arcs) {
    const std::string pair = std::to_string(a.src) + "->" + std::to_string(a.dst);
    if (a.src == a.dst) {
      problems.push_back("self-loop " + pair);
    } else if (!g.contains(a.src) || !g.contains(a.dst)) {
      problems.push_back("dangling arc " + pair);
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid arcs:";
    for (const auto& p : problems) msg += " " + p + ";";
    msg.pop_back();
    throw ValidationError(msg);
  }

  const std::size_t n = g.vertices_.size();
  g.arcs_ = std::move(arcs);
  g.arc_refs_.reserve(g.arcs_.size());
  g.offsets_.assign(n + 1, 0);
  for (const auto& a : g.arcs_) {
    const std::size_t s = g.index_.at(a.src);
    g.arc_refs_.push_back({s, g.index_.at(a.dst)});
    ++g.offsets_[s + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];

  // Kahn's algorithm, smallest index first so the order is canonical.
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& r : g.arc_refs_) ++indegree[r.dst];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t u = ready.top();
    ready.pop();
    order.push_back(u);
    const auto [first, last] = g.out_arcs(u);
    for (std::size_t k = first; k < last; ++k)
      if (--indegree[g.arc_refs_[k].dst] == 0) ready.push(g.arc_refs_[k].dst);
  }
  g.acyclic_ = order.size() == n;
  if (g.acyclic_) g.topo_ = std::move(order);
  return g;
}

std::optional<std::size_t> AttackGraph::index_of(VertexId id) const noexcept {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t AttackGraph::require_index(VertexId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw LookupError("no vertex with id " + std::to_string(id));
  return it->second;
}

std::vector<VertexId> AttackGraph::successors(VertexId id) const {
  const auto [first, last] = out_arcs(require_index(id));
  std::vector<VertexId> out;
  out.reserve(last - first);
  for (std::size_t k = first; k < last; ++k) out.push_back(arcs_[k].dst);
  return out;
}

std::optional<std::size_t> AttackGraph::arc_index(VertexId src, VertexId dst) const noexcept {
  const auto it = std::lower_bound(arcs_.begin(), arcs_.end(), Arc{src, dst});
  if (it == arcs_.end() || *it != Arc{src, dst}) return std::nullopt;
  return static_cast<std::size_t>(it - arcs_.begin());
}

}  // namespace coa
