#include "coa/export.hpp"

#include <array>
#include <charconv>
#include <set>

#include "coa/error.hpp"

namespace coa {

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        break;
      default:
        out += c;
    }
  }
  return out;
}

// MULVAL's own rendering: facts as boxes, rules as ellipses, privileges as diamonds.
std::string_view shape(VertexKind kind) {
  switch (kind) {
    case VertexKind::Leaf:
      return "box";
    case VertexKind::And:
      return "ellipse";
    case VertexKind::Or:
      return "diamond";
  }
  return "box";
}

}  // namespace

std::string export_dot(const AttackGraph& graph, const ScoreAssignment* scores, std::span<const VertexId> highlight) {
  if (scores && scores->values.size() != graph.size())
    throw ValidationError("score assignment does not cover the graph");

  std::set<std::pair<VertexId, VertexId>> red;
  for (std::size_t i = 0; i + 1 < highlight.size(); ++i) {
    if (!graph.has_arc(highlight[i], highlight[i + 1]))
      throw ValidationError("highlighted path steps over a non-arc " + std::to_string(highlight[i]) + "->" +
                            std::to_string(highlight[i + 1]));
    red.emplace(highlight[i], highlight[i + 1]);
  }
  if (highlight.size() == 1 && !graph.contains(highlight[0]))
    throw ValidationError("highlighted vertex " + std::to_string(highlight[0]) + " is not in the graph");

  std::string out = "digraph attack_graph {\n";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const Vertex& v = graph.vertex_at(i);
    std::string label = std::to_string(v.id) + ": " + v.label;
    if (scores) label += " [" + format_number(scores->values[i]) + "]";
    out += "  " + std::to_string(v.id) + " [label=\"" + escape(label) + "\", shape=" + std::string(shape(v.kind)) +
           "];\n";
  }
  for (const Arc& a : graph.arcs()) {
    out += "  " + std::to_string(a.src) + " -> " + std::to_string(a.dst);
    if (red.contains({a.src, a.dst})) out += " [color=red, penwidth=2]";
    out += ";\n";
  }
  out += "}\n";
  return out;
}

AdjacencyMatrix adjacency_matrix(const WeightedGraph& wg) {
  const AttackGraph& g = *wg.graph;
  AdjacencyMatrix m;
  m.ids.reserve(g.size());
  for (const auto& v : g.vertices()) m.ids.push_back(v.id);
  m.cells.assign(g.size(), std::vector<double>(g.size(), -1.0));
  for (std::size_t k = 0; k < g.arc_count(); ++k) {
    const auto& r = g.arc_ref(k);
    m.cells[r.src][r.dst] = wg.weights[k];
  }
  return m;
}

}  // namespace coa
