#pragma once

#include <span>
#include <string>
#include <vector>

#include "coa/attack_graph.hpp"
#include "coa/scoring.hpp"

namespace coa {

/// Graphviz rendering. Nodes are labeled "id: label" (plus " [score]" when
/// scores are given); arcs along `highlight` are drawn red. Output is a pure
/// function of the inputs. Throws ValidationError if `highlight` steps over a
/// non-arc.
std::string export_dot(const AttackGraph& graph, const ScoreAssignment* scores = nullptr,
                       std::span<const VertexId> highlight = {});

struct AdjacencyMatrix {
  std::vector<VertexId> ids;  // row/column order, ascending
  std::vector<std::vector<double>> cells;
};

/// Dense view with -1 wherever no arc exists, diagonal included.
AdjacencyMatrix adjacency_matrix(const WeightedGraph& wg);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

}  // namespace coa
