#pragma once

// MULVAL attack-graph model: VERTICES.CSV / ARCS.CSV ingestion, predicate
// parsing and an immutable CSR-backed digraph.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coa {

using VertexId = std::uint32_t;

enum class VertexKind { Leaf, And, Or };

std::string_view to_string(VertexKind kind);

struct Vertex {
  VertexId id = 0;
  std::string label;
  VertexKind kind = VertexKind::Leaf;
  double metric = 0.0;  // carried through from MULVAL, never scored

  bool operator==(const Vertex&) const = default;
};

struct Arc {
  VertexId src = 0;
  VertexId dst = 0;

  auto operator<=>(const Arc&) const = default;
};

struct Predicate {
  std::string name;
  std::vector<std::string> args;

  bool operator==(const Predicate&) const = default;
};

/// Parses `id,"label","kind",metric` records, one per non-blank line.
/// Throws ParseError (with line number) or DuplicateIdError.
std::vector<Vertex> parse_vertices(std::string_view text);

/// Parses MULVAL `a,b[,-1]` arc records. MULVAL stores (child, parent); with
/// `reverse` set each record becomes Arc{src: b, dst: a}, i.e. the direction
/// an attacker progresses toward the goal.
std::vector<Arc> parse_arcs(std::string_view text, bool reverse = true);

/// Serializes back to the MULVAL layouts. Labels are always double-quoted;
/// arcs are written in MULVAL order when `reverse` is set.
std::string serialize_vertices(std::span<const Vertex> vertices);
std::string serialize_arcs(std::span<const Arc> arcs, bool reverse = true);

/// Splits `name(a1,a2,...)`. Total: labels that are not a well-formed
/// predicate come back as {label, {}}.
Predicate parse_predicate(std::string_view label) noexcept;

/// Immutable digraph. Vertices are stored by ascending id and addressed
/// either by id or by dense index; arcs are sorted by (src, dst) so the
/// out-arcs of a vertex form a contiguous range of arc indices.
class AttackGraph {
 public:
  struct ArcRef {
    std::size_t src = 0;  // dense vertex indices
    std::size_t dst = 0;
  };

  AttackGraph() = default;

  /// Validates and builds. Duplicate arcs collapse to one.
  /// Throws DuplicateIdError, ValidationError (dangling endpoints, self-loops).
  static AttackGraph build(std::vector<Vertex> vertices, std::vector<Arc> arcs);

  std::size_t size() const noexcept { return vertices_.size(); }
  std::size_t arc_count() const noexcept { return arcs_.size(); }

  std::span<const Vertex> vertices() const noexcept { return vertices_; }
  std::span<const Arc> arcs() const noexcept { return arcs_; }
  const ArcRef& arc_ref(std::size_t arc_index) const { return arc_refs_[arc_index]; }

  bool contains(VertexId id) const noexcept { return index_.contains(id); }
  std::optional<std::size_t> index_of(VertexId id) const noexcept;
  /// Throws LookupError for unknown ids.
  std::size_t require_index(VertexId id) const;
  const Vertex& vertex(VertexId id) const { return vertices_[require_index(id)]; }
  const Vertex& vertex_at(std::size_t index) const { return vertices_[index]; }
  VertexId id_at(std::size_t index) const { return vertices_[index].id; }

  /// Successor ids of `id`, ascending.
  std::vector<VertexId> successors(VertexId id) const;

  /// Half-open range [first, last) of arc indices leaving vertex `index`.
  std::pair<std::size_t, std::size_t> out_arcs(std::size_t index) const {
    return {offsets_[index], offsets_[index + 1]};
  }

  std::optional<std::size_t> arc_index(VertexId src, VertexId dst) const noexcept;
  bool has_arc(VertexId src, VertexId dst) const noexcept { return arc_index(src, dst).has_value(); }

  bool acyclic() const noexcept { return acyclic_; }
  /// Dense indices in topological order; empty when the graph has a cycle.
  const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

 private:
  std::vector<Vertex> vertices_;
  std::unordered_map<VertexId, std::size_t> index_;
  std::vector<Arc> arcs_;
  std::vector<ArcRef> arc_refs_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> topo_;
  bool acyclic_ = true;
};

}  // namespace coa
