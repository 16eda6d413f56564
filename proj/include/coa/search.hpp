#pragma once

// Maximizing best-first search over attack value f(n) = g(n) + h(n).
//
// g is the attack value accumulated along the partial path, h an upper bound
// on the value still obtainable before reaching the target. The frontier is a
// max-queue on f and a path-state is dropped once its f cannot beat the best
// complete path found so far, so with an overestimating h the first complete
// path left standing is optimal.

#include <chrono>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "coa/scoring.hpp"

namespace coa {

enum class HeuristicMode { ReachableSum, DpExact };

std::string_view to_string(HeuristicMode mode);
std::optional<HeuristicMode> parse_heuristic_mode(std::string_view text);

class HeuristicTable {
 public:
  HeuristicTable(HeuristicMode mode, std::vector<std::optional<double>> values)
      : mode_(mode), values_(std::move(values)) {}

  HeuristicMode mode() const noexcept { return mode_; }
  /// nullopt marks "target unreachable" (the -inf sentinel).
  const std::optional<double>& at(std::size_t index) const { return values_[index]; }
  std::optional<double> operator()(const AttackGraph& graph, VertexId id) const {
    return values_[graph.require_index(id)];
  }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  HeuristicMode mode_;
  std::vector<std::optional<double>> values_;
};

/// Sum, over every vertex reachable from v before the target is entered, of
/// the largest weight of any arc into that vertex. Under destination weighting
/// that is exactly the sum of node scores reachable from v. Never
/// underestimates a simple path's value.
HeuristicTable heuristic_reachable_sum(const WeightedGraph& wg, VertexId target);

/// Exact best remaining value by backward DP in reverse topological order.
/// Throws UnsupportedInputError on cyclic graphs.
HeuristicTable heuristic_dp_exact(const WeightedGraph& wg, VertexId target);

struct SearchStep {
  VertexId vertex = 0;
  double g = 0.0;
  double f = 0.0;

  bool operator==(const SearchStep&) const = default;
};

struct SearchResult {
  std::vector<VertexId> path;
  double total_value = 0.0;
  std::vector<SearchStep> per_step;
  std::size_t expanded_count = 0;
  std::chrono::nanoseconds elapsed{0};
  HeuristicMode mode = HeuristicMode::ReachableSum;
  /// f of every popped state, in pop order. Only filled when tracing.
  std::vector<double> popped_f;
};

struct PlanOptions {
  HeuristicMode mode = HeuristicMode::ReachableSum;
  bool trace = false;
};

/// Complete-path preference shared by plan() and brute_force_optimal():
/// higher value first, then the lexicographically smaller id sequence.
bool better_path(double value_a, const std::vector<VertexId>& path_a, double value_b,
                 const std::vector<VertexId>& path_b);

/// Highest-value simple path source -> target.
/// Throws LookupError, NoPathError, DegenerateQueryError (source == target),
/// UnsupportedInputError (DpExact on a cyclic graph).
SearchResult plan(const WeightedGraph& wg, VertexId source, VertexId target,
                  const PlanOptions& options = {});

inline constexpr std::size_t kDefaultBruteForceLimit = 20;

/// Enumerates every simple source -> target path depth-first. Refuses graphs
/// with more than `max_vertices` vertices (RefusalError).
SearchResult brute_force_optimal(const WeightedGraph& wg, VertexId source, VertexId target,
                                 std::size_t max_vertices = kDefaultBruteForceLimit);

/// Sum of arc weights along `path`; throws ValidationError on a non-arc.
double path_value(const WeightedGraph& wg, const std::vector<VertexId>& path);

}  // namespace coa
