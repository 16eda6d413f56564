#include "coa/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "coa/error.hpp"

namespace coa {

std::string_view to_string(HeuristicMode mode) {
  return mode == HeuristicMode::DpExact ? "dp-exact" : "reachable-sum";
}

std::optional<HeuristicMode> parse_heuristic_mode(std::string_view text) {
  if (text == "reachable-sum") return HeuristicMode::ReachableSum;
  if (text == "dp-exact") return HeuristicMode::DpExact;
  return std::nullopt;
}

HeuristicTable heuristic_reachable_sum(const WeightedGraph& wg, VertexId target) {
  const AttackGraph& g = *wg.graph;
  const std::size_t n = g.size();
  const std::size_t t = g.require_index(target);

  std::vector<double> max_in(n, 0.0);
  for (std::size_t k = 0; k < g.arc_count(); ++k) {
    const auto dst = g.arc_ref(k).dst;
    max_in[dst] = std::max(max_in[dst], wg.weights[k]);
  }

  std::vector<std::optional<double>> h(n);
  std::vector<char> seen(n);
  std::vector<std::size_t> stack;
  for (std::size_t v = 0; v < n; ++v) {
    if (v == t) {
      h[v] = 0.0;
      continue;
    }
    // Paths stop at the target, so the search never leaves it.
    std::fill(seen.begin(), seen.end(), 0);
    seen[v] = 1;
    stack.assign(1, v);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      if (u == t) continue;
      const auto [first, last] = g.out_arcs(u);
      for (std::size_t k = first; k < last; ++k) {
        const std::size_t w = g.arc_ref(k).dst;
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    if (!seen[t]) continue;
    double sum = 0.0;
    std::size_t terms = 0;
    for (std::size_t u = 0; u < n; ++u)
      if (seen[u] && u != v) {
        sum += max_in[u];
        ++terms;
      }
    // Widen by the worst-case rounding of this sum and of any path's sum, so
    // the bound holds for computed values and not just real ones.
    h[v] = sum * (1.0 + 2.0 * static_cast<double>(terms + 1) * std::numeric_limits<double>::epsilon());
  }
  return HeuristicTable(HeuristicMode::ReachableSum, std::move(h));
}

HeuristicTable heuristic_dp_exact(const WeightedGraph& wg, VertexId target) {
  const AttackGraph& g = *wg.graph;
  const std::size_t t = g.require_index(target);
  if (!g.acyclic()) throw UnsupportedInputError("dp-exact heuristic requires an acyclic graph");

  // Values are summed front to back along the chosen continuation, the same
  // order plan() accumulates g, so h(source) and plan's total agree bit for bit.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::optional<double>> h(g.size());
  std::vector<std::size_t> next_arc(g.size(), kNone);
  h[t] = 0.0;
  const auto value_via = [&](std::size_t k) {
    double sum = wg.weights[k];
    for (std::size_t v = g.arc_ref(k).dst; next_arc[v] != kNone; v = g.arc_ref(next_arc[v]).dst)
      sum += wg.weights[next_arc[v]];
    return sum;
  };
  const auto& order = g.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t u = *it;
    if (u == t) continue;
    const auto [first, last] = g.out_arcs(u);
    for (std::size_t k = first; k < last; ++k) {
      if (!h[g.arc_ref(k).dst]) continue;
      const double candidate = value_via(k);
      if (!h[u] || candidate > *h[u]) {
        h[u] = candidate;
        next_arc[u] = k;
      }
    }
  }
  return HeuristicTable(HeuristicMode::DpExact, std::move(h));
}

bool better_path(double value_a, const std::vector<VertexId>& path_a, double value_b,
                 const std::vector<VertexId>& path_b) {
  if (value_a != value_b) return value_a > value_b;
  return std::lexicographical_compare(path_a.begin(), path_a.end(), path_b.begin(), path_b.end());
}

namespace {

struct Query {
  std::size_t source;
  std::size_t target;
};

Query resolve(const WeightedGraph& wg, VertexId source, VertexId target) {
  const AttackGraph& g = *wg.graph;
  Query q{g.require_index(source), g.require_index(target)};
  if (source == target) throw DegenerateQueryError("source and target are the same vertex");
  return q;
}

NoPathError no_path(VertexId source, VertexId target) {
  return NoPathError("target " + std::to_string(target) + " is unreachable from source " + std::to_string(source));
}

struct State {
  std::size_t vertex;
  double g;
  double f;
  std::int64_t parent;
};

// Float slack for the bound test. h is summed in a different order than the
// g of any concrete path, so an exact bound can land a few ulps low.
double prune_floor(double best) {
  if (best == -std::numeric_limits<double>::infinity()) return best;
  return best - 1e-9 * std::max(1.0, std::abs(best));
}

}  // namespace

SearchResult plan(const WeightedGraph& wg, VertexId source, VertexId target, const PlanOptions& options) {
  const auto start_time = std::chrono::steady_clock::now();
  const AttackGraph& g = *wg.graph;
  const Query q = resolve(wg, source, target);
  const HeuristicTable h = options.mode == HeuristicMode::DpExact ? heuristic_dp_exact(wg, target)
                                                                   : heuristic_reachable_sum(wg, target);
  if (!h.at(q.source)) throw no_path(source, target);

  std::vector<State> states;
  const auto lower_priority = [&](std::size_t a, std::size_t b) {
    const State& x = states[a];
    const State& y = states[b];
    if (x.f != y.f) return x.f < y.f;
    if (x.g != y.g) return x.g < y.g;
    if (x.vertex != y.vertex) return g.id_at(x.vertex) > g.id_at(y.vertex);
    return a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(lower_priority)> frontier(lower_priority);

  const auto chain = [&](std::size_t s) {
    std::vector<std::size_t> out;
    for (std::int64_t i = static_cast<std::int64_t>(s); i >= 0; i = states[i].parent)
      out.push_back(static_cast<std::size_t>(i));
    std::reverse(out.begin(), out.end());
    return out;
  };
  const auto ids_of = [&](const std::vector<std::size_t>& states_on_path) {
    std::vector<VertexId> ids;
    ids.reserve(states_on_path.size());
    for (const auto s : states_on_path) ids.push_back(g.id_at(states[s].vertex));
    return ids;
  };

  SearchResult result;
  result.mode = options.mode;
  double best = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> best_state;
  std::vector<VertexId> best_path;

  states.push_back({q.source, 0.0, *h.at(q.source), -1});
  frontier.push(0);
  std::vector<char> on_path(g.size(), 0);

  while (!frontier.empty()) {
    const std::size_t s = frontier.top();
    frontier.pop();
    const State cur = states[s];
    if (options.trace) result.popped_f.push_back(cur.f);
    if (cur.f < prune_floor(best)) break;
    ++result.expanded_count;

    if (cur.vertex == q.target) {
      auto path = ids_of(chain(s));
      if (!best_state || better_path(cur.g, path, best, best_path)) {
        best = cur.g;
        best_state = s;
        best_path = std::move(path);
      }
      continue;
    }

    const auto line = chain(s);
    for (const auto i : line) on_path[states[i].vertex] = 1;
    const auto [first, last] = g.out_arcs(cur.vertex);
    for (std::size_t k = first; k < last; ++k) {
      const std::size_t w = g.arc_ref(k).dst;
      if (on_path[w] || !h.at(w)) continue;
      const double g2 = cur.g + wg.weights[k];
      const double f2 = g2 + *h.at(w);
      if (f2 < prune_floor(best)) continue;
      states.push_back({w, g2, f2, static_cast<std::int64_t>(s)});
      frontier.push(states.size() - 1);
    }
    for (const auto i : line) on_path[states[i].vertex] = 0;
  }

  if (!best_state) throw no_path(source, target);
  result.path = best_path;
  result.total_value = best;
  for (const auto i : chain(*best_state)) result.per_step.push_back({g.id_at(states[i].vertex), states[i].g, states[i].f});
  result.elapsed = std::chrono::steady_clock::now() - start_time;
  return result;
}

SearchResult brute_force_optimal(const WeightedGraph& wg, VertexId source, VertexId target, std::size_t max_vertices) {
  const auto start_time = std::chrono::steady_clock::now();
  const AttackGraph& g = *wg.graph;
  if (g.size() > max_vertices)
    throw RefusalError("graph has " + std::to_string(g.size()) + " vertices; exhaustive enumeration is limited to " +
                       std::to_string(max_vertices));
  const Query q = resolve(wg, source, target);

  SearchResult result;
  std::vector<std::size_t> line{q.source};
  std::vector<double> gs{0.0};
  std::vector<char> on_path(g.size(), 0);
  on_path[q.source] = 1;
  bool found = false;
  std::vector<VertexId> best_path;
  std::vector<double> best_gs;

  const auto visit = [&](const auto& self) -> void {
    ++result.expanded_count;
    const std::size_t u = line.back();
    if (u == q.target) {
      std::vector<VertexId> path;
      for (const auto i : line) path.push_back(g.id_at(i));
      if (!found || better_path(gs.back(), path, best_gs.back(), best_path)) {
        found = true;
        best_path = std::move(path);
        best_gs = gs;
      }
      return;
    }
    const auto [first, last] = g.out_arcs(u);
    for (std::size_t k = first; k < last; ++k) {
      const std::size_t w = g.arc_ref(k).dst;
      if (on_path[w]) continue;
      on_path[w] = 1;
      line.push_back(w);
      gs.push_back(gs.back() + wg.weights[k]);
      self(self);
      gs.pop_back();
      line.pop_back();
      on_path[w] = 0;
    }
  };
  visit(visit);

  if (!found) throw no_path(source, target);
  result.path = best_path;
  result.total_value = best_gs.back();
  for (std::size_t i = 0; i < best_path.size(); ++i) result.per_step.push_back({best_path[i], best_gs[i], result.total_value});
  result.elapsed = std::chrono::steady_clock::now() - start_time;
  return result;
}

double path_value(const WeightedGraph& wg, const std::vector<VertexId>& path) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto w = wg.weight(path[i], path[i + 1]);
    if (!w) throw ValidationError("no arc " + std::to_string(path[i]) + "->" + std::to_string(path[i + 1]));
    total += *w;
  }
  return total;
}

}  // namespace coa
