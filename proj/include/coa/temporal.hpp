#pragma once

// Time-varying network model and Monte-Carlo tree search over it.
//
// Each time step draws an independent snapshot of the network: every arc is
// up with its own probability, and every node score other than the source and
// target constants is multiplied by exp(N(0, drift^2)) and clamped to [0, 10].
// Edge weights of a snapshot are recomputed from the drifted scores with the
// base graph's weighting mode.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coa/rng.hpp"
#include "coa/scoring.hpp"
#include "coa/search.hpp"

namespace coa {

struct TimeVaryingModel {
  WeightedGraph base;
  std::vector<double> edge_availability;  // by arc index, each in [0, 1]
  double score_drift = 0.0;
  std::size_t horizon = 1;
  std::uint64_t seed = 0;

  /// Every arc always up, no drift.
  static TimeVaryingModel static_model(WeightedGraph base, std::size_t horizon, std::uint64_t seed = 0);

  /// Throws ValidationError when an invariant is broken.
  void validate() const;

  /// Upper bound on the value of any single episode.
  double reward_bound() const;
};

struct MctsConfig {
  std::size_t iterations = 10000;
  double exploration_c = 1.0;
  std::size_t rollout_depth_cap = 64;
  std::uint64_t seed = 0;
  bool strict_goal = false;  // zero the reward of rollouts that miss the target
};

/// One snapshot drawn from the model, in the base graph's arc indexing.
struct Snapshot {
  std::vector<char> present;   // by arc index
  std::vector<double> scores;  // by vertex index
  std::vector<double> weights; // by arc index
};

/// Draws the snapshot for one step. Arcs are sampled in arc-index order,
/// then (only when drift > 0) node scores in vertex order.
Snapshot draw_snapshot(const TimeVaryingModel& model, Rng& rng);

/// Snapshot as a standalone weighted graph holding only the arcs that are up.
/// Requires 0 <= step < horizon (ValidationError otherwise).
WeightedGraph sample_snapshot(const TimeVaryingModel& model, std::size_t step, Rng& rng);

/// +inf for an unvisited child, else mean + c * sqrt(ln(parent) / child).
double uct_score(double mean_reward, std::size_t child_visits, std::size_t parent_visits, double c);

struct ActionStats {
  std::size_t visits = 0;
  double mean_reward = 0.0;

  bool operator==(const ActionStats&) const = default;
};

struct MctsResult {
  std::vector<VertexId> recommended_path;
  double expected_value = 0.0;
  std::size_t root_visits = 0;
  std::map<std::pair<VertexId, VertexId>, ActionStats> per_action;
  /// Tree-wide checks, filled in after the run.
  std::size_t tree_size = 0;
  bool visit_counts_consistent = true;
  double max_reward = 0.0;

  bool operator==(const MctsResult&) const = default;
};

/// Throws DegenerateQueryError when source == target, LookupError for
/// unknown vertices.
MctsResult mcts_plan(const TimeVaryingModel& model, VertexId source, VertexId target,
                     const MctsConfig& config);

struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  double success_rate = 0.0;
  std::vector<std::string> warnings;

  bool operator==(const ValueEstimate&) const = default;
};

/// Replays `path` for `trials` episodes. Each step the attacker crosses the
/// next arc if it is up in that step's snapshot and otherwise waits; the
/// episode ends at the path's end or at the horizon with whatever value was
/// accrued. Success means the whole path was walked and it ends at the
/// model's target. Episode i draws from `rng.split(i)`.
ValueEstimate evaluate_path(const TimeVaryingModel& model, const std::vector<VertexId>& path,
                            std::size_t trials, const Rng& rng);

enum class Winner { Spatial, Mcts, Tie };

std::string_view to_string(Winner winner);

struct Comparison {
  SearchResult spatial;
  ValueEstimate spatial_estimate;
  MctsResult mcts;
  ValueEstimate mcts_estimate;
  Winner winner = Winner::Tie;
};

/// Static plan vs. MCTS plan, both replayed under the model's dynamics with
/// the same random streams.
Comparison compare(const TimeVaryingModel& model, VertexId source, VertexId target,
                   const MctsConfig& config, std::size_t trials,
                   HeuristicMode mode = HeuristicMode::ReachableSum);

}  // namespace coa
