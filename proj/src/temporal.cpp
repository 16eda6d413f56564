#include "coa/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "coa/error.hpp"

namespace coa {

TimeVaryingModel TimeVaryingModel::static_model(WeightedGraph base, std::size_t horizon, std::uint64_t seed) {
  TimeVaryingModel m;
  m.edge_availability.assign(base.graph ? base.graph->arc_count() : 0, 1.0);
  m.base = std::move(base);
  m.horizon = horizon;
  m.seed = seed;
  return m;
}

void TimeVaryingModel::validate() const {
  if (!base.graph) throw ValidationError("time-varying model has no base graph");
  if (edge_availability.size() != base.graph->arc_count())
    throw ValidationError("edge availability must list one probability per arc");
  for (std::size_t k = 0; k < edge_availability.size(); ++k) {
    const double p = edge_availability[k];
    if (!(p >= 0.0 && p <= 1.0)) {
      const Arc& a = base.graph->arcs()[k];
      throw ValidationError("availability of arc " + std::to_string(a.src) + "->" + std::to_string(a.dst) +
                            " outside [0,1]");
    }
  }
  if (!(score_drift >= 0.0) || !std::isfinite(score_drift)) throw ValidationError("score drift must be >= 0");
  if (horizon < 1) throw ValidationError("horizon must be >= 1");
}

namespace {

bool is_fixed(const WeightedGraph& wg, std::size_t index) {
  const VertexId id = wg.graph->id_at(index);
  return id == wg.scores.source || id == wg.scores.target;
}

double drifted(const TimeVaryingModel& m, std::size_t index, Rng& rng) {
  const double base = m.base.scores.values[index];
  if (m.score_drift == 0.0 || is_fixed(m.base, index)) return base;
  return std::clamp(base * std::exp(m.score_drift * rng.normal()), 0.0, kMaxCvss);
}

// The out-arcs of one vertex for one step. Arcs and node scores are
// independent across the network, so drawing only what the walker can see
// has the same law as slicing a full snapshot.
struct LocalStep {
  std::size_t first = 0;
  std::vector<char> present;
  std::vector<double> weights;
};

LocalStep draw_local(const TimeVaryingModel& m, std::size_t vertex, Rng& rng) {
  const AttackGraph& g = *m.base.graph;
  const auto [first, last] = g.out_arcs(vertex);
  LocalStep step;
  step.first = first;
  step.present.reserve(last - first);
  for (std::size_t k = first; k < last; ++k) step.present.push_back(rng.bernoulli(m.edge_availability[k]) ? 1 : 0);
  if (m.score_drift == 0.0) {
    step.weights.assign(m.base.weights.begin() + static_cast<std::ptrdiff_t>(first),
                        m.base.weights.begin() + static_cast<std::ptrdiff_t>(last));
    return step;
  }
  const double own = drifted(m, vertex, rng);
  step.weights.reserve(last - first);
  for (std::size_t k = first; k < last; ++k)
    step.weights.push_back(combine_weight(m.base.mode, own, drifted(m, g.arc_ref(k).dst, rng)));
  return step;
}

}  // namespace

double TimeVaryingModel::reward_bound() const {
  double bound = 0.0;
  for (std::size_t i = 0; i < base.scores.values.size(); ++i)
    bound += (score_drift == 0.0 || is_fixed(base, i)) ? base.scores.values[i] : kMaxCvss;
  return bound;
}

Snapshot draw_snapshot(const TimeVaryingModel& model, Rng& rng) {
  const AttackGraph& g = *model.base.graph;
  Snapshot s;
  s.present.reserve(g.arc_count());
  for (std::size_t k = 0; k < g.arc_count(); ++k) s.present.push_back(rng.bernoulli(model.edge_availability[k]) ? 1 : 0);
  s.scores.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) s.scores.push_back(drifted(model, i, rng));
  s.weights.reserve(g.arc_count());
  for (std::size_t k = 0; k < g.arc_count(); ++k) {
    const auto& r = g.arc_ref(k);
    s.weights.push_back(combine_weight(model.base.mode, s.scores[r.src], s.scores[r.dst]));
  }
  return s;
}

WeightedGraph sample_snapshot(const TimeVaryingModel& model, std::size_t step, Rng& rng) {
  model.validate();
  if (step >= model.horizon)
    throw ValidationError("step " + std::to_string(step) + " is outside the horizon " + std::to_string(model.horizon));
  const Snapshot s = draw_snapshot(model, rng);
  const AttackGraph& g = *model.base.graph;
  std::vector<Vertex> vertices(g.vertices().begin(), g.vertices().end());
  std::vector<Arc> arcs;
  for (std::size_t k = 0; k < g.arc_count(); ++k)
    if (s.present[k]) arcs.push_back(g.arcs()[k]);
  ScoreAssignment scores = model.base.scores;
  scores.values = s.scores;
  return edge_weights(std::make_shared<const AttackGraph>(AttackGraph::build(std::move(vertices), std::move(arcs))),
                      std::move(scores), model.base.mode);
}

double uct_score(double mean_reward, std::size_t child_visits, std::size_t parent_visits, double c) {
  if (child_visits == 0) return std::numeric_limits<double>::infinity();
  if (c == 0.0) return mean_reward;
  const double parent = static_cast<double>(std::max<std::size_t>(parent_visits, 1));
  return mean_reward + c * std::sqrt(std::log(parent) / static_cast<double>(child_visits));
}

namespace {

struct TreeNode {
  std::size_t vertex = 0;
  std::size_t visits = 0;
  double total_reward = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> children;  // (arc index, node index), arc-ordered

  double mean() const { return visits ? total_reward / static_cast<double>(visits) : 0.0; }

  std::optional<std::size_t> child(std::size_t arc) const {
    const auto it = std::lower_bound(children.begin(), children.end(), std::pair{arc, std::size_t{0}});
    if (it == children.end() || it->first != arc) return std::nullopt;
    return it->second;
  }
};

void validate_config(const MctsConfig& c) {
  if (c.iterations < 1) throw ValidationError("mcts iterations must be >= 1");
  if (!(c.exploration_c >= 0.0) || !std::isfinite(c.exploration_c))
    throw ValidationError("exploration constant must be a finite value >= 0");
  if (c.rollout_depth_cap < 1) throw ValidationError("rollout depth cap must be >= 1");
}

}  // namespace

MctsResult mcts_plan(const TimeVaryingModel& model, VertexId source, VertexId target, const MctsConfig& config) {
  model.validate();
  validate_config(config);
  const AttackGraph& g = *model.base.graph;
  const std::size_t src = g.require_index(source);
  const std::size_t tgt = g.require_index(target);
  if (source == target) throw DegenerateQueryError("source and target are the same vertex");

  const double bound = model.reward_bound();
  const double norm = bound > 0.0 ? bound : 1.0;
  const Rng streams = Rng(model.seed).split(config.seed);

  std::vector<TreeNode> tree(1);
  tree[0].vertex = src;
  MctsResult result;

  std::vector<char> on_path(g.size(), 0);
  std::vector<std::size_t> line;
  std::vector<std::size_t> walked;
  std::vector<std::size_t> options;

  for (std::size_t it = 0; it < config.iterations; ++it) {
    Rng rng = streams.split(it);
    line.assign(1, 0);
    walked.assign(1, src);
    on_path[src] = 1;
    double reward = 0.0;
    std::size_t step = 0;
    std::size_t vertex = src;
    bool expanded = false;

    // Selection and expansion inside the tree.
    while (vertex != tgt && step < model.horizon) {
      const LocalStep local = draw_local(model, vertex, rng);
      std::optional<std::size_t> pick;
      bool untried = false;
      double best_score = -std::numeric_limits<double>::infinity();
      const TreeNode& node = tree[line.back()];
      for (std::size_t j = 0; j < local.present.size(); ++j) {
        const std::size_t k = local.first + j;
        if (!local.present[j] || on_path[g.arc_ref(k).dst]) continue;
        const auto child = node.child(k);
        if (!child) {
          pick = k;
          untried = true;
          break;
        }
        const TreeNode& c = tree[*child];
        const double score = uct_score(c.mean() / norm, c.visits, node.visits, config.exploration_c);
        if (!pick || score > best_score) {
          pick = k;
          best_score = score;
        }
      }
      if (!pick) break;

      std::size_t next_node;
      if (untried) {
        next_node = tree.size();
        TreeNode fresh;
        fresh.vertex = g.arc_ref(*pick).dst;
        tree.push_back(std::move(fresh));
        auto& kids = tree[line.back()].children;
        kids.insert(std::lower_bound(kids.begin(), kids.end(), std::pair{*pick, std::size_t{0}}),
                    {*pick, next_node});
      } else {
        next_node = *tree[line.back()].child(*pick);
      }
      reward += local.weights[*pick - local.first];
      vertex = g.arc_ref(*pick).dst;
      on_path[vertex] = 1;
      walked.push_back(vertex);
      line.push_back(next_node);
      ++step;
      if (untried) {
        expanded = true;
        break;
      }
    }

    // Uniform random rollout from the freshly expanded node.
    if (expanded) {
      for (std::size_t depth = 0; depth < config.rollout_depth_cap && vertex != tgt && step < model.horizon; ++depth) {
        const LocalStep local = draw_local(model, vertex, rng);
        options.clear();
        for (std::size_t j = 0; j < local.present.size(); ++j)
          if (local.present[j] && !on_path[g.arc_ref(local.first + j).dst]) options.push_back(j);
        if (options.empty()) break;
        const std::size_t j = options[rng.below(options.size())];
        reward += local.weights[j];
        vertex = g.arc_ref(local.first + j).dst;
        on_path[vertex] = 1;
        walked.push_back(vertex);
        ++step;
      }
    }

    if (vertex != tgt && config.strict_goal) reward = 0.0;
    result.max_reward = std::max(result.max_reward, reward);
    for (const auto n : line) {
      ++tree[n].visits;
      tree[n].total_reward += reward;
    }
    for (const auto v : walked) on_path[v] = 0;
  }

  // Recommendation: most-visited child at every level, ties to the higher
  // mean and then to the lower arc index.
  std::size_t cur = 0;
  result.recommended_path.push_back(source);
  while (!tree[cur].children.empty()) {
    std::optional<std::size_t> best;
    for (const auto& [arc, child] : tree[cur].children) {
      if (!best || tree[child].visits > tree[*best].visits ||
          (tree[child].visits == tree[*best].visits && tree[child].mean() > tree[*best].mean()))
        best = child;
    }
    cur = *best;
    result.recommended_path.push_back(g.id_at(tree[cur].vertex));
  }
  result.expected_value = tree[cur].mean();
  result.root_visits = tree[0].visits;
  for (const auto& [arc, child] : tree[0].children) {
    const Arc& a = g.arcs()[arc];
    result.per_action[{a.src, a.dst}] = {tree[child].visits, tree[child].mean()};
  }
  result.tree_size = tree.size();
  for (const auto& node : tree) {
    std::size_t sum = 0;
    for (const auto& [arc, child] : node.children) sum += tree[child].visits;
    if (sum > node.visits) result.visit_counts_consistent = false;
  }
  return result;
}

ValueEstimate evaluate_path(const TimeVaryingModel& model, const std::vector<VertexId>& path, std::size_t trials,
                            const Rng& rng) {
  model.validate();
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (path.empty()) throw ValidationError("path is empty");
  const AttackGraph& g = *model.base.graph;
  std::vector<std::size_t> idx;
  std::vector<char> seen(g.size(), 0);
  for (const VertexId id : path) {
    const auto i = g.index_of(id);
    if (!i) throw ValidationError("path vertex " + std::to_string(id) + " is not in the graph");
    if (seen[*i]) throw ValidationError("path revisits vertex " + std::to_string(id));
    seen[*i] = 1;
    idx.push_back(*i);
  }
  std::vector<std::size_t> arcs;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto k = g.arc_index(path[i], path[i + 1]);
    if (!k) throw ValidationError("path steps over a non-arc " + std::to_string(path[i]) + "->" + std::to_string(path[i + 1]));
    arcs.push_back(*k);
  }
  const bool ends_at_target = path.back() == model.base.scores.target;

  ValueEstimate est;
  est.trials = trials;
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t successes = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng episode = rng.split(t);
    double value = 0.0;
    std::size_t pos = 0;
    for (std::size_t step = 0; step < model.horizon && pos < arcs.size(); ++step) {
      const LocalStep local = draw_local(model, idx[pos], episode);
      const std::size_t j = arcs[pos] - local.first;
      if (local.present[j]) {
        value += local.weights[j];
        ++pos;
      }
    }
    if (pos == arcs.size() && ends_at_target) ++successes;
    // Welford: exact when every episode has the same value.
    const double delta = value - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (value - mean);
  }
  est.mean = mean;
  est.success_rate = static_cast<double>(successes) / static_cast<double>(trials);
  if (trials == 1) {
    est.std_error = 0.0;
    est.warnings.push_back("single trial: standard error is not defined and is reported as 0");
  } else {
    const double var = std::max(0.0, m2 / static_cast<double>(trials - 1));
    est.std_error = std::sqrt(var / static_cast<double>(trials));
  }
  return est;
}

std::string_view to_string(Winner winner) {
  switch (winner) {
    case Winner::Spatial:
      return "spatial";
    case Winner::Mcts:
      return "mcts";
    case Winner::Tie:
      return "tie";
  }
  return "tie";
}

Comparison compare(const TimeVaryingModel& model, VertexId source, VertexId target, const MctsConfig& config,
                   std::size_t trials, HeuristicMode mode) {
  model.validate();
  Comparison c;
  c.spatial = plan(model.base, source, target, PlanOptions{mode, false});
  const Rng episodes = Rng(model.seed).split(0xE7A1);
  c.spatial_estimate = evaluate_path(model, c.spatial.path, trials, episodes);
  c.mcts = mcts_plan(model, source, target, config);
  c.mcts_estimate = evaluate_path(model, c.mcts.recommended_path, trials, episodes);
  if (c.mcts_estimate.mean > c.spatial_estimate.mean) {
    c.winner = Winner::Mcts;
  } else if (c.mcts_estimate.mean < c.spatial_estimate.mean) {
    c.winner = Winner::Spatial;
  } else {
    c.winner = Winner::Tie;
  }
  return c;
}

}  // namespace coa
