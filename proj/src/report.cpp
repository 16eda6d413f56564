#include "coa/report.hpp"

namespace coa {

Json search_report(const SearchResult& result, const ReportContext& ctx) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = ctx.command;
  j["source"] = ctx.source;
  j["target"] = ctx.target;
  j["heuristic"] = std::string(to_string(result.mode));
  j["edgeWeight"] = std::string(to_string(ctx.edge_weight));
  j["path"] = result.path;
  j["totalValue"] = result.total_value;
  j["expandedCount"] = result.expanded_count;
  Json steps = Json::array();
  for (const auto& s : result.per_step) steps.push_back({{"vertex", s.vertex}, {"g", s.g}, {"f", s.f}});
  j["steps"] = std::move(steps);
  if (ctx.include_timing)
    j["elapsedMs"] = std::chrono::duration<double, std::milli>(result.elapsed).count();
  j["warnings"] = ctx.warnings;
  return j;
}

Json estimate_json(const ValueEstimate& e) {
  return Json{{"mean", e.mean},
              {"stdError", e.std_error},
              {"trials", e.trials},
              {"successRate", e.success_rate},
              {"warnings", e.warnings}};
}

Json temporal_report(const Comparison& c, const TimeVaryingModel& model, const MctsConfig& config, std::size_t trials,
                     double default_availability, const ReportContext& ctx) {
  Json j = search_report(c.spatial, ctx);

  Json arcs = Json::array();
  const auto graph_arcs = model.base.graph->arcs();
  for (std::size_t k = 0; k < graph_arcs.size(); ++k) {
    if (model.edge_availability[k] != default_availability)
      arcs.push_back({{"src", graph_arcs[k].src}, {"dst", graph_arcs[k].dst}, {"p", model.edge_availability[k]}});
  }

  Json actions = Json::array();
  for (const auto& [arc, stats] : c.mcts.per_action)
    actions.push_back({{"src", arc.first}, {"dst", arc.second}, {"visits", stats.visits}, {"meanReward", stats.mean_reward}});

  Json t;
  t["model"] = Json{{"horizon", model.horizon},
                    {"drift", model.score_drift},
                    {"seed", model.seed},
                    {"defaultAvailability", default_availability},
                    {"arcAvailability", std::move(arcs)}};
  t["mcts"] = Json{{"iterations", config.iterations},
                   {"explorationC", config.exploration_c},
                   {"rolloutDepthCap", config.rollout_depth_cap},
                   {"seed", config.seed},
                   {"strictGoal", config.strict_goal}};
  t["trials"] = trials;
  t["spatial"] = Json{{"path", c.spatial.path}, {"estimate", estimate_json(c.spatial_estimate)}};
  t["mctsPlan"] = Json{{"path", c.mcts.recommended_path},
                       {"expectedValue", c.mcts.expected_value},
                       {"rootVisits", c.mcts.root_visits},
                       {"actions", std::move(actions)},
                       {"estimate", estimate_json(c.mcts_estimate)}};
  t["winner"] = std::string(to_string(c.winner));
  j["temporal"] = std::move(t);
  return j;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace coa
