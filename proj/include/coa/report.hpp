#pragma once

// JSON report family ("coa-report/1"). Key order is fixed so that identical
// runs produce byte-identical files; wall-clock time is only written when
// explicitly requested.
//
//   {
//     "schema": "coa-report/1",
//     "command": "plan" | "temporal",
//     "source": <id>, "target": <id>,
//     "heuristic": "reachable-sum" | "dp-exact",
//     "edgeWeight": "src" | "dst" | "avg",
//     "path": [<id>, ...],
//     "totalValue": <number>,
//     "expandedCount": <int>,
//     "steps": [{"vertex": <id>, "g": <number>, "f": <number>}, ...],
//     "elapsedMs": <number>,            // only with timing enabled
//     "warnings": [<text>, ...],
//     "temporal": { ... }               // temporal command only
//   }
//
// The temporal section:
//
//   {
//     "model": {"horizon", "drift", "seed", "defaultAvailability",
//               "arcAvailability": [{"src", "dst", "p"}, ...]},
//     "mcts": {"iterations", "explorationC", "rolloutDepthCap", "seed", "strictGoal"},
//     "trials": <int>,
//     "spatial": {"path": [...], "estimate": <estimate>},
//     "mctsPlan": {"path": [...], "expectedValue", "rootVisits",
//                  "actions": [{"src", "dst", "visits", "meanReward"}, ...],
//                  "estimate": <estimate>},
//     "winner": "spatial" | "mcts" | "tie"
//   }
//
// where <estimate> is {"mean", "stdError", "trials", "successRate", "warnings"}.

#include <string>
#include <vector>

#include "json.hpp"

#include "coa/search.hpp"
#include "coa/temporal.hpp"

namespace coa {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "coa-report/1";

struct ReportContext {
  std::string command = "plan";
  VertexId source = 0;
  VertexId target = 0;
  EdgeWeightMode edge_weight = EdgeWeightMode::Dst;
  bool include_timing = false;
  std::vector<std::string> warnings;
};

Json search_report(const SearchResult& result, const ReportContext& ctx);

Json estimate_json(const ValueEstimate& estimate);

/// Base report for the spatial plan plus the "temporal" section.
/// `default_availability` is the value arcs take unless listed in the model
/// with a different probability.
Json temporal_report(const Comparison& comparison, const TimeVaryingModel& model, const MctsConfig& config,
                     std::size_t trials, double default_availability, const ReportContext& ctx);

/// Pretty-printed with a trailing newline.
std::string dump_report(const Json& report);

}  // namespace coa
