#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coa/attack_graph.hpp"

namespace coa {

inline constexpr double kSourceValue = 0.01;
inline constexpr double kTargetValue = 100.0;
inline constexpr double kPrivilegeValue = 1.5;
inline constexpr double kMaxCvss = 10.0;

struct VulnRecord {
  std::string cve_id;
  double base_score = 0.0;
  double exploitability_score = 0.0;

  bool operator==(const VulnRecord&) const = default;
};

class VulnDb {
 public:
  /// Throws DuplicateIdError on a repeated CVE id and ValidationError when a
  /// score leaves [0, 10] or the id is empty.
  void add(VulnRecord record);

  const VulnRecord* find(std::string_view cve_id) const;
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::map<std::string, VulnRecord, std::less<>>& records() const noexcept { return records_; }

 private:
  std::map<std::string, VulnRecord, std::less<>> records_;
};

/// Accepts a JSON array of {cveId, baseScore, exploitabilityScore} or CSV
/// with a `cveId,baseScore,exploitabilityScore` header line.
VulnDb load_vuln_db(std::string_view text);

/// baseScore * exploitabilityScore / 10. Throws DomainError outside [0, 10].
double score_vul(double base_score, double exploitability_score);

struct ScoringOptions {
  bool strict_cve = true;
  std::vector<std::string> privilege_predicates{"execCode", "accessFile"};
  std::string vulnerability_predicate = "vulExists";
};

struct ScoreAssignment {
  std::vector<double> values;  // by dense vertex index
  VertexId source = 0;
  VertexId target = 0;
  std::vector<std::string> warnings;

  double value_at(std::size_t index) const { return values[index]; }
};

/// Node values: source 0.01, target 100, vulExists nodes Score_vul of their
/// CVE, execCode/accessFile nodes 1.5, everything else 0. Source and target
/// override every other rule.
ScoreAssignment assign_node_scores(const AttackGraph& graph, const VulnDb& db, VertexId source,
                                   VertexId target, const ScoringOptions& options = {});

enum class EdgeWeightMode { Src, Dst, Avg };

std::string_view to_string(EdgeWeightMode mode);
std::optional<EdgeWeightMode> parse_edge_weight_mode(std::string_view text);

double combine_weight(EdgeWeightMode mode, double src_value, double dst_value);

struct WeightedGraph {
  std::shared_ptr<const AttackGraph> graph;
  ScoreAssignment scores;
  EdgeWeightMode mode = EdgeWeightMode::Dst;
  std::vector<double> weights;  // by arc index

  std::optional<double> weight(VertexId src, VertexId dst) const;
};

WeightedGraph edge_weights(std::shared_ptr<const AttackGraph> graph, ScoreAssignment scores,
                           EdgeWeightMode mode = EdgeWeightMode::Dst);

}  // namespace coa
