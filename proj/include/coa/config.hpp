#pragma once

// Run configuration: a TOML-style key/value file plus command-line overrides.
//
//   # comment
//   [section]            or [section.sub]
//   key = "text"         strings use double quotes, \" and \\ escapes
//   key = 12.5           numbers
//   key = true           booleans
//   key = ["a", "b"]     single-line arrays of strings or numbers
//   "4->3" = 0.0         quoted keys for names that are not bare words
//
// Keys are addressed by their dotted path, e.g. "temporal.horizon".

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "coa/attack_graph.hpp"
#include "coa/scoring.hpp"
#include "coa/search.hpp"
#include "coa/temporal.hpp"

namespace coa {

class ConfigFile {
 public:
  using Scalar = std::variant<bool, double, std::string>;
  using Value = std::variant<bool, double, std::string, std::vector<Scalar>>;

  /// Throws ParseError with the offending line number.
  static ConfigFile parse(std::string_view text);

  bool contains(const std::string& key) const { return values_.contains(key); }
  bool has_section(std::string_view section) const;
  std::vector<std::string> keys() const;

  /// Typed getters throw ValidationError on a type mismatch.
  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_number(const std::string& key) const;
  std::optional<std::int64_t> get_integer(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<std::string>> get_string_list(const std::string& key) const;

 private:
  const Value* find(const std::string& key) const;

  std::map<std::string, Value> values_;
  std::vector<std::string> sections_;
};

struct TemporalParams {
  double default_availability = 1.0;
  std::map<std::pair<VertexId, VertexId>, double> arc_availability;
  double drift = 0.0;
  std::size_t horizon = 16;
  std::uint64_t seed = 0;
  std::size_t trials = 1000;
};

struct RunConfig {
  std::string vertices_path;
  std::string arcs_path;
  std::string vulndb_path;
  bool reverse_arcs = true;
  std::optional<VertexId> source;
  std::optional<VertexId> target;
  HeuristicMode heuristic = HeuristicMode::ReachableSum;
  EdgeWeightMode edge_weight = EdgeWeightMode::Dst;
  ScoringOptions scoring;
  std::optional<TemporalParams> temporal;
  std::optional<MctsConfig> mcts;
  std::string output_path;
  std::string dot_path;
  bool timing = false;
};

/// Applies every recognised key of `file` to `config`. Relative paths are
/// resolved against `base_dir`. Unknown keys are rejected (ValidationError).
void apply_config_file(const ConfigFile& file, const std::string& base_dir, RunConfig& config);

/// Builds the time-varying model from the temporal parameters.
/// Throws ValidationError for availability entries naming a non-arc.
TimeVaryingModel build_model(WeightedGraph base, const TemporalParams& params);

}  // namespace coa
