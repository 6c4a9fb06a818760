#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>

#include "raceduel/eval.hpp"
#include "raceduel/sim.hpp"

namespace raceduel {

/// Everything an INI-style run configuration can set. Sections:
/// [track] [vehicle] [blocking] [gg] [planner] [planner.NAME] [scenario]
/// [grid] [noise] [sim]. Unset keys keep their defaults.
struct RunConfig {
  ScenarioConfig scenario;
  EvaluationGrid grid = EvaluationGrid::standard();
  std::map<std::string, CostWeights> presets;  // [planner.NAME] overrides
  std::string policy_path;
};

/// Resolves relative file references (gg table, policy) against `base_dir`.
RunConfig parse_run_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

/// Parses "lo:step:hi" ranges or comma-separated lists.
std::vector<double> parse_value_list(const std::string& text);

/// Conventional planner by preset name, consulting `presets` first.
PlannerSpec conventional_planner(const RunConfig& config, const std::string& name);

}  // namespace raceduel
