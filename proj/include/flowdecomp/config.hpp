#pragma once

// Run configuration, read from a single JSON file:
//
// {
//   "scenario": "rotation-noise",          // see scenario_names()
//   "params": {"sigma": 0.5},              // scenario parameters (optional)
//   "x0": [1, 0],                          // overrides the scenario's x0
//   "p": 1,                                // overrides the horizontal dimension
//   "horizon": 6.283185307179586,
//   "step": 0.001, "substeps": 2,
//   "newton_tolerance": 1e-11, "newton_max_iterations": 50,
//   "det_floor": 1e-12, "seed": 1,
//   "zones": {"mode": "fixed", "delta_red": 0.05, "delta_green": 0.2,
//             "rho": 0.5, "epsilon": 0.1, "a": 0.5, "slack": 1e-4},
//   "montecarlo": {"trials": 500, "seed_base": 1},
//   "decompose": {"times": [0.5], "points": [[1, 0]]}
// }
//
// Unknown keys are rejected.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowdecomp/montecarlo.hpp"
#include "flowdecomp/scenarios.hpp"
#include "flowdecomp/sde.hpp"
#include "flowdecomp/zones.hpp"

namespace flowdecomp {

struct RunConfig {
  std::string scenario = "rotation";
  ScenarioParams params;
  std::optional<Vec> x0;
  std::optional<int> p;
  double horizon = 12.566370614359172;  // 4 pi
  IntegratorConfig integrator;
  ZoneConfig zones;
  MonteCarloConfig montecarlo;
  std::vector<double> decompose_times;
  std::vector<Vec> decompose_points;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// The configured built-in with x0 / p overrides applied.
Scenario build_scenario(const RunConfig& cfg);

}  // namespace flowdecomp
