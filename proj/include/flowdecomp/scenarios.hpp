#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "flowdecomp/decomp.hpp"
#include "flowdecomp/sde.hpp"

namespace flowdecomp {

using ScenarioParams = std::map<std::string, double>;

struct Scenario {
  std::string name;
  std::string description;
  VectorFieldSet system;
  SplitSpec split;
  Vec x0;
  /// Points at which the field flows are tested for commutativity.
  std::vector<Vec> probe_points;
  bool commuting = false;
  /// Closed form of phi(u) at the initial condition x, for commuting
  /// built-ins; the flow at time t is oracle(U_t, x).
  std::function<FlowState(const Vec& u, const Vec& x)> oracle;
};

std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name, const ScenarioParams& params = {});

/// Smoothed clamp to [-pi/2, pi/2]: identity in the middle, flat outside, and
/// joined by a quadratic blend (continuous first derivative) of total width
/// kRampWidth around each corner.
inline constexpr double kRampWidth = 0.1;
double ramp(double z);
double ramp_derivative(double z);
double ramp_second_derivative(double z);
/// Smallest z >= 0 with ramp(z) = value, for value in [0, pi/2].
double ramp_inverse(double value);

}  // namespace flowdecomp
