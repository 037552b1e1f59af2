#pragma once

// Built-in runs with closed-form comparisons, used by `flowdecomp example`.

#include <string>
#include <vector>

#include <json.hpp>

#include "flowdecomp/config.hpp"

namespace flowdecomp {

std::vector<std::string> example_names();
/// Configuration an example uses when none is supplied.
RunConfig default_example_config(const std::string& name);
/// Report object; the boolean key "pass" carries the overall verdict.
nlohmann::json run_example(const std::string& name, const RunConfig& cfg);

/// Analytic freeze intervals of the rotation det cos t under fixed zones, up to
/// the horizon: T_k = pi/2 + (k-1) pi - asin(delta_red) and
/// T-bar_k = pi/2 + (k-1) pi + asin(delta_green).
StoppingTimes rotation_analytic_times(const ZoneConfig& zones, double horizon);

/// Explicit schedule p_n in (pi/2 + n pi - eps/2^n, pi/2 + n pi) (the
/// midpoint is used) with release at (2n+1) pi - p_n.
StoppingTimes rotation_schedule(double epsilon, double horizon);

}  // namespace flowdecomp
