#pragma once

// "Stop and go" process for general (non-commuting) systems: the effective
// flow copies the original flow outside the freeze intervals and holds the
// diffeomorphism reached at T_k inside [T_k, T-bar_k).

#include <vector>

#include "flowdecomp/decomp.hpp"
#include "flowdecomp/sde.hpp"
#include "flowdecomp/zones.hpp"

namespace flowdecomp {

struct StopGoTrajectory {
  Trajectory base;
  Trajectory effective;
  StoppingTimes stopping;
  std::vector<double> base_det;
  std::vector<double> effective_det;
  std::vector<bool> frozen;  // per grid time
};

StopGoTrajectory stop_and_go(const VectorFieldSet& system, const DriverPath& driver,
                             const SplitSpec& split, const ZoneConfig& zones,
                             const IntegratorConfig& cfg, const Vec& x0);

/// Effective trajectory from an already integrated base flow.
StopGoTrajectory assemble_stop_and_go(const VectorFieldSet& system, const DriverPath& driver,
                                      const SplitSpec& split, const ZoneConfig& zones,
                                      const IntegratorConfig& cfg, Trajectory base);

}  // namespace flowdecomp
