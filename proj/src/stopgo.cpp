#include "flowdecomp/stopgo.hpp"

#include <utility>

#include "flowdecomp/errors.hpp"

namespace flowdecomp {

StopGoTrajectory stop_and_go(const VectorFieldSet& system, const DriverPath& driver,
                             const SplitSpec& split, const ZoneConfig& zones,
                             const IntegratorConfig& cfg, const Vec& x0) {
  split.validate();
  if (split.n != system.dimension()) throw InvalidArgument("split does not match the system");
  return assemble_stop_and_go(system, driver, split, zones, cfg,
                              integrate_flow(system, driver, cfg, x0));
}

StopGoTrajectory assemble_stop_and_go(const VectorFieldSet& system, const DriverPath& driver,
                                      const SplitSpec& split, const ZoneConfig& zones,
                                      const IntegratorConfig& cfg, Trajectory base) {
  if (base.size() != driver.size()) throw InvalidArgument("base trajectory is not on the driver grid");
  StopGoTrajectory out;
  out.base_det = det_series(base, split);
  out.stopping = detect_stopping_times(driver.grid, out.base_det, zones, driver.horizon());

  // phi at each T_k; a partial step from the preceding grid state when T_k is
  // between grid points.
  std::vector<FlowState> held;
  held.reserve(out.stopping.intervals.size());
  for (const auto& iv : out.stopping.intervals) {
    const std::size_t j = driver.segment_of(iv.start);
    if (iv.start == driver.grid[j]) {
      held.push_back(base[j]);
    } else if (iv.start == driver.grid[j + 1]) {
      held.push_back(base[j + 1]);
    } else {
      held.push_back(advance(system, cfg, base[j], driver.value_at(iv.start) - driver.values[j],
                             iv.start));
    }
  }

  out.effective.reserve(base.size());
  out.frozen.reserve(base.size());
  for (std::size_t j = 0; j < base.size(); ++j) {
    const FreezeInterval* iv = out.stopping.find(base[j].time);
    if (iv) {
      FlowState s = held[static_cast<std::size_t>(iv - out.stopping.intervals.data())];
      s.time = base[j].time;
      out.effective.push_back(std::move(s));
    } else {
      out.effective.push_back(base[j]);
    }
    out.frozen.push_back(iv != nullptr);
  }
  out.effective_det = det_series(out.effective, split);
  out.base = std::move(base);
  return out;
}

}  // namespace flowdecomp
