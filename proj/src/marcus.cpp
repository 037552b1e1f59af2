#include "flowdecomp/marcus.hpp"

#include <algorithm>

#include "flowdecomp/errors.hpp"

namespace flowdecomp {

Vec marcus_jump(const VectorFieldSet& system, const Vec& x, const Vec& dz,
                const IntegratorConfig& cfg) {
  if (!dz.allFinite()) throw InvalidArgument("jump increment must be finite");
  return flow_of_combination(system, dz, x, cfg);
}

Mat marcus_jump_jacobian(const VectorFieldSet& system, const Vec& x, const Vec& dz,
                         const IntegratorConfig& cfg) {
  const int n = system.dimension();
  const double h = fd_step(x);
  Mat out(n, n);
  Vec xp = x, xm = x;
  for (int c = 0; c < n; ++c) {
    xp(c) = x(c) + h;
    xm(c) = x(c) - h;
    out.col(c) = (marcus_jump(system, xp, dz, cfg) - marcus_jump(system, xm, dz, cfg)) / (2.0 * h);
    xp(c) = x(c);
    xm(c) = x(c);
  }
  return out;
}

namespace {

struct Event {
  double time;
  bool is_end;
  std::size_t pos;  // position of the interval / its jump record
};

}  // namespace

Trajectory integrate_marcus(const VectorFieldSet& system, const FrozenDriver& frozen,
                            const IntegratorConfig& cfg, const Vec& x0) {
  cfg.validate();
  const DriverPath& driver = frozen.base();
  if (x0.size() != system.dimension()) throw InvalidArgument("initial condition has wrong length");
  if (driver.noise_count() != system.noise_count()) {
    throw InvalidArgument("driver noise components do not match the system's diffusion fields");
  }

  std::vector<Event> events;
  const auto& intervals = frozen.stopping_times().intervals;
  std::size_t jump_pos = 0;
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    events.push_back({intervals[k].start, false, k});
    if (intervals[k].end) events.push_back({*intervals[k].end, true, jump_pos++});
  }

  const int n = system.dimension();
  Vec x = x0;
  Mat jac = Mat::Identity(n, n);
  bool held = false;
  std::size_t e = 0;

  auto apply = [&](const Event& ev) {
    if (!ev.is_end) {
      held = true;
      return;
    }
    const Vec& dz = frozen.jumps()[ev.pos].increment;
    const Mat jump_jac = marcus_jump_jacobian(system, x, dz, cfg);
    x = marcus_jump(system, x, dz, cfg);
    jac = jump_jac * jac;
    check_finite(x, jac, cfg, ev.time);
    held = false;
  };

  while (e < events.size() && events[e].time <= driver.grid[0]) apply(events[e++]);

  Trajectory out;
  out.reserve(driver.size());
  out.push_back({driver.grid[0], x, jac});

  HeunStepper stepper(system);
  Vec increment(system.field_count());
  for (std::size_t j = 0; j + 1 < driver.size(); ++j) {
    const double ta = driver.grid[j];
    const double tb = driver.grid[j + 1];
    if (e >= events.size() || events[e].time > tb) {
      if (!held) {
        increment = driver.values[j + 1] - driver.values[j];
        stepper.step(increment, cfg.substeps, x, jac);
        check_finite(x, jac, cfg, ta);
      }
      out.push_back({tb, x, jac});
      continue;
    }

    // Split the grid step at the events it contains.
    auto driver_at = [&](double t) -> Vec {
      if (t == ta) return driver.values[j];
      if (t == tb) return driver.values[j + 1];
      return driver.values[j] + ((t - ta) / (tb - ta)) * (driver.values[j + 1] - driver.values[j]);
    };
    double cursor = ta;
    while (e < events.size() && events[e].time <= tb) {
      const double te = std::max(events[e].time, cursor);
      if (!held && te > cursor) {
        increment = driver_at(te) - driver_at(cursor);
        stepper.step(increment, cfg.substeps, x, jac);
        check_finite(x, jac, cfg, cursor);
      }
      cursor = te;
      apply(events[e++]);
    }
    if (!held && cursor < tb) {
      increment = driver.values[j + 1] - driver_at(cursor);
      stepper.step(increment, cfg.substeps, x, jac);
      check_finite(x, jac, cfg, cursor);
    }
    out.push_back({tb, x, jac});
  }
  return out;
}

Vec compose_commuting_flow(const VectorFieldSet& system, const Vec& u, const Vec& x0,
                           const IntegratorConfig& cfg) {
  if (u.size() != system.field_count()) {
    throw InvalidArgument("composition weights must have one entry per field");
  }
  Vec x = x0;
  for (int i = system.field_count() - 1; i >= 0; --i) {
    if (u(i) == 0.0) continue;
    Vec w = Vec::Zero(u.size());
    w(i) = u(i);
    x = flow_of_combination(system, w, x, cfg);
  }
  return x;
}

}  // namespace flowdecomp
