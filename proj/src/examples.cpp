#include "flowdecomp/examples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flowdecomp/decomp.hpp"
#include "flowdecomp/errors.hpp"
#include "flowdecomp/marcus.hpp"
#include "flowdecomp/report_io.hpp"
#include "flowdecomp/stopgo.hpp"

namespace flowdecomp {

namespace {

constexpr double kPi = std::numbers::pi;

double state_error(const FlowState& a, const FlowState& b) {
  return std::max((a.point - b.point).cwiseAbs().maxCoeff(),
                  (a.jacobian - b.jacobian).cwiseAbs().maxCoeff());
}

nlohmann::json rotation_example(const RunConfig& cfg) {
  const Scenario sc = make_scenario("rotation");
  const DriverPath driver = sample_driver(0, cfg.horizon, cfg.integrator.step, cfg.integrator.seed);
  const Trajectory traj = integrate_flow(sc.system, driver, cfg.integrator, sc.x0);
  const std::vector<double> dets = det_series(traj, sc.split);

  double flow_err = 0.0, det_err = 0.0;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    flow_err = std::max(flow_err, state_error(traj[j], sc.oracle(driver.values[j], sc.x0)));
    det_err = std::max(det_err, std::abs(dets[j] - std::cos(driver.grid[j])));
  }

  // sign changes of the det series against pi/2 + k pi
  nlohmann::json crossings = nlohmann::json::array();
  bool crossings_ok = true;
  const double h = driver.step();
  for (std::size_t j = 0; j + 1 < dets.size(); ++j) {
    if ((dets[j] > 0.0) != (dets[j + 1] > 0.0)) {
      const double t = driver.grid[j + 1];
      const double k = std::round((t - kPi / 2.0) / kPi);
      const double expected = kPi / 2.0 + k * kPi;
      crossings_ok = crossings_ok && std::abs(t - expected) <= h;
      crossings.push_back({{"grid_time", t}, {"expected", expected}});
    }
  }
  const auto expected_count = static_cast<std::size_t>(std::floor(cfg.horizon / kPi + 0.5));
  crossings_ok = crossings_ok && crossings.size() == expected_count;

  return {{"example", "rotation"},
          {"horizon", cfg.horizon},
          {"step", h},
          {"max_flow_error", flow_err},
          {"max_det_error", det_err},
          {"zero_crossings", crossings},
          {"tolerance", 1e-6},
          {"pass", flow_err <= 1e-6 && det_err <= 1e-6 && crossings_ok}};
}

nlohmann::json marcus_check(const Scenario& sc, const FrozenDriver& frozen, const RunConfig& cfg,
                            double threshold) {
  const Trajectory marcus = integrate_marcus(sc.system, frozen, cfg.integrator, sc.x0);
  double err = 0.0, min_det = INFINITY;
  for (std::size_t j = 0; j < marcus.size(); ++j) {
    err = std::max(err, state_error(marcus[j], sc.oracle(frozen.value_at_grid(j), sc.x0)));
    min_det = std::min(min_det, std::abs(vertical_block_det(marcus[j].jacobian, sc.split)));
  }
  return {{"max_error_vs_closed_form", err},
          {"min_abs_det", min_det},
          {"pass", err <= 1e-6 && min_det >= threshold}};
}

nlohmann::json frozen_rotation_example(const RunConfig& cfg) {
  const Scenario sc = make_scenario("frozen-rotation");
  ZoneConfig zones = cfg.zones;
  zones.mode = ZoneMode::Fixed;
  const DriverPath driver = sample_driver(0, cfg.horizon, cfg.integrator.step, cfg.integrator.seed);
  const Trajectory base = integrate_flow(sc.system, driver, cfg.integrator, sc.x0);
  const StoppingTimes times =
      detect_stopping_times(driver.grid, det_series(base, sc.split), zones, cfg.horizon);
  const StoppingTimes analytic = rotation_analytic_times(zones, cfg.horizon);

  bool match = times.intervals.size() == analytic.intervals.size();
  double worst = 0.0;
  for (std::size_t k = 0; match && k < times.intervals.size(); ++k) {
    const auto& got = times.intervals[k];
    const auto& want = analytic.intervals[k];
    worst = std::max(worst, std::abs(got.start - want.start));
    if (got.end.has_value() != want.end.has_value()) match = false;
    if (got.end && want.end) worst = std::max(worst, std::abs(*got.end - *want.end));
  }
  match = match && worst <= driver.step();

  const auto zone_run =
      marcus_check(sc, freeze_driver(driver, times), cfg, zones.delta_red - zones.slack);
  const StoppingTimes schedule = rotation_schedule(zones.epsilon, cfg.horizon);
  auto schedule_run = marcus_check(sc, freeze_driver(driver, schedule), cfg, 0.0);
  schedule_run["pass"] = schedule_run["max_error_vs_closed_form"].get<double>() <= 1e-6 &&
                         schedule_run["min_abs_det"].get<double>() > 0.0;

  return {{"example", "frozen-rotation"},
          {"horizon", cfg.horizon},
          {"zones", {{"delta_red", zones.delta_red}, {"delta_green", zones.delta_green}}},
          {"stopping_times", stopping_times_to_json(times, cfg.horizon)},
          {"max_interval_offset_vs_analytic", worst},
          {"intervals_match_analytic", match},
          {"zone_driver", zone_run},
          {"explicit_schedule",
           {{"epsilon", zones.epsilon},
            {"stopping_times", stopping_times_to_json(schedule, cfg.horizon)},
            {"check", schedule_run}}},
          {"pass", match && zone_run["pass"].get<bool>() && schedule_run["pass"].get<bool>()}};
}

nlohmann::json foliation_example(const RunConfig& cfg) {
  const Scenario sc = make_scenario("foliation3d");
  const DriverPath driver = sample_driver(0, cfg.horizon, cfg.integrator.step, cfg.integrator.seed);
  const Trajectory traj = integrate_flow(sc.system, driver, cfg.integrator, sc.x0);
  const std::vector<double> dets = det_series(traj, sc.split);
  const double delta_red = cfg.zones.delta_red;

  double det_err = 0.0;
  for (std::size_t j = 0; j < dets.size(); ++j) {
    det_err = std::max(det_err, std::abs(dets[j] - std::cos(ramp(driver.grid[j]))));
  }
  const double t_red = ramp_inverse(std::acos(delta_red));
  const double t_flat = kPi / 2.0 + kRampWidth / 2.0;

  std::optional<double> first_red;
  bool stays_red = true;
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (!first_red && std::abs(dets[j]) <= delta_red) first_red = driver.grid[j];
    if (driver.grid[j] >= t_flat && std::abs(dets[j]) > delta_red) stays_red = false;
  }
  const bool red_ok = first_red && std::abs(*first_red - t_red) <= driver.step();

  return {{"example", "foliation3d"},
          {"horizon", cfg.horizon},
          {"max_det_error_vs_cos_f", det_err},
          {"analytic_first_red", t_red},
          {"first_red_grid_time", first_red ? nlohmann::json(*first_red) : nlohmann::json(nullptr)},
          {"flat_from", t_flat},
          {"det_stays_red_after_flat", stays_red},
          {"pass", det_err <= 1e-5 && red_ok && stays_red}};
}

nlohmann::json stopgo_example(const RunConfig& cfg) {
  const Scenario sc = make_scenario("foliation3d-noisy", cfg.params);
  const DriverPath driver = sample_driver(sc.system.noise_count(), cfg.horizon,
                                          cfg.integrator.step, cfg.integrator.seed);
  const StopGoTrajectory sg = stop_and_go(sc.system, driver, sc.split, cfg.zones, cfg.integrator, sc.x0);

  bool equal_outside = true, covered = true;
  double min_det = INFINITY;
  for (std::size_t j = 0; j < sg.base.size(); ++j) {
    if (!sg.frozen[j]) {
      equal_outside = equal_outside && sg.effective[j].point == sg.base[j].point &&
                      sg.effective[j].jacobian == sg.base[j].jacobian;
    }
    if (std::abs(sg.base_det[j]) <= sg.stopping.active_red_threshold(sg.base[j].time, cfg.zones)) {
      covered = covered && sg.frozen[j];
    }
    min_det = std::min(min_det, std::abs(sg.effective_det[j]));
  }
  const double floor = cfg.zones.delta_red - cfg.zones.slack;
  const bool decomposable = cfg.zones.mode == ZoneMode::Fixed ? min_det >= floor : true;
  return {{"example", "stopgo3d"},
          {"horizon", cfg.horizon},
          {"seed", cfg.integrator.seed},
          {"stopping_times", stopping_times_to_json(sg.stopping, cfg.horizon)},
          {"effective_equals_base_outside_freezes", equal_outside},
          {"min_abs_effective_det", min_det},
          {"red_points_covered", covered},
          {"pass", equal_outside && covered && decomposable}};
}

}  // namespace

std::vector<std::string> example_names() {
  return {"rotation", "frozen-rotation", "foliation3d", "stopgo3d"};
}

RunConfig default_example_config(const std::string& name) {
  RunConfig c;
  if (name == "foliation3d") {
    c.scenario = "foliation3d";
    c.horizon = 4.0;
  } else if (name == "stopgo3d") {
    c.scenario = "foliation3d-noisy";
    c.horizon = 6.0;
    c.integrator.seed = 2;
  } else {
    c.scenario = name;
  }
  c.montecarlo.horizon = c.horizon;
  return c;
}

nlohmann::json run_example(const std::string& name, const RunConfig& cfg) {
  if (name == "rotation") return rotation_example(cfg);
  if (name == "frozen-rotation") return frozen_rotation_example(cfg);
  if (name == "foliation3d") return foliation_example(cfg);
  if (name == "stopgo3d") return stopgo_example(cfg);
  throw InvalidArgument("unknown example '" + name + "'");
}

StoppingTimes rotation_analytic_times(const ZoneConfig& zones, double horizon) {
  StoppingTimes out;
  for (int k = 1;; ++k) {
    const double centre = kPi / 2.0 + (k - 1) * kPi;
    FreezeInterval iv;
    iv.index = k;
    iv.start = centre - std::asin(zones.delta_red);
    if (iv.start > horizon) break;
    const double end = centre + std::asin(zones.delta_green);
    if (end <= horizon) iv.end = end;
    iv.red_threshold = zones.delta_red;
    iv.green_threshold = zones.delta_green;
    out.intervals.push_back(iv);
    if (!iv.end) break;
  }
  return out;
}

StoppingTimes rotation_schedule(double epsilon, double horizon) {
  StoppingTimes out;
  for (int n = 0;; ++n) {
    const double critical = kPi / 2.0 + n * kPi;
    const double start = critical - epsilon / std::pow(2.0, n + 1);
    if (start > horizon) break;
    FreezeInterval iv;
    iv.index = n + 1;
    iv.start = start;
    const double end = (2 * n + 1) * kPi - start;
    if (end <= horizon) iv.end = end;
    out.intervals.push_back(iv);
    if (!iv.end) break;
  }
  return out;
}

}  // namespace flowdecomp
