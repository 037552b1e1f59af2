#include "flowdecomp/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <optional>
#include <string>

#include "flowdecomp/config.hpp"
#include "flowdecomp/decomp.hpp"
#include "flowdecomp/errors.hpp"
#include "flowdecomp/examples.hpp"
#include "flowdecomp/marcus.hpp"
#include "flowdecomp/montecarlo.hpp"
#include "flowdecomp/report_io.hpp"
#include "flowdecomp/stopgo.hpp"

namespace flowdecomp {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string example;
};

RunConfig resolve(const Options& o, const RunConfig& fallback) {
  RunConfig c = o.config.empty() ? fallback : load_config(o.config);
  if (o.seed) {
    c.integrator.seed = *o.seed;
    c.montecarlo.seed_base = *o.seed;
  }
  return c;
}

DriverPath driver_for(const Scenario& sc, const RunConfig& c) {
  return sample_driver(sc.system.noise_count(), c.horizon, c.integrator.step, c.integrator.seed);
}

int cmd_simulate(const RunConfig& c, const fs::path& out, std::ostream& os) {
  const Scenario sc = build_scenario(c);
  const DriverPath driver = driver_for(sc, c);
  const Trajectory traj = integrate_flow(sc.system, driver, c.integrator, sc.x0);
  const auto dets = det_series(traj, sc.split);
  const auto times = detect_stopping_times(driver.grid, dets, c.zones, c.horizon);
  write_text(out / "trajectory.csv", series_csv(make_series(traj, dets, c.zones, times, {})));
  os << "simulate: " << sc.name << ", " << traj.size() << " grid times -> "
     << (out / "trajectory.csv").string() << "\n";
  return 0;
}

int cmd_decompose(const RunConfig& c, const fs::path& out, std::ostream& os) {
  const Scenario sc = build_scenario(c);
  const DriverPath driver = driver_for(sc, c);
  std::vector<double> times = c.decompose_times;
  if (times.empty()) times = {c.horizon};
  std::vector<Vec> points = c.decompose_points;
  if (points.empty()) points = {sc.x0};

  nlohmann::json records = nlohmann::json::array();
  int failures = 0;
  for (double t : times) {
    const FlowMap map = FlowMap::from_driver(sc.system, driver, c.integrator, t);
    for (const Vec& xy : points) {
      nlohmann::json r;
      r["time"] = t;
      r["point"] = std::vector<double>(xy.data(), xy.data() + xy.size());
      try {
        const FlowState phi = map.evaluate(xy);
        r["decomposable"] = is_p_decomposable(phi.jacobian, sc.split, 1e-8);
        r["decomposition"] = decomposition_to_json(decomposition_residual(map, sc.split, xy, c.integrator));
      } catch (const NotDecomposableError& e) {
        r["error"] = e.what();
        ++failures;
      } catch (const NoConvergenceError& e) {
        r["error"] = e.what();
        ++failures;
      }
      records.push_back(r);
    }
  }
  write_json(out / "decomposition.json", {{"scenario", sc.name}, {"records", records}});
  os << "decompose: " << records.size() << " records (" << failures << " not decomposable) -> "
     << (out / "decomposition.json").string() << "\n";
  return 0;
}

int cmd_freeze(const RunConfig& c, const fs::path& out, std::ostream& os) {
  const Scenario sc = build_scenario(c);
  const DriverPath driver = driver_for(sc, c);
  const Trajectory base = integrate_flow(sc.system, driver, c.integrator, sc.x0);
  const auto base_det = det_series(base, sc.split);
  const StoppingTimes times = detect_stopping_times(driver.grid, base_det, c.zones, c.horizon);
  const FrozenDriver frozen = freeze_driver(driver, times);
  const Trajectory marcus = integrate_marcus(sc.system, frozen, c.integrator, sc.x0);

  std::vector<bool> flags;
  for (double t : driver.grid) flags.push_back(times.frozen_at(t));
  nlohmann::json st = stopping_times_to_json(times, c.horizon);
  nlohmann::json jumps = nlohmann::json::array();
  for (const auto& jr : frozen.jumps()) {
    jumps.push_back({{"time", jr.time},
                     {"interval", jr.interval},
                     {"increment", std::vector<double>(jr.increment.data(),
                                                       jr.increment.data() + jr.increment.size())}});
  }
  st["jumps"] = jumps;
  st["scenario"] = sc.name;
  st["mode"] = to_string(c.zones.mode);

  write_json(out / "stopping_times.json", st);
  write_text(out / "frozen_driver.csv", driver_csv(frozen));
  write_text(out / "base.csv", series_csv(make_series(base, base_det, c.zones, times, flags)));
  write_text(out / "marcus.csv",
             series_csv(make_series(marcus, det_series(marcus, sc.split), c.zones, times, flags)));
  os << "freeze: " << times.intervals.size() << " freeze intervals, measure "
     << format_number(discrepancy_measure(times, c.horizon)) << " -> " << out.string() << "\n";
  return 0;
}

int cmd_stopgo(const RunConfig& c, const fs::path& out, std::ostream& os) {
  const Scenario sc = build_scenario(c);
  const DriverPath driver = driver_for(sc, c);
  const StopGoTrajectory sg = stop_and_go(sc.system, driver, sc.split, c.zones, c.integrator, sc.x0);
  write_json(out / "stopping_times.json", stopping_times_to_json(sg.stopping, c.horizon));
  write_text(out / "stopgo_base.csv",
             series_csv(make_series(sg.base, sg.base_det, c.zones, sg.stopping, sg.frozen)));
  write_text(out / "stopgo_effective.csv",
             series_csv(make_series(sg.effective, sg.effective_det, c.zones, sg.stopping, sg.frozen)));
  os << "stopgo: " << sg.stopping.intervals.size() << " freeze intervals -> " << out.string()
     << "\n";
  return 0;
}

int cmd_montecarlo(const RunConfig& c, const fs::path& out, std::ostream& os) {
  const Scenario sc = build_scenario(c);
  MonteCarloConfig mc = c.montecarlo;
  mc.horizon = c.horizon;
  const MonteCarloReport rep = run_montecarlo(sc, c.zones, c.integrator, mc);
  write_json(out / "montecarlo.json", montecarlo_to_json(rep));
  os << "montecarlo: N=" << rep.trials << " P[mu(C) > " << format_number(rep.a)
     << "] = " << format_number(rep.exceedance) << " +/- " << format_number(rep.ci_halfwidth)
     << " (epsilon " << format_number(rep.epsilon) << ")\n";
  return 0;
}

int cmd_example(const std::string& name, const RunConfig& c, const fs::path& out,
                std::ostream& os) {
  const nlohmann::json report = run_example(name, c);
  write_json(out / ("example_" + name + ".json"), report);
  os << report.dump(2) << "\n";
  return report.at("pass").get<bool>() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decomposition of stochastic flows: simulation, freezing and stop-and-go"};
  app.require_subcommand(1);
  Options opts;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opts.config, "JSON run configuration")->check(CLI::ExistingFile);
    if (config_required) c->required();
    sub->add_option("--seed", seed_value, "override the RNG seed");
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
  };
  auto* simulate = app.add_subcommand("simulate", "trajectory and det series CSV");
  auto* decompose = app.add_subcommand("decompose", "xi / Psi decomposition records");
  auto* freeze = app.add_subcommand("freeze", "stopping times, frozen driver and Marcus trajectory");
  auto* stopgo = app.add_subcommand("stopgo", "stop-and-go trajectories");
  auto* montecarlo = app.add_subcommand("montecarlo", "Monte Carlo estimate of P[mu(C) > a]");
  auto* example = app.add_subcommand("example", "built-in run with closed-form comparison");
  for (auto* sub : {simulate, decompose, freeze, stopgo, montecarlo}) add_common(sub, true);
  add_common(example, false);
  example->add_option("name", opts.example, "example name")
      ->required()
      ->check(CLI::IsMember(example_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      if (sub->count("--seed") > 0) opts.seed = seed_value;
    }
    const fs::path dir = opts.out;
    fs::create_directories(dir);
    if (*simulate) return cmd_simulate(resolve(opts, {}), dir, out);
    if (*decompose) return cmd_decompose(resolve(opts, {}), dir, out);
    if (*freeze) return cmd_freeze(resolve(opts, {}), dir, out);
    if (*stopgo) return cmd_stopgo(resolve(opts, {}), dir, out);
    if (*montecarlo) return cmd_montecarlo(resolve(opts, {}), dir, out);
    if (*example) {
      return cmd_example(opts.example, resolve(opts, default_example_config(opts.example)), dir, out);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace flowdecomp
