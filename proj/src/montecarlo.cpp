#include "flowdecomp/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "flowdecomp/decomp.hpp"
#include "flowdecomp/errors.hpp"
#include "flowdecomp/marcus.hpp"

namespace flowdecomp {

double exceedance_fraction(const std::vector<double>& mu, double a) {
  if (mu.empty()) return 0.0;
  const auto count = std::count_if(mu.begin(), mu.end(), [a](double v) { return v > a; });
  return static_cast<double>(count) / static_cast<double>(mu.size());
}

double binomial_halfwidth(double fraction, std::size_t n) {
  if (n == 0) return 0.0;
  return 3.0 * std::sqrt(fraction * (1.0 - fraction) / static_cast<double>(n));
}

TrialResult run_trial(const Scenario& scenario, const ZoneConfig& zones,
                      const IntegratorConfig& cfg, double horizon, std::uint64_t seed) {
  TrialResult r;
  r.seed = seed;
  try {
    const DriverPath driver =
        sample_driver(scenario.system.noise_count(), horizon, cfg.step, seed);
    const Trajectory base = integrate_flow(scenario.system, driver, cfg, scenario.x0);
    const std::vector<double> dets = det_series(base, scenario.split);
    const StoppingTimes times = detect_stopping_times(driver.grid, dets, zones, horizon);
    const FrozenDriver frozen = freeze_driver(driver, times);
    const Trajectory marcus = integrate_marcus(scenario.system, frozen, cfg, scenario.x0);

    r.mu_c = discrepancy_measure(times, horizon);
    r.freeze_count = static_cast<int>(times.intervals.size());
    for (const auto& iv : times.intervals) {
      if (iv.duration(horizon) > zones.duration_budget(iv.index)) r.budget_violation = true;
    }
    for (const auto& s : marcus) {
      const double d = std::abs(vertical_block_det(s.jacobian, scenario.split));
      if (d < times.active_red_threshold(s.time, zones) - zones.slack) {
        r.marcus_decomposable = false;
        break;
      }
    }
  } catch (const ExplosionError&) {
    r.excluded = true;
  }
  return r;
}

MonteCarloReport aggregate(const std::string& scenario, const ZoneConfig& zones,
                           const MonteCarloConfig& mc, const std::vector<TrialResult>& trials) {
  MonteCarloReport rep;
  rep.scenario = scenario;
  rep.trials = mc.trials;
  rep.horizon = mc.horizon;
  rep.a = zones.a;
  rep.epsilon = zones.epsilon;
  for (const auto& t : trials) {
    if (t.excluded) {
      ++rep.excluded_trials;
      continue;
    }
    rep.mu_c.push_back(t.mu_c);
    rep.freeze_counts.push_back(t.freeze_count);
    if (t.budget_violation) ++rep.budget_violations;
    if (t.marcus_decomposable) ++rep.marcus_decomposable_trials;
  }
  rep.exceedance = exceedance_fraction(rep.mu_c, rep.a);
  rep.ci_halfwidth = binomial_halfwidth(rep.exceedance, rep.mu_c.size());
  if (!rep.mu_c.empty()) {
    double sum = 0.0;
    for (double v : rep.mu_c) sum += v;
    rep.mean_mu_c = sum / static_cast<double>(rep.mu_c.size());
    rep.max_mu_c = *std::max_element(rep.mu_c.begin(), rep.mu_c.end());
  }
  return rep;
}

namespace {

ZoneConfig prepare(const Scenario& scenario, const ZoneConfig& zones, const IntegratorConfig& cfg,
                   const MonteCarloConfig& mc) {
  if (mc.trials < 100) throw InvalidArgument("Monte Carlo needs at least 100 trials");
  if (!(mc.horizon > 0.0)) throw InvalidArgument("Monte Carlo horizon must be positive");
  const auto report =
      verify_commutativity(scenario.system, scenario.probe_points, 0.5, 0.5, 1e-8, cfg);
  if (!report.commuting) {
    throw InvalidArgument("scenario '" + scenario.name +
                          "' is not commuting; the frozen-driver construction does not apply");
  }
  ZoneConfig shrinking = zones;
  shrinking.mode = ZoneMode::Shrinking;
  shrinking.validate();
  return shrinking;
}

}  // namespace

MonteCarloReport run_montecarlo(const Scenario& scenario, const ZoneConfig& zones,
                                const IntegratorConfig& cfg, const MonteCarloConfig& mc) {
  const ZoneConfig shrinking = prepare(scenario, zones, cfg, mc);
  std::vector<TrialResult> results(static_cast<std::size_t>(mc.trials));
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < mc.trials; ++i) {
    results[static_cast<std::size_t>(i)] =
        run_trial(scenario, shrinking, cfg, mc.horizon, mc.seed_base + static_cast<std::uint64_t>(i));
  }
  return aggregate(scenario.name, shrinking, mc, results);
}

MonteCarloReport run_montecarlo_serial(const Scenario& scenario, const ZoneConfig& zones,
                                       const IntegratorConfig& cfg, const MonteCarloConfig& mc) {
  const ZoneConfig shrinking = prepare(scenario, zones, cfg, mc);
  std::vector<TrialResult> results;
  results.reserve(static_cast<std::size_t>(mc.trials));
  for (int i = 0; i < mc.trials; ++i) {
    results.push_back(
        run_trial(scenario, shrinking, cfg, mc.horizon, mc.seed_base + static_cast<std::uint64_t>(i)));
  }
  return aggregate(scenario.name, shrinking, mc, results);
}

}  // namespace flowdecomp
