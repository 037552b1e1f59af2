#pragma once

// Monte Carlo estimate of P[mu(C) > a] for the frozen-driver construction
// with shrinking zones. Trials are independent; run_montecarlo spreads them
// over OpenMP threads, run_montecarlo_serial is the single-thread reference.

#include <cstdint>
#include <string>
#include <vector>

#include "flowdecomp/scenarios.hpp"
#include "flowdecomp/sde.hpp"
#include "flowdecomp/zones.hpp"

namespace flowdecomp {

struct MonteCarloConfig {
  int trials = 500;
  double horizon = 6.283185307179586;
  std::uint64_t seed_base = 1;
};

struct TrialResult {
  std::uint64_t seed = 0;
  bool excluded = false;
  double mu_c = 0.0;
  int freeze_count = 0;
  bool budget_violation = false;
  bool marcus_decomposable = true;
};

struct MonteCarloReport {
  std::string scenario;
  int trials = 0;
  double horizon = 0.0;
  double a = 0.0;
  double epsilon = 0.0;
  std::vector<double> mu_c;          // included trials, in seed order
  std::vector<int> freeze_counts;    // included trials, in seed order
  double exceedance = 0.0;
  double ci_halfwidth = 0.0;
  double mean_mu_c = 0.0;
  double max_mu_c = 0.0;
  int budget_violations = 0;
  int excluded_trials = 0;
  int marcus_decomposable_trials = 0;

  bool operator==(const MonteCarloReport&) const = default;
};

/// #{mu > a} / size.
double exceedance_fraction(const std::vector<double>& mu, double a);
/// 3 * sqrt(f (1 - f) / n).
double binomial_halfwidth(double fraction, std::size_t n);

TrialResult run_trial(const Scenario& scenario, const ZoneConfig& zones,
                      const IntegratorConfig& cfg, double horizon, std::uint64_t seed);

MonteCarloReport aggregate(const std::string& scenario, const ZoneConfig& zones,
                           const MonteCarloConfig& mc, const std::vector<TrialResult>& trials);

MonteCarloReport run_montecarlo(const Scenario& scenario, const ZoneConfig& zones,
                                const IntegratorConfig& cfg, const MonteCarloConfig& mc);
MonteCarloReport run_montecarlo_serial(const Scenario& scenario, const ZoneConfig& zones,
                                       const IntegratorConfig& cfg, const MonteCarloConfig& mc);

}  // namespace flowdecomp
