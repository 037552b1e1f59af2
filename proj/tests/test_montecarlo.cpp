#include <doctest.h>

#include <cmath>

#include "flowdecomp/errors.hpp"
#include "flowdecomp/montecarlo.hpp"

using namespace flowdecomp;

namespace {

const double kPi = std::acos(-1.0);

ZoneConfig shrinking() {
  ZoneConfig z;
  z.mode = ZoneMode::Shrinking;
  return z;
}

MonteCarloConfig trials(int n, double horizon) {
  MonteCarloConfig mc;
  mc.trials = n;
  mc.horizon = horizon;
  return mc;
}

}  // namespace

TEST_CASE("binomial summary helpers") {
  CHECK(binomial_halfwidth(0.1, 500) == doctest::Approx(3.0 * std::sqrt(0.09 / 500)));
  CHECK(binomial_halfwidth(0.0, 500) == 0.0);
  CHECK(exceedance_fraction({0.1, 0.6, 0.7, 0.2}, 0.5) == 0.5);
  CHECK(exceedance_fraction({0.5}, 0.5) == 0.0);
  CHECK(exceedance_fraction({}, 0.5) == 0.0);
}

TEST_CASE("deterministic rotation gives identical trials") {
  const Scenario sc = make_scenario("rotation");
  const ZoneConfig z = shrinking();
  const MonteCarloReport rep = run_montecarlo(sc, z, IntegratorConfig{}, trials(100, 2 * kPi));
  REQUIRE(rep.mu_c.size() == 100);
  // zeros of cos t at pi/2 and 3pi/2, thresholds delta * rho^(k-1)
  double mu = 0.0;
  for (int k = 0; k < 2; ++k) {
    mu += std::asin(z.delta_red * std::pow(z.rho, k)) + std::asin(z.delta_green * std::pow(z.rho, k));
  }
  for (double v : rep.mu_c) {
    CHECK(v == rep.mu_c.front());
    CHECK(v == doctest::Approx(mu).epsilon(1e-5));
  }
  for (int c : rep.freeze_counts) CHECK(c == 2);
  CHECK(rep.exceedance == 0.0);
  CHECK(rep.marcus_decomposable_trials == 100);

  ZoneConfig tight = z;
  tight.a = 0.5 * mu;
  CHECK(run_montecarlo(sc, tight, IntegratorConfig{}, trials(100, 2 * kPi)).exceedance == 1.0);
}

TEST_CASE("budget equal to the horizon is never exceeded") {
  const Scenario sc = make_scenario("rotation-noise");
  ZoneConfig z = shrinking();
  z.a = kPi;
  const MonteCarloReport rep = run_montecarlo(sc, z, IntegratorConfig{}, trials(100, kPi));
  CHECK(rep.exceedance == 0.0);
  CHECK(rep.ci_halfwidth == 0.0);
  CHECK(rep.max_mu_c <= kPi);
}

TEST_CASE("OpenMP and serial runs agree exactly") {
  const Scenario sc = make_scenario("rotation-noise");
  ZoneConfig z = shrinking();
  z.a = 0.05;
  const IntegratorConfig cfg;
  const MonteCarloReport par = run_montecarlo(sc, z, cfg, trials(100, kPi));
  const MonteCarloReport ser = run_montecarlo_serial(sc, z, cfg, trials(100, kPi));
  CHECK(par == ser);
  CHECK(par.exceedance >= 0.0);
  CHECK(par.exceedance <= 1.0);
  CHECK(par.ci_halfwidth == doctest::Approx(binomial_halfwidth(par.exceedance, 100)));
  CHECK(par.mean_mu_c <= par.max_mu_c);
}

TEST_CASE("trial seeds follow the trial index") {
  const Scenario sc = make_scenario("rotation-noise");
  const ZoneConfig z = shrinking();
  const IntegratorConfig cfg;
  MonteCarloConfig mc = trials(100, 2.0);
  mc.seed_base = 40;
  const MonteCarloReport rep = run_montecarlo(sc, z, cfg, mc);
  CHECK(rep.mu_c[3] == run_trial(sc, z, cfg, 2.0, 43).mu_c);
  CHECK(rep.freeze_counts[7] == run_trial(sc, z, cfg, 2.0, 47).freeze_count);
}

TEST_CASE("preconditions") {
  const IntegratorConfig cfg;
  CHECK_THROWS_AS(run_montecarlo(make_scenario("rotation-translation"), shrinking(), cfg,
                                 trials(100, 1.0)),
                  InvalidArgument);
  CHECK_THROWS_AS(run_montecarlo(make_scenario("rotation-noise"), shrinking(), cfg, trials(99, 1.0)),
                  InvalidArgument);
  CHECK_THROWS_AS(run_montecarlo_serial(make_scenario("rotation-noise"), shrinking(), cfg,
                                        trials(100, 0.0)),
                  InvalidArgument);
}

TEST_CASE("exploding trials are excluded and counted") {
  VectorField square{[](const Vec& x, Vec& out) { out = x.cwiseProduct(x); },
                     [](const Vec& x, Mat& out) { out = (2.0 * x).asDiagonal(); }};
  Scenario sc{"blowup", "x' = x^2",        VectorFieldSet(2, {square}), SplitSpec{1, 2},
              Vec::Ones(2), {Vec::Ones(2)}, true,                        {}};
  const MonteCarloReport rep = run_montecarlo(sc, shrinking(), IntegratorConfig{}, trials(100, 2.0));
  CHECK(rep.excluded_trials == 100);
  CHECK(rep.mu_c.empty());
  CHECK(rep.exceedance == 0.0);
}
