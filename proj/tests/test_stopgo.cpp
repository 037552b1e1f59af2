#include <doctest.h>

#include <cmath>

#include "flowdecomp/errors.hpp"
#include "flowdecomp/scenarios.hpp"
#include "flowdecomp/stopgo.hpp"

using namespace flowdecomp;

namespace {

const double kPi = std::acos(-1.0);

bool same_state(const FlowState& a, const FlowState& b) {
  return a.point == b.point && a.jacobian == b.jacobian;
}

}  // namespace

TEST_CASE("rotation stop-and-go") {
  const Scenario sc = make_scenario("rotation");
  const IntegratorConfig cfg;
  const ZoneConfig zones;
  const DriverPath u = sample_driver(0, 2 * kPi, cfg.step, 1);
  const StopGoTrajectory sg = stop_and_go(sc.system, u, sc.split, zones, cfg, sc.x0);
  REQUIRE(sg.stopping.intervals.size() == 2);
  CHECK(sg.stopping.intervals[0].start == doctest::Approx(std::acos(0.05)).epsilon(1e-6));
  CHECK(sg.stopping.intervals[0].start == doctest::Approx(1.5208).epsilon(1e-4));
  for (double d : sg.effective_det) CHECK(std::abs(d) >= zones.delta_red - zones.slack);
}

TEST_CASE("all-green contraction never stops") {
  const VectorFieldSet sys = VectorFieldSet::linear({-Mat::Identity(2, 2)});
  const IntegratorConfig cfg;
  // det = exp(-t) stays green while t <= ln(1 / delta_green)
  const DriverPath u = sample_driver(0, 1.5, cfg.step, 1);
  const StopGoTrajectory sg = stop_and_go(sys, u, {1, 2}, ZoneConfig{}, cfg, Vec::Ones(2));
  CHECK(sg.stopping.empty());
  for (std::size_t j = 0; j < u.size(); ++j) {
    CHECK(same_state(sg.effective[j], sg.base[j]));
    CHECK_FALSE(sg.frozen[j]);
  }
}

TEST_CASE("non-commuting 3D scenario") {
  const Scenario sc = make_scenario("foliation3d-noisy");
  const IntegratorConfig cfg;
  const ZoneConfig zones;
  int frozen_paths = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    CAPTURE(seed);
    const DriverPath u = sample_driver(1, 6.0, cfg.step, seed);
    const StopGoTrajectory sg = stop_and_go(sc.system, u, sc.split, zones, cfg, sc.x0);
    if (!sg.stopping.empty()) ++frozen_paths;
    REQUIRE(sg.effective.size() == u.size());

    bool outside_equal = true, inside_held = true, covered = true, decomposable = true;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double t = u.grid[j];
      const FreezeInterval* iv = sg.stopping.find(t);
      if (iv) {
        const FlowState at = integrate_flow_until(sc.system, u, cfg, sc.x0, iv->start);
        inside_held = inside_held && same_state(sg.effective[j], at);
      } else {
        outside_equal = outside_equal && same_state(sg.effective[j], sg.base[j]);
      }
      if (std::abs(sg.base_det[j]) <= zones.delta_red) covered = covered && sg.frozen[j];
      decomposable = decomposable && is_p_decomposable(sg.effective[j].jacobian, sc.split,
                                                       zones.delta_red - zones.slack);
    }
    CHECK(outside_equal);
    CHECK(inside_held);
    CHECK(covered);
    CHECK(decomposable);
  }
  CHECK(frozen_paths >= 2);
}

TEST_CASE("stop-and-go argument checks") {
  const Scenario sc = make_scenario("rotation");
  const IntegratorConfig cfg;
  const DriverPath u = sample_driver(0, 1.0, cfg.step, 1);
  CHECK_THROWS_AS(stop_and_go(sc.system, u, {1, 3}, ZoneConfig{}, cfg, sc.x0), InvalidArgument);
  CHECK_THROWS_AS(assemble_stop_and_go(sc.system, u, sc.split, ZoneConfig{}, cfg, Trajectory(3)),
                  InvalidArgument);
}
