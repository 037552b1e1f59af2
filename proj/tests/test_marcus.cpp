#include <doctest.h>

#include <cmath>
#include <random>

#include "flowdecomp/decomp.hpp"
#include "flowdecomp/marcus.hpp"
#include "flowdecomp/scenarios.hpp"

using namespace flowdecomp;

namespace {

const double kPi = std::acos(-1.0);

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v1(double a) { return Vec::Constant(1, a); }

VectorFieldSet diagonal_pair() {
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  return VectorFieldSet::linear({a, b});
}

FreezeInterval interval(int index, double start, std::optional<double> end) {
  FreezeInterval iv;
  iv.index = index;
  iv.start = start;
  iv.end = end;
  return iv;
}

}  // namespace

TEST_CASE("jumps along the field flow") {
  const Scenario rot = make_scenario("rotation");
  const IntegratorConfig cfg;
  const double p0 = kPi / 2 - 0.01;
  const Vec y = marcus_jump(rot.system, v2(1, 0), v1(kPi - 2 * p0), cfg);
  CHECK((y - v2(std::cos(0.02), std::sin(0.02))).norm() <= 1e-10);
  CHECK(y(0) == doctest::Approx(0.99980).epsilon(1e-5));
  CHECK(marcus_jump(rot.system, v2(0.3, 0.1), v1(0.0), cfg) == v2(0.3, 0.1));

  const Vec d = marcus_jump(diagonal_pair(), v2(1, 1), v2(std::log(2.0), std::log(3.0)), cfg);
  CHECK((d - v2(2, 3)).norm() <= 1e-10);

  const Mat j = marcus_jump_jacobian(rot.system, v2(0.7, -0.2), v1(0.4), cfg);
  Mat r(2, 2);
  r << std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4);
  CHECK((j - r).norm() <= 1e-8);
}

TEST_CASE("without freezes the Marcus trajectory is the plain one") {
  for (const char* name : {"rotation-noise", "foliation3d-noisy", "diagonal"}) {
    CAPTURE(name);
    const Scenario sc = make_scenario(name);
    const IntegratorConfig cfg;
    const DriverPath u = sample_driver(sc.system.noise_count(), 2.0, cfg.step, 4);
    const Trajectory plain = integrate_flow(sc.system, u, cfg, sc.x0);
    const Trajectory marcus = integrate_marcus(sc.system, freeze_driver(u, {}), cfg, sc.x0);
    REQUIRE(plain.size() == marcus.size());
    bool same = true;
    for (std::size_t j = 0; j < plain.size(); ++j) {
      same = same && plain[j].point == marcus[j].point && plain[j].jacobian == marcus[j].jacobian &&
             plain[j].time == marcus[j].time;
    }
    CHECK(same);
  }
}

TEST_CASE("frozen rotation follows the frozen angle") {
  const Scenario sc = make_scenario("frozen-rotation");
  const IntegratorConfig cfg;
  const DriverPath u = sample_driver(0, 4 * kPi, cfg.step, 1);
  const double eps = 0.1;
  StoppingTimes st;
  for (int n = 0; n < 4; ++n) {
    const double p = kPi / 2 + n * kPi - eps / std::pow(2.0, n + 1);
    st.intervals.push_back(interval(n + 1, p, (2 * n + 1) * kPi - p));
  }
  const FrozenDriver z = freeze_driver(u, st);
  const Trajectory tr = integrate_marcus(sc.system, z, cfg, sc.x0);
  double worst = 0.0, min_det = INFINITY;
  for (std::size_t j = 0; j < tr.size(); ++j) {
    const double t = u.grid[j];
    double angle = t;
    for (const auto& iv : st.intervals) {
      if (t >= iv.start && t < *iv.end) angle = iv.start;
    }
    worst = std::max(worst, (tr[j].point - v2(std::cos(angle), std::sin(angle))).norm());
    min_det = std::min(min_det, std::abs(vertical_block_det(tr[j].jacobian, sc.split)));
  }
  CHECK(worst <= 1e-6);
  // cos p_n = sin(eps / 2^(n+1)) is the smallest value reached
  CHECK(min_det >= std::sin(eps / 16) - 1e-6);
}

TEST_CASE("Marcus det stays out of the red band for rotation") {
  const Scenario sc = make_scenario("frozen-rotation");
  const IntegratorConfig cfg;
  const ZoneConfig zones;
  const DriverPath u = sample_driver(0, 4 * kPi, cfg.step, 1);
  const Trajectory base = integrate_flow(sc.system, u, cfg, sc.x0);
  const StoppingTimes st = detect_stopping_times(u.grid, det_series(base, sc.split), zones, u.horizon());
  const FrozenDriver z = freeze_driver(u, st);
  const Trajectory tr = integrate_marcus(sc.system, z, cfg, sc.x0);
  const auto dets = det_series(tr, sc.split);
  for (double d : dets) CHECK(std::abs(d) >= zones.delta_red - 1e-6);

  // bit equality up to the first freeze, closed-form agreement afterwards
  const double first = st.intervals.front().start;
  for (std::size_t j = 0; j < tr.size(); ++j) {
    if (u.grid[j] < first) {
      CHECK(tr[j].point == base[j].point);
    } else if (!st.frozen_at(u.grid[j])) {
      CHECK((tr[j].point - base[j].point).norm() <= 1e-6);
    }
  }
}

TEST_CASE("commuting composition") {
  const Scenario rot = make_scenario("rotation");
  const IntegratorConfig cfg;
  const Vec y = compose_commuting_flow(rot.system, v1(kPi / 3), v2(1, 0), cfg);
  CHECK((y - v2(0.5, std::sqrt(3.0) / 2)).norm() <= 1e-8);
  CHECK(y(1) == doctest::Approx(0.86603).epsilon(1e-5));
  CHECK(compose_commuting_flow(rot.system, v1(0), v2(2, 3), cfg) == v2(2, 3));

  const Vec d = compose_commuting_flow(diagonal_pair(), v2(1, 1), v2(1, 1), cfg);
  CHECK((d - v2(std::exp(1.0), std::exp(1.0))).norm() <= 1e-8);
  CHECK((d - flow_of_combination(diagonal_pair(), v2(1, 1), v2(1, 1), cfg)).norm() <= 1e-8);
}

TEST_CASE("jump equals composition for commuting fields") {
  const IntegratorConfig cfg;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(-1.5, 1.5);
  for (const char* name : {"rotation-noise", "diagonal", "foliation3d"}) {
    CAPTURE(name);
    const Scenario sc = make_scenario(name);
    for (int rep = 0; rep < 5; ++rep) {
      Vec u(sc.system.field_count());
      for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = w(rng);
      CHECK((marcus_jump(sc.system, sc.x0, u, cfg) - compose_commuting_flow(sc.system, u, sc.x0, cfg))
                .norm() <= 1e-8);
    }
  }
}

TEST_CASE("Marcus solution is the composition at the frozen driver") {
  const IntegratorConfig cfg{.substeps = 16};
  for (const char* name : {"rotation-noise", "diagonal"}) {
    CAPTURE(name);
    const Scenario sc = make_scenario(name);
    const DriverPath u = sample_driver(sc.system.noise_count(), 3.0, cfg.step, 6);
    const Trajectory base = integrate_flow(sc.system, u, cfg, sc.x0);
    const StoppingTimes st =
        detect_stopping_times(u.grid, det_series(base, sc.split), ZoneConfig{}, u.horizon());
    const FrozenDriver z = freeze_driver(u, st);
    const Trajectory tr = integrate_marcus(sc.system, z, cfg, sc.x0);
    for (std::size_t j = 0; j < tr.size(); j += 97) {
      CHECK((tr[j].point - compose_commuting_flow(sc.system, z.value_at_grid(j), sc.x0, cfg)).norm() <=
            1e-5);
    }
  }
}
