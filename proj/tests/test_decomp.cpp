#include <doctest.h>

#include <cmath>

#include "flowdecomp/decomp.hpp"
#include "flowdecomp/errors.hpp"
#include "flowdecomp/scenarios.hpp"

using namespace flowdecomp;

namespace {

const double kPi = std::acos(-1.0);
const SplitSpec k11{1, 2};

Mat rot(double t) {
  Mat r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

FlowMap rotation_flow(double t) {
  const Scenario sc = make_scenario("rotation");
  const IntegratorConfig cfg;
  return FlowMap::from_driver(sc.system, sample_driver(0, 3.0, cfg.step, 1), cfg, t);
}

Mat fd_map_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x) {
  const double h = 1e-6;
  Mat out(x.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Vec xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    out.col(c) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return out;
}

}  // namespace

TEST_CASE("split validation") {
  CHECK_THROWS_AS((SplitSpec{0, 2}).validate(), InvalidArgument);
  CHECK_THROWS_AS((SplitSpec{2, 2}).validate(), InvalidArgument);
  CHECK_NOTHROW((SplitSpec{1, 3}).validate());
  CHECK((SplitSpec{1, 3}).vertical_dim() == 2);
  CHECK_THROWS_AS(vertical_block_det(Mat::Identity(3, 3), k11), InvalidArgument);
}

TEST_CASE("vertical block determinant") {
  CHECK(vertical_block_det(rot(kPi / 3), k11) == doctest::Approx(0.5).epsilon(1e-14));
  for (int p = 1; p < 4; ++p) CHECK(vertical_block_det(Mat::Identity(4, 4), {p, 4}) == 1.0);

  Mat a(3, 3);
  a << 9, 9, 9, 9, 1, 2, 9, 3, 5;
  CHECK(vertical_block_det(a, {1, 3}) == doctest::Approx(1.0 * 5 - 2.0 * 3));
  CHECK(vertical_block_det(a, {2, 3}) == 5.0);
}

TEST_CASE("foliation determinant at t = 2") {
  const Scenario sc = make_scenario("foliation3d");
  const IntegratorConfig cfg;
  const auto tr = integrate_flow(sc.system, sample_driver(0, 2.0, cfg.step, 1), cfg, vec({1, 0, 0}));
  // f(2) = pi/2 for the built-in f, so cos f(2) = 0
  CHECK(std::abs(vertical_block_det(tr.back().jacobian, sc.split)) <= 1e-6);
}

TEST_CASE("decomposability predicate") {
  CHECK_FALSE(is_p_decomposable(rot(kPi / 2), k11, 1e-8));
  CHECK(is_p_decomposable(Mat::Identity(2, 2), k11, 1e-8));
  CHECK(is_p_decomposable(rot(3 * kPi / 4), k11, 1e-8));
  CHECK(vertical_block_det(rot(3 * kPi / 4), k11) == doctest::Approx(-std::sqrt(0.5)));
  CHECK_THROWS_AS(is_p_decomposable(Mat::Identity(2, 2), k11, 0.0), InvalidArgument);
}

TEST_CASE("psi") {
  const Vec psi = evaluate_psi(rotation_flow(kPi / 4), k11, vec({1, 0}));
  CHECK(psi(0) == 1.0);
  CHECK(psi(1) == doctest::Approx(std::sin(kPi / 4)).epsilon(1e-6));

  const FlowMap id = FlowMap::linear(Mat::Identity(3, 3));
  CHECK(evaluate_psi(id, {1, 3}, vec({0.2, -1, 4})) == vec({0.2, -1, 4}));

  const Scenario sc = make_scenario("foliation3d");
  const IntegratorConfig cfg;
  const FlowMap fol = FlowMap::from_driver(sc.system, sample_driver(0, 1.0, cfg.step, 1), cfg, 1.0);
  const Vec p3 = evaluate_psi(fol, sc.split, vec({1, 0, 0}));
  // f(1) = 1 lies in the identity part of the ramp
  CHECK(p3(0) == 1.0);
  CHECK(p3(1) == doctest::Approx(std::sin(1.0)).epsilon(1e-6));
  CHECK(p3(2) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("xi by Newton inversion") {
  const IntegratorConfig cfg;
  const Vec xi = evaluate_xi(rotation_flow(kPi / 4), k11, vec({1, 0}), vec({0}), cfg);
  CHECK(xi(0) == doctest::Approx(1.0 / std::cos(kPi / 4)).epsilon(1e-6));
  CHECK(xi(1) == 0.0);

  const FlowMap id = FlowMap::linear(Mat::Identity(2, 2));
  CHECK((evaluate_xi(id, k11, vec({3, -2}), vec({7}), cfg) - vec({3, -2})).norm() <= 1e-12);
}

TEST_CASE("xi for [[1,1],[0,2]] against brute-force inversion") {
  Mat a(2, 2);
  a << 1, 1, 0, 2;
  const IntegratorConfig cfg;
  const Vec xi = evaluate_xi(FlowMap::linear(a), k11, vec({3, 4}), vec({0}), cfg);

  // scan w over [-10, 10] at resolution 1e-6 for 2 w = 4
  double best_w = -10.0, best_r = INFINITY;
  const long steps = 20'000'000;
  for (long k = 0; k <= steps; ++k) {
    const double w = -10.0 + 1e-6 * static_cast<double>(k);
    const double r = std::abs(2.0 * w - 4.0);
    if (r < best_r) {
      best_r = r;
      best_w = w;
    }
  }
  const double oracle = 3.0 + best_w;
  CHECK(std::abs(xi(0) - oracle) <= 1e-6);
  CHECK(xi(0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(xi(1) == 4.0);
}

TEST_CASE("Newton failures") {
  const IntegratorConfig cfg;
  CHECK_THROWS_AS(evaluate_xi(FlowMap::linear(rot(kPi / 2)), k11, vec({1, 0}), vec({0}), cfg),
                  NotDecomposableError);

  // w^3 - 2w + 2 = 0 from w = 0: Newton cycles 0 -> 1 -> 0
  const FlowMap cyc(2, [](const Vec& x) {
    const double w = x(1);
    Vec p(2);
    p << x(0), w * w * w - 2.0 * w + 2.0;
    Mat j(2, 2);
    j << 1, 0, 0, 3.0 * w * w - 2.0;
    return FlowState{0.0, p, j};
  });
  CHECK_THROWS_AS(evaluate_xi(cyc, k11, vec({0, 0}), vec({0}), cfg), NoConvergenceError);
  CHECK_THROWS_AS(evaluate_xi(cyc, k11, vec({0, 0}), vec({0, 1}), cfg), InvalidArgument);
  CHECK_THROWS_AS(cyc.evaluate(vec({1})), InvalidArgument);
}

TEST_CASE("decomposition records") {
  const IntegratorConfig cfg;
  const Decomposition d = decomposition_residual(rotation_flow(kPi / 4), k11, vec({1, 0}), cfg);
  CHECK(d.residual <= 1e-8);
  CHECK(d.orientation == 1);

  const Decomposition id = decomposition_residual(FlowMap::linear(Mat::Identity(2, 2)), k11,
                                                  vec({0.3, 0.4}), cfg);
  CHECK(id.residual == 0.0);
  CHECK(id.orientation == 1);

  const Decomposition back = decomposition_residual(rotation_flow(3 * kPi / 4), k11, vec({1, 0}), cfg);
  CHECK(back.residual <= 1e-8);
  CHECK(back.orientation == -1);
  CHECK(back.vertical_det == doctest::Approx(std::cos(3 * kPi / 4)).epsilon(1e-6));
}

TEST_CASE("reconstruction, block structure and det factorization along a trajectory") {
  const Scenario sc = make_scenario("foliation3d");
  const IntegratorConfig cfg;
  const DriverPath driver = sample_driver(0, 1.4, cfg.step, 1);
  const std::vector<Vec> points{vec({1, 0, 0}), vec({0.5, -0.3, 0.2}), vec({-1, 2, -0.1})};
  for (double t : {0.3, 0.9, 1.4}) {
    const FlowMap map = FlowMap::from_driver(sc.system, driver, cfg, t);
    for (const Vec& xy : points) {
      CAPTURE(t);
      const Decomposition d = decomposition_residual(map, sc.split, xy, cfg);
      CHECK(d.residual <= 10.0 * cfg.newton_tolerance);
      CHECK(d.orientation == (d.vertical_det < 0.0 ? -1 : 1));

      const Mat dpsi = fd_map_jacobian([&](const Vec& z) { return evaluate_psi(map, sc.split, z); }, xy);
      CHECK(std::abs(dpsi(0, 0) - 1.0) <= 1e-8);
      CHECK(dpsi.topRightCorner(1, 2).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK(std::abs(vertical_block_det(dpsi, sc.split) - d.vertical_det) <= 1e-6);

      const Mat dxi = fd_map_jacobian(
          [&](const Vec& z) { return evaluate_xi(map, sc.split, z, xy.tail(2), cfg); }, d.psi);
      CHECK((dxi.bottomRightCorner(2, 2) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK(dxi.bottomLeftCorner(2, 1).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}
