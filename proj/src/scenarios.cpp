#include "flowdecomp/scenarios.hpp"

#include <cmath>
#include <numbers>

#include "flowdecomp/errors.hpp"

namespace flowdecomp {

namespace {

constexpr double kCorner = std::numbers::pi / 2.0;
constexpr double kBlendStart = kCorner - kRampWidth / 2.0;
constexpr double kBlendEnd = kCorner + kRampWidth / 2.0;

double param(const ScenarioParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Mat rotation_generator() {
  Mat j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

Mat rotation(double angle) {
  Mat r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

VectorField constant_field(Vec c) {
  VectorField f;
  f.value = [c](const Vec&, Vec& out) { out = c; };
  f.jacobian = [n = c.size()](const Vec&, Mat& out) { out.setZero(n, n); };
  return f;
}

// (-f'(z) y, f'(z) x, 1)
VectorField foliation_field() {
  VectorField f;
  f.value = [](const Vec& p, Vec& out) {
    const double d = ramp_derivative(p(2));
    out(0) = -d * p(1);
    out(1) = d * p(0);
    out(2) = 1.0;
  };
  f.jacobian = [](const Vec& p, Mat& out) {
    const double d = ramp_derivative(p(2));
    const double dd = ramp_second_derivative(p(2));
    out << 0.0, -d, -dd * p(1),
           d, 0.0, dd * p(0),
           0.0, 0.0, 0.0;
  };
  return f;
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::function<FlowState(const Vec&, const Vec&)> rotation_oracle(double sigma) {
  return [sigma](const Vec& u, const Vec& x0) {
    const double angle = u(0) + (u.size() > 1 ? sigma * u(1) : 0.0);
    const Mat r = rotation(angle);
    return FlowState{u(0), r * x0, r};
  };
}

}  // namespace

double ramp(double z) {
  const double a = std::abs(z);
  double v;
  if (a <= kBlendStart) {
    v = a;
  } else if (a < kBlendEnd) {
    const double s = a - kBlendStart;
    v = kBlendStart + s - s * s / (2.0 * kRampWidth);
  } else {
    v = kCorner;
  }
  return std::copysign(v, z);
}

double ramp_derivative(double z) {
  const double a = std::abs(z);
  if (a <= kBlendStart) return 1.0;
  if (a < kBlendEnd) return (kBlendEnd - a) / kRampWidth;
  return 0.0;
}

double ramp_second_derivative(double z) {
  const double a = std::abs(z);
  if (a > kBlendStart && a < kBlendEnd) return -std::copysign(1.0, z) / kRampWidth;
  return 0.0;
}

double ramp_inverse(double value) {
  if (value < 0.0 || value > kCorner) throw InvalidArgument("ramp value outside [0, pi/2]");
  if (value <= kBlendStart) return value;
  const double rise = value - kBlendStart;
  const double disc = std::max(0.0, kRampWidth * kRampWidth - 2.0 * kRampWidth * rise);
  return kBlendStart + kRampWidth - std::sqrt(disc);
}

std::vector<std::string> scenario_names() {
  return {"rotation",  "frozen-rotation", "rotation-noise", "rotation-translation",
          "diagonal",  "foliation3d",     "foliation3d-noisy", "zero"};
}

Scenario make_scenario(const std::string& name, const ScenarioParams& params) {
  const Mat j = rotation_generator();
  if (name == "rotation" || name == "frozen-rotation") {
    Vec x0 = vec({1.0, 0.0});
    return {name,
            name == "rotation" ? "planar rotation dx = Jx dt"
                               : "planar rotation with the driver frozen near the singular angles",
            VectorFieldSet::linear({j}),
            {1, 2},
            x0,
            {x0, vec({0.3, -0.7})},
            true,
            rotation_oracle(0.0)};
  }
  if (name == "rotation-noise") {
    const double sigma = param(params, "sigma", 0.5);
    Vec x0 = vec({1.0, 0.0});
    return {name,
            "rotation driven by dt and sigma dB",
            VectorFieldSet::linear({j, sigma * j}),
            {1, 2},
            x0,
            {x0, vec({0.3, -0.7})},
            true,
            rotation_oracle(sigma)};
  }
  if (name == "rotation-translation") {
    const double sigma = param(params, "sigma", 1.0);
    std::vector<VectorField> fields{linear_field(j), constant_field(vec({sigma, 0.0}))};
    Vec x0 = vec({1.0, 0.0});
    return {name,
            "rotation drift with a translation noise field (non-commuting)",
            VectorFieldSet(2, std::move(fields)),
            {1, 2},
            x0,
            {x0, vec({0.3, -0.7})},
            false,
            nullptr};
  }
  if (name == "diagonal") {
    const double sigma = param(params, "sigma", 0.5);
    Vec a = vec({0.1, -0.2});
    Vec b = vec({0.5, 0.3});
    Vec x0 = vec({1.0, 1.0});
    auto oracle = [a, b, sigma](const Vec& u, const Vec& x0) {
      const Vec rate = u(0) * a + (u.size() > 1 ? sigma * u(1) : 0.0) * b;
      const Mat e = rate.array().exp().matrix().asDiagonal();
      return FlowState{u(0), e * x0, e};
    };
    return {name,
            "commuting diagonal linear fields",
            VectorFieldSet::linear({Mat(a.asDiagonal()), Mat((sigma * b).asDiagonal())}),
            {1, 2},
            x0,
            {x0, vec({-0.5, 2.0})},
            true,
            oracle};
  }
  if (name == "foliation3d" || name == "foliation3d-noisy") {
    Vec x0 = vec({1.0, 0.0, 0.0});
    std::vector<VectorField> fields{foliation_field()};
    const bool noisy = name == "foliation3d-noisy";
    if (noisy) fields.push_back(constant_field(vec({0.0, 0.0, param(params, "sigma", 1.0)})));
    std::function<FlowState(const Vec&, const Vec&)> oracle;
    if (!noisy) {
      oracle = [](const Vec& u, const Vec& x0) {
        const double t = u(0);
        const double angle = ramp(x0(2) + t) - ramp(x0(2));
        const Mat r = rotation(angle);
        FlowState s{t, Vec(3), Mat::Identity(3, 3)};
        s.point.head(2) = r * x0.head(2);
        s.point(2) = x0(2) + t;
        s.jacobian.topLeftCorner(2, 2) = r;
        const double rate = ramp_derivative(x0(2) + t) - ramp_derivative(x0(2));
        s.jacobian.block(0, 2, 2, 1) = rotation(angle + std::numbers::pi / 2.0) * x0.head(2) * rate;
        return s;
      };
    }
    return {name,
            noisy ? "rotation by f(z) about the z-axis with Brownian motion along z (non-commuting)"
                  : "rotation by f(z) about the z-axis, z moving at unit speed",
            VectorFieldSet(3, std::move(fields)),
            {1, 3},
            x0,
            {x0, vec({0.5, 0.5, 1.45}), vec({-0.2, 1.0, -1.5})},
            !noisy,
            oracle};
  }
  if (name == "zero") {
    Vec x0 = vec({1.0, 0.5});
    auto oracle = [](const Vec& u, const Vec& x) { return FlowState{u(0), x, Mat::Identity(2, 2)}; };
    return {name, "identically zero field", VectorFieldSet::zero(2), {1, 2}, x0, {x0}, true,
            oracle};
  }
  throw InvalidArgument("unknown scenario '" + name + "'");
}

}  // namespace flowdecomp
