#include "flowdecomp/sde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "flowdecomp/errors.hpp"

namespace flowdecomp {

VectorField linear_field(Mat a) {
  VectorField f;
  f.value = [a](const Vec& x, Vec& out) { out.noalias() = a * x; };
  f.jacobian = [a](const Vec&, Mat& out) { out = a; };
  return f;
}

VectorFieldSet::VectorFieldSet(int dimension, std::vector<VectorField> fields)
    : dimension_(dimension), fields_(std::move(fields)) {
  if (dimension_ <= 0) throw InvalidArgument("vector field dimension must be positive");
  if (fields_.empty()) throw InvalidArgument("a system needs at least the drift field");
  for (const auto& f : fields_) {
    if (!f.value) throw InvalidArgument("vector field without a value evaluator");
  }
}

bool VectorFieldSet::has_analytic_jacobian(int i) const {
  return static_cast<bool>(fields_.at(static_cast<std::size_t>(i)).jacobian);
}

void VectorFieldSet::value(int i, const Vec& x, Vec& out) const {
  out.resize(dimension_);
  fields_.at(static_cast<std::size_t>(i)).value(x, out);
}

Vec VectorFieldSet::value(int i, const Vec& x) const {
  Vec out(dimension_);
  value(i, x, out);
  return out;
}

double fd_step(const Vec& x) { return 1e-5 * (1.0 + x.norm()); }

Mat VectorFieldSet::fd_jacobian(int i, const Vec& x) const {
  const double h = fd_step(x);
  Mat out(dimension_, dimension_);
  Vec xp = x, xm = x, fp(dimension_), fm(dimension_);
  for (int c = 0; c < dimension_; ++c) {
    xp(c) = x(c) + h;
    xm(c) = x(c) - h;
    value(i, xp, fp);
    value(i, xm, fm);
    out.col(c) = (fp - fm) / (2.0 * h);
    xp(c) = x(c);
    xm(c) = x(c);
  }
  return out;
}

void VectorFieldSet::jacobian(int i, const Vec& x, Mat& out) const {
  const auto& f = fields_.at(static_cast<std::size_t>(i));
  if (f.jacobian) {
    out.resize(dimension_, dimension_);
    f.jacobian(x, out);
  } else {
    out = fd_jacobian(i, x);
  }
}

Mat VectorFieldSet::jacobian(int i, const Vec& x) const {
  Mat out(dimension_, dimension_);
  jacobian(i, x, out);
  return out;
}

VectorFieldSet VectorFieldSet::linear(std::vector<Mat> matrices) {
  if (matrices.empty()) throw InvalidArgument("linear system needs at least one matrix");
  const auto n = matrices.front().rows();
  std::vector<VectorField> fields;
  for (auto& a : matrices) {
    if (a.rows() != n || a.cols() != n) throw InvalidArgument("linear field must be n x n");
    fields.push_back(linear_field(std::move(a)));
  }
  return VectorFieldSet(static_cast<int>(n), std::move(fields));
}

VectorFieldSet VectorFieldSet::zero(int dimension) {
  return linear({Mat::Zero(dimension, dimension)});
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0)) throw InvalidArgument("integrator step must be positive");
  if (substeps < 1) throw InvalidArgument("substeps must be at least 1");
  if (!(det_floor > 0.0)) throw InvalidArgument("det_floor must be positive");
  if (!(newton_tolerance > 0.0)) throw InvalidArgument("newton tolerance must be positive");
  if (newton_max_iterations < 1) throw InvalidArgument("newton max iterations must be >= 1");
}

// ---------------------------------------------------------------------------
// Driver

std::size_t DriverPath::segment_of(double t) const {
  if (grid.size() < 2) return 0;
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  if (it == grid.begin()) return 0;
  auto j = static_cast<std::size_t>(std::distance(grid.begin(), it)) - 1;
  return std::min(j, grid.size() - 2);
}

Vec DriverPath::value_at(double t) const {
  if (grid.size() == 1) return values.front();
  const std::size_t j = segment_of(t);
  if (t == grid[j]) return values[j];
  if (t == grid[j + 1]) return values[j + 1];
  const double frac = (t - grid[j]) / (grid[j + 1] - grid[j]);
  return values[j] + frac * (values[j + 1] - values[j]);
}

DriverPath DriverPath::shifted(std::size_t from) const {
  if (from >= grid.size()) throw InvalidArgument("shift index beyond the driver grid");
  DriverPath out;
  out.seed = seed;
  for (std::size_t j = from; j < grid.size(); ++j) {
    out.grid.push_back(grid[j] - grid[from]);
    Vec v = values[j] - values[from];
    v(0) = out.grid.back();
    out.values.push_back(std::move(v));
  }
  return out;
}

DriverPath sample_driver(int m, double horizon, double h, std::uint64_t seed) {
  if (m < 0) throw InvalidArgument("noise count must be non-negative");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (!(h > 0.0)) throw InvalidArgument("step must be positive");

  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(horizon / h - 1e-9)));
  const double dt = horizon / static_cast<double>(steps);
  const double scale = std::sqrt(dt);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  DriverPath path;
  path.seed = seed;
  path.grid.reserve(steps + 1);
  path.values.reserve(steps + 1);
  Vec current = Vec::Zero(m + 1);
  path.grid.push_back(0.0);
  path.values.push_back(current);
  for (std::size_t j = 1; j <= steps; ++j) {
    const double t = j == steps ? horizon : static_cast<double>(j) * dt;
    current(0) = t;
    for (int i = 1; i <= m; ++i) current(i) += scale * normal(rng);
    path.grid.push_back(t);
    path.values.push_back(current);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Heun / Wong-Zakai stepping

HeunStepper::HeunStepper(const VectorFieldSet& system) : system_(system) {
  const int n = system.dimension();
  k1_.resize(n);
  k2_.resize(n);
  trial_.resize(n);
  scratch_.resize(n);
  dg1_.resize(n, n);
  dg2_.resize(n, n);
  big_k1_.resize(n, n);
  big_k2_.resize(n, n);
  trial_jac_.resize(n, n);
  scratch_jac_.resize(n, n);
}

void HeunStepper::combine(const Vec& weights, const Vec& x, Vec& g, Mat& dg) {
  g.setZero();
  dg.setZero();
  for (int i = 0; i < system_.field_count(); ++i) {
    const double w = weights(i);
    if (w == 0.0) continue;
    system_.value(i, x, scratch_);
    g += w * scratch_;
    system_.jacobian(i, x, scratch_jac_);
    dg += w * scratch_jac_;
  }
}

void HeunStepper::step(const Vec& increment, int substeps, Vec& x, Mat& jacobian) {
  weights_ = increment / static_cast<double>(substeps);
  for (int s = 0; s < substeps; ++s) {
    combine(weights_, x, k1_, dg1_);
    big_k1_.noalias() = dg1_ * jacobian;
    trial_ = x + k1_;
    trial_jac_ = jacobian + big_k1_;
    combine(weights_, trial_, k2_, dg2_);
    big_k2_.noalias() = dg2_ * trial_jac_;
    x += 0.5 * (k1_ + k2_);
    jacobian += 0.5 * (big_k1_ + big_k2_);
  }
}

void check_finite(const Vec& x, const Mat& jacobian, const IntegratorConfig& cfg,
                  double last_finite_time) {
  if (!x.allFinite() || !jacobian.allFinite() || x.norm() > cfg.explosion_threshold) {
    throw ExplosionError("flow exploded after t = " + std::to_string(last_finite_time),
                         last_finite_time);
  }
}

namespace {

void check_compatible(const VectorFieldSet& system, const DriverPath& driver, const Vec& x0) {
  if (x0.size() != system.dimension()) {
    throw InvalidArgument("initial condition length does not match the system dimension");
  }
  if (driver.values.empty() || driver.noise_count() != system.noise_count()) {
    throw InvalidArgument("driver noise components do not match the system's diffusion fields");
  }
}

}  // namespace

Trajectory integrate_flow(const VectorFieldSet& system, const DriverPath& driver,
                          const IntegratorConfig& cfg, const Vec& x0) {
  cfg.validate();
  check_compatible(system, driver, x0);
  const int n = system.dimension();

  Trajectory out;
  out.reserve(driver.size());
  Vec x = x0;
  Mat jac = Mat::Identity(n, n);
  out.push_back({driver.grid[0], x, jac});

  HeunStepper stepper(system);
  Vec increment(system.field_count());
  for (std::size_t j = 0; j + 1 < driver.size(); ++j) {
    increment = driver.values[j + 1] - driver.values[j];
    stepper.step(increment, cfg.substeps, x, jac);
    check_finite(x, jac, cfg, driver.grid[j]);
    out.push_back({driver.grid[j + 1], x, jac});
  }
  return out;
}

FlowState integrate_flow_until(const VectorFieldSet& system, const DriverPath& driver,
                               const IntegratorConfig& cfg, const Vec& x0, double t) {
  cfg.validate();
  check_compatible(system, driver, x0);
  if (t < 0.0 || t > driver.horizon()) throw InvalidArgument("time outside the driver horizon");
  const int n = system.dimension();

  Vec x = x0;
  Mat jac = Mat::Identity(n, n);
  HeunStepper stepper(system);
  Vec increment(system.field_count());
  std::size_t j = 0;
  for (; j + 1 < driver.size() && driver.grid[j + 1] <= t; ++j) {
    increment = driver.values[j + 1] - driver.values[j];
    stepper.step(increment, cfg.substeps, x, jac);
    check_finite(x, jac, cfg, driver.grid[j]);
  }
  if (t > driver.grid[j]) {
    increment = driver.value_at(t) - driver.values[j];
    stepper.step(increment, cfg.substeps, x, jac);
    check_finite(x, jac, cfg, driver.grid[j]);
  }
  return {t, x, jac};
}

FlowState advance(const VectorFieldSet& system, const IntegratorConfig& cfg,
                  const FlowState& from, const Vec& increment, double t_end) {
  FlowState out = from;
  out.time = t_end;
  HeunStepper stepper(system);
  stepper.step(increment, cfg.substeps, out.point, out.jacobian);
  check_finite(out.point, out.jacobian, cfg, from.time);
  return out;
}

// ---------------------------------------------------------------------------
// Parameter-time flows

Vec flow_of_combination(const VectorFieldSet& system, const Vec& weights, const Vec& x0,
                        const IntegratorConfig& cfg) {
  cfg.validate();
  if (weights.size() != system.field_count()) {
    throw InvalidArgument("combination weights must have one entry per field");
  }
  if (x0.size() != system.dimension()) throw InvalidArgument("initial condition has wrong length");

  const int n = system.dimension();
  Vec y = x0;
  if (weights.isZero(0.0)) return y;

  const auto steps = static_cast<int>(std::max(1.0, std::ceil(1.0 / cfg.step - 1e-9)));
  const double ds = 1.0 / steps;
  Vec k1(n), k2(n), k3(n), k4(n), tmp(n), f(n);

  auto rhs = [&](const Vec& at, Vec& out) {
    out.setZero();
    for (int i = 0; i < system.field_count(); ++i) {
      if (weights(i) == 0.0) continue;
      system.value(i, at, f);
      out += weights(i) * f;
    }
  };

  for (int s = 0; s < steps; ++s) {
    rhs(y, k1);
    tmp = y + 0.5 * ds * k1;
    rhs(tmp, k2);
    tmp = y + 0.5 * ds * k2;
    rhs(tmp, k3);
    tmp = y + ds * k3;
    rhs(tmp, k4);
    y += (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite() || y.norm() > cfg.explosion_threshold) {
      throw ExplosionError("parameter-time flow exploded", s * ds);
    }
  }
  return y;
}

CommutativityReport verify_commutativity(const VectorFieldSet& system,
                                         std::span<const Vec> points, double s, double t,
                                         double tol, const IntegratorConfig& cfg) {
  if (points.empty()) throw InvalidArgument("commutativity check needs at least one point");
  CommutativityReport report;
  const int count = system.field_count();
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      Vec wi = Vec::Zero(count), wj = Vec::Zero(count);
      wi(i) = s;
      wj(j) = t;
      for (const Vec& x : points) {
        const Vec ij = flow_of_combination(system, wi, flow_of_combination(system, wj, x, cfg), cfg);
        const Vec ji = flow_of_combination(system, wj, flow_of_combination(system, wi, x, cfg), cfg);
        report.max_defect = std::max(report.max_defect, (ij - ji).norm());
      }
    }
  }
  report.commuting = report.max_defect <= tol;
  return report;
}

}  // namespace flowdecomp
