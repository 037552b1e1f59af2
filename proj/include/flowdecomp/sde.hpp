#pragma once

// Stratonovich flows of smooth vector fields on R^n, integrated together with
// their Jacobian (variational equation) over a sampled Brownian driver.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "flowdecomp/linalg.hpp"

namespace flowdecomp {

/// A smooth vector field X: R^n -> R^n. `jacobian` may be left empty, in which
/// case central finite differences are used.
struct VectorField {
  std::function<void(const Vec& x, Vec& out)> value;
  std::function<void(const Vec& x, Mat& out)> jacobian;
};

VectorField linear_field(Mat a);

/// Drift X^0 followed by the diffusion fields X^1..X^m.
class VectorFieldSet {
 public:
  VectorFieldSet(int dimension, std::vector<VectorField> fields);

  int dimension() const noexcept { return dimension_; }
  int field_count() const noexcept { return static_cast<int>(fields_.size()); }
  int noise_count() const noexcept { return field_count() - 1; }
  bool has_analytic_jacobian(int i) const;

  void value(int i, const Vec& x, Vec& out) const;
  Vec value(int i, const Vec& x) const;
  void jacobian(int i, const Vec& x, Mat& out) const;
  Mat jacobian(int i, const Vec& x) const;
  /// Central differences with step 1e-5 * (1 + |x|), regardless of whether an
  /// analytic Jacobian exists.
  Mat fd_jacobian(int i, const Vec& x) const;

  static VectorFieldSet linear(std::vector<Mat> matrices);
  static VectorFieldSet zero(int dimension);

 private:
  int dimension_;
  std::vector<VectorField> fields_;
};

double fd_step(const Vec& x);

struct IntegratorConfig {
  double step = 1e-3;
  /// Uniform Heun substeps per grid step of the Wong-Zakai ODE.
  int substeps = 2;
  double newton_tolerance = 1e-11;
  int newton_max_iterations = 50;
  double det_floor = 1e-12;
  double explosion_threshold = 1e12;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Piecewise-linear sample of U_t = (t, B^1_t, ..., B^m_t) on a uniform grid.
struct DriverPath {
  std::vector<double> grid;
  std::vector<Vec> values;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return grid.size(); }
  double horizon() const { return grid.back(); }
  int noise_count() const { return static_cast<int>(values.front().size()) - 1; }
  double step() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }

  /// Index j of the grid segment [grid[j], grid[j+1]] holding t (clamped).
  std::size_t segment_of(double t) const;
  /// Linear interpolation; exact stored value at grid points.
  Vec value_at(double t) const;
  /// Driver restarted at grid index `from`: times and values re-based to 0.
  DriverPath shifted(std::size_t from) const;
};

/// The grid has N = ceil(horizon / h) equal steps of size horizon / N <= h.
DriverPath sample_driver(int m, double horizon, double h, std::uint64_t seed);

struct FlowState {
  double time = 0.0;
  Vec point;
  Mat jacobian;
};

using Trajectory = std::vector<FlowState>;

/// Reusable buffers for one Heun integration.
class HeunStepper {
 public:
  explicit HeunStepper(const VectorFieldSet& system);

  /// Advances (x, J) along the Wong-Zakai ODE dx = sum_i X^i(x) dU_i over
  /// one driver increment, split into `substeps` Heun steps.
  void step(const Vec& increment, int substeps, Vec& x, Mat& jacobian);

 private:
  void combine(const Vec& weights, const Vec& x, Vec& g, Mat& dg);

  const VectorFieldSet& system_;
  Vec weights_, k1_, k2_, trial_, scratch_;
  Mat dg1_, dg2_, big_k1_, big_k2_, trial_jac_, scratch_jac_;
};

/// Throws ExplosionError if the state is non-finite or above the threshold.
void check_finite(const Vec& x, const Mat& jacobian, const IntegratorConfig& cfg,
                  double last_finite_time);

Trajectory integrate_flow(const VectorFieldSet& system, const DriverPath& driver,
                          const IntegratorConfig& cfg, const Vec& x0);

/// Flow state at an arbitrary t in [0, horizon]; the last, partial step uses
/// the interpolated driver. Agrees bit-for-bit with integrate_flow at grid times.
FlowState integrate_flow_until(const VectorFieldSet& system, const DriverPath& driver,
                               const IntegratorConfig& cfg, const Vec& x0, double t);

/// One Heun step of `from` along `increment`, arriving at time `t_end`.
FlowState advance(const VectorFieldSet& system, const IntegratorConfig& cfg,
                  const FlowState& from, const Vec& increment, double t_end);

/// Time-1 solution of y' = sum_i u_i X^i(y) (fixed-step RK4, step cfg.step).
Vec flow_of_combination(const VectorFieldSet& system, const Vec& weights, const Vec& x0,
                        const IntegratorConfig& cfg);

struct CommutativityReport {
  bool commuting = true;
  double max_defect = 0.0;
};

/// Max over field pairs (i, j) and sample points of
/// |phi^i_s(phi^j_t(x)) - phi^j_t(phi^i_s(x))|.
CommutativityReport verify_commutativity(const VectorFieldSet& system,
                                         std::span<const Vec> points, double s, double t,
                                         double tol, const IntegratorConfig& cfg);

}  // namespace flowdecomp
