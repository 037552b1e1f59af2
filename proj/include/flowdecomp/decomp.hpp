#pragma once

// p-decomposability of a diffeomorphism of R^p x R^(n-p) and the pointwise
// factorization phi = xi o Psi, with Psi(x, y) = (x, phi2(x, y)) moving along
// vertical leaves and xi(u, v) = (xi1(u, v), v) moving along horizontal leaves.

#include <functional>
#include <vector>

#include "flowdecomp/linalg.hpp"
#include "flowdecomp/sde.hpp"

namespace flowdecomp {

struct SplitSpec {
  int p = 1;
  int n = 2;

  void validate() const;
  int vertical_dim() const noexcept { return n - p; }
};

/// Determinant of the lower-right (n-p) x (n-p) block of `jacobian`.
double vertical_block_det(const Mat& jacobian, const SplitSpec& split);
bool is_p_decomposable(const Mat& jacobian, const SplitSpec& split, double tol);

/// Vertical block determinant at every state of a trajectory.
std::vector<double> det_series(const Trajectory& trajectory, const SplitSpec& split);

class FrozenDriver;

/// A deterministic map R^n -> R^n with Jacobian, usually a replayed flow.
class FlowMap {
 public:
  using Evaluator = std::function<FlowState(const Vec&)>;

  FlowMap(int dimension, Evaluator evaluator);

  int dimension() const noexcept { return dimension_; }
  FlowState evaluate(const Vec& x) const;
  Vec operator()(const Vec& x) const { return evaluate(x).point; }

  /// phi_t obtained by integrating from each requested initial condition
  /// against the stored plain driver.
  static FlowMap from_driver(VectorFieldSet system, DriverPath driver, IntegratorConfig cfg,
                             double t);
  /// Marcus flow under a frozen driver, read at grid index `grid_index`.
  static FlowMap from_frozen(VectorFieldSet system, FrozenDriver frozen, IntegratorConfig cfg,
                             std::size_t grid_index);
  static FlowMap linear(Mat a);

 private:
  int dimension_;
  Evaluator evaluator_;
};

Vec evaluate_psi(const FlowMap& map, const SplitSpec& split, const Vec& xy);

struct VerticalSolve {
  Vec preimage;   // w* with phi2(u, w*) = v
  Vec image;      // phi(u, w*)
  int iterations = 0;
  double residual = 0.0;
};

/// Newton iteration on w for phi2(u, w) = v, derivative = lower-right block of
/// the map's Jacobian.
VerticalSolve solve_vertical(const FlowMap& map, const SplitSpec& split, const Vec& uv,
                             const Vec& guess, const IntegratorConfig& cfg);

/// (phi1(u, w*), v).
Vec evaluate_xi(const FlowMap& map, const SplitSpec& split, const Vec& uv, const Vec& guess,
                const IntegratorConfig& cfg);

struct Decomposition {
  Vec psi;
  Vec xi;
  double vertical_det = 0.0;
  double residual = 0.0;
  int orientation = 1;
};

Decomposition decomposition_residual(const FlowMap& map, const SplitSpec& split, const Vec& xy,
                                     const IntegratorConfig& cfg);

}  // namespace flowdecomp
