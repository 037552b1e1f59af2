#include "flowdecomp/decomp.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "flowdecomp/errors.hpp"
#include "flowdecomp/marcus.hpp"
#include "flowdecomp/zones.hpp"

namespace flowdecomp {

void SplitSpec::validate() const {
  if (!(0 < p && p < n)) {
    throw InvalidArgument("split requires 0 < p < n (got p=" + std::to_string(p) +
                          ", n=" + std::to_string(n) + ")");
  }
}

double vertical_block_det(const Mat& jacobian, const SplitSpec& split) {
  split.validate();
  if (jacobian.rows() != split.n || jacobian.cols() != split.n) {
    throw InvalidArgument("Jacobian shape does not match the split");
  }
  const int q = split.vertical_dim();
  return lu_determinant(jacobian.bottomRightCorner(q, q));
}

bool is_p_decomposable(const Mat& jacobian, const SplitSpec& split, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("decomposability tolerance must be positive");
  return std::abs(vertical_block_det(jacobian, split)) > tol;
}

std::vector<double> det_series(const Trajectory& trajectory, const SplitSpec& split) {
  std::vector<double> out;
  out.reserve(trajectory.size());
  for (const auto& s : trajectory) out.push_back(vertical_block_det(s.jacobian, split));
  return out;
}

// ---------------------------------------------------------------------------

FlowMap::FlowMap(int dimension, Evaluator evaluator)
    : dimension_(dimension), evaluator_(std::move(evaluator)) {}

FlowState FlowMap::evaluate(const Vec& x) const {
  if (x.size() != dimension_) throw InvalidArgument("flow map input has wrong length");
  return evaluator_(x);
}

FlowMap FlowMap::from_driver(VectorFieldSet system, DriverPath driver, IntegratorConfig cfg,
                             double t) {
  const int n = system.dimension();
  auto sys = std::make_shared<const VectorFieldSet>(std::move(system));
  auto path = std::make_shared<const DriverPath>(std::move(driver));
  return FlowMap(n, [sys, path, cfg, t](const Vec& x) {
    return integrate_flow_until(*sys, *path, cfg, x, t);
  });
}

FlowMap FlowMap::from_frozen(VectorFieldSet system, FrozenDriver frozen, IntegratorConfig cfg,
                             std::size_t grid_index) {
  if (grid_index >= frozen.base().size()) throw InvalidArgument("grid index beyond the driver");
  const int n = system.dimension();
  auto sys = std::make_shared<const VectorFieldSet>(std::move(system));
  auto drv = std::make_shared<const FrozenDriver>(std::move(frozen));
  return FlowMap(n, [sys, drv, cfg, grid_index](const Vec& x) {
    return integrate_marcus(*sys, *drv, cfg, x).at(grid_index);
  });
}

FlowMap FlowMap::linear(Mat a) {
  const auto n = static_cast<int>(a.rows());
  return FlowMap(n, [a](const Vec& x) { return FlowState{0.0, a * x, a}; });
}

// ---------------------------------------------------------------------------

Vec evaluate_psi(const FlowMap& map, const SplitSpec& split, const Vec& xy) {
  split.validate();
  const int q = split.vertical_dim();
  Vec out = xy;
  out.tail(q) = map(xy).tail(q);
  return out;
}

VerticalSolve solve_vertical(const FlowMap& map, const SplitSpec& split, const Vec& uv,
                             const Vec& guess, const IntegratorConfig& cfg) {
  split.validate();
  cfg.validate();
  const int q = split.vertical_dim();
  if (uv.size() != split.n) throw InvalidArgument("(u, v) has wrong length");
  if (guess.size() != q) throw InvalidArgument("Newton guess must have n - p entries");

  const Vec target = uv.tail(q);
  Vec z = uv;
  z.tail(q) = guess;

  for (int it = 0;; ++it) {
    const FlowState st = map.evaluate(z);
    const Vec r = st.point.tail(q) - target;
    const double res = r.norm();
    if (res <= cfg.newton_tolerance) return {z.tail(q), st.point, it, res};
    if (it >= cfg.newton_max_iterations) {
      throw NoConvergenceError("Newton inversion of the vertical map did not converge (residual " +
                               std::to_string(res) + ")");
    }
    const LuFactorization lu(st.jacobian.bottomRightCorner(q, q));
    if (std::abs(lu.determinant()) < cfg.det_floor) {
      throw NotDecomposableError("vertical Jacobian block is singular along Newton iteration");
    }
    z.tail(q) -= lu.solve(r);
  }
}

Vec evaluate_xi(const FlowMap& map, const SplitSpec& split, const Vec& uv, const Vec& guess,
                const IntegratorConfig& cfg) {
  const VerticalSolve sol = solve_vertical(map, split, uv, guess, cfg);
  Vec out = uv;
  out.head(split.p) = sol.image.head(split.p);
  return out;
}

Decomposition decomposition_residual(const FlowMap& map, const SplitSpec& split, const Vec& xy,
                                     const IntegratorConfig& cfg) {
  split.validate();
  const int q = split.vertical_dim();
  const FlowState phi = map.evaluate(xy);

  Decomposition d;
  d.vertical_det = vertical_block_det(phi.jacobian, split);
  d.orientation = d.vertical_det < 0.0 ? -1 : 1;
  d.psi = xy;
  d.psi.tail(q) = phi.point.tail(q);
  d.xi = evaluate_xi(map, split, d.psi, xy.tail(q), cfg);
  d.residual = (d.xi - phi.point).norm();
  return d;
}

}  // namespace flowdecomp
