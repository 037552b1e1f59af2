#pragma once

// Marcus-type integration under a frozen driver: Stratonovich (Wong-Zakai)
// stepping where Z moves continuously, constant state while Z is held, and a
// unit-time flow of the field sum_i dZ_i X^i at each recorded jump.

#include "flowdecomp/linalg.hpp"
#include "flowdecomp/sde.hpp"
#include "flowdecomp/zones.hpp"

namespace flowdecomp {

/// Time-1 flow of y' = sum_i dz_i X^i(y) from x.
Vec marcus_jump(const VectorFieldSet& system, const Vec& x, const Vec& dz,
                const IntegratorConfig& cfg);

/// Central finite differences of marcus_jump over the initial condition.
Mat marcus_jump_jacobian(const VectorFieldSet& system, const Vec& x, const Vec& dz,
                         const IntegratorConfig& cfg);

/// States at every grid time of the frozen driver's base path.
Trajectory integrate_marcus(const VectorFieldSet& system, const FrozenDriver& frozen,
                            const IntegratorConfig& cfg, const Vec& x0);

/// phi^{X^0}_{u_0} o ... o phi^{X^m}_{u_m} applied to x0 (rightmost first).
Vec compose_commuting_flow(const VectorFieldSet& system, const Vec& u, const Vec& x0,
                           const IntegratorConfig& cfg);

}  // namespace flowdecomp
