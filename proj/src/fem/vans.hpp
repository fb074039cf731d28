#pragma once

#include <span>

#include "coupling/coupling.hpp"
#include "fem/linear_system.hpp"

namespace gf {

// Semi-implicit time-discretized volume-averaged Navier-Stokes on P1-P1
// triangles with quasi-static PSPG pressure stabilization. Unknown ordering:
// [ux_0, uy_0, ..., p_0, p_1, ...] over compact nodes.
//
// Momentum rows: lumped eps-weighted mass / dt, implicit eps*eta viscous
// stress, pressure gradient (integrated by parts), semi-implicit drag source
// coupling u^{n+1} and p^{n+1} through the grain velocity prediction, and
// eps*rho*g gravity. Continuity rows: div(eps u^{n+1} + (1-eps) v*) in weak
// form plus the eps-scaled PSPG term. There is no convective term: the nodes
// move with the flow.
LinearSystem assemble_vans(const FemSpace& space, const FluidField& field_n,
                           const CouplingState& cpl, const FluidMaterial& mat, double dt);

// Free-slip walls via rotation to the (normal, tangent) frame and Dirichlet
// elimination of the normal component (corners pin both components), the
// free-surface traction p0*n - kappa*gamma_st*n integrated edge-wise, and a
// single pressure pin when no free surface exists.
void apply_boundary_conditions(LinearSystem& sys, const FemSpace& space, const FluidMaterial& mat);

FluidField solve_step(LinearSystem& sys, const FemSpace& space);

struct ElementStress {
    // row-major 2x2 per element: sigma = -p I + eps eta (grad u + grad u^T)
    std::vector<std::array<double, 4>> sigma;
    std::vector<Vec2> div_sigma;  // element-wise -grad p
};
ElementStress compute_element_stress(const FemSpace& space, const FluidField& field,
                                     std::span<const double> eps, const FluidMaterial& mat);

}  // namespace gf
