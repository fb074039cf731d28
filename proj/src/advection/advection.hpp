#pragma once

#include <span>
#include <vector>

#include "geom/adapt.hpp"
#include "geom/domain_mesh.hpp"
#include "geom/walls.hpp"

namespace gf {

struct AdvectionReport {
    int projected = 0;               // wall-projected particle count
    double max_penetration = 0.0;    // deepest corrected crossing [m]
};

// Second-order Lagrangian position update:
// x^{n+1} = x^n + u^{n+1} dt + (u^{n+1} - u^n) dt.
void advect_fluid(std::vector<Point2>& positions, std::span<const Vec2> u_np1,
                  std::span<const Vec2> u_n, double dt);

// Particles whose displacement crossed a wall are placed at the closest point
// on that wall and lose the wall-normal part of their relative velocity;
// particles already sitting on a wall may only slide.
AdvectionReport project_wall_crossers(std::vector<Point2>& positions, std::vector<Vec2>& velocity,
                                      std::span<const Point2> previous, const WallSet& walls,
                                      double on_wall_tol);

// P1 transfer of nodal fields onto an adapted point set: surviving nodes keep
// their values bitwise, inserted nodes interpolate from the containing old
// element (nearest-element extrapolation outside, counted in the result).
struct TransferResult {
    std::vector<Vec2> u;
    std::vector<double> p;
    int extrapolated = 0;
};
TransferResult transfer_solution(const DomainMesh& old_mesh, std::span<const Vec2> u_old,
                                 std::span<const double> p_old,
                                 std::span<const Point2> new_points,
                                 std::span<const int> old_of_new);

}  // namespace gf
