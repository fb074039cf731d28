#pragma once

#include <array>
#include <span>
#include <vector>

#include "coupling/overlap.hpp"
#include "dem/grain.hpp"
#include "geom/domain_mesh.hpp"

namespace gf {

struct FluidMaterial {
    double density = 1000.0;       // [kg/m^3]
    double viscosity = 1e-3;       // [Pa s]
    double surface_tension = 0.0;  // [N/m]
    double p0 = 0.0;               // external atmospheric pressure [Pa]
    Vec2 gravity{0.0, -9.81};
};

// Compact P1 space over the kept triangles of a DomainMesh.
struct FemSpace {
    const DomainMesh* mesh = nullptr;
    std::vector<int> nodes;    // compact -> mesh node id
    std::vector<int> compact;  // mesh node id -> compact id or -1
    struct Elem {
        std::array<int, 3> n;  // compact node ids
        double area;
        std::array<Vec2, 3> grad;  // P1 shape gradients
        Point2 centroid;
        int tri;  // full-triangulation id
    };
    std::vector<Elem> elems;
    std::vector<int> elem_of_tri;  // full tri id -> element index or -1

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_dof() const { return 3 * n_nodes(); }
    int udof(int cn, int k) const { return 2 * cn + k; }
    int pdof(int cn) const { return 2 * n_nodes() + cn; }
};

FemSpace build_fem_space(const DomainMesh& mesh);

struct FluidField {
    std::vector<Vec2> u;    // per compact node
    std::vector<double> p;  // per compact node
};

// Dallavalle drag with the Di Felice voidage correction:
// gamma = eps^-2.8 (0.63 sqrt(eps Re) + 4.8)^2 (pi d / 4) eta,
// Re = rho d |u - V| / eta.
double drag_coefficient(const Grain& grain, Vec2 u_local, double eps_local,
                        const FluidMaterial& mat);

// Affine prediction of the grain velocity:
// V* = V^n + dt/(m + gamma dt) (Fc^n - V_sub grad(p) + gamma (u - V^n) + m g).
// Returned as V* = vstar_const + s * u + P * grad(p) so the assembly can keep
// u^{n+1} and grad p^{n+1} implicit.
struct GrainPrediction {
    Vec2 vstar_const{};
    double s = 0.0;            // gamma dt / (m + gamma dt), weight of u
    double gradp_coeff = 0.0;  // -beta * V_sub, weight of grad p
    double beta = 0.0;         // dt / (m + gamma dt)
    Vec2 evaluate(Vec2 u, Vec2 grad_p) const {
        return vstar_const + u * s + grad_p * gradp_coeff;
    }
};
GrainPrediction predict_grain_velocity(const Grain& grain, double gamma, double dt, Vec2 gravity,
                                       double submerged_area);

// Everything the semi-implicit fluid assembly needs about one grain.
struct GrainCoupling {
    int grain = -1;
    bool active = false;
    double gamma = 0.0;
    GrainPrediction pred;
    double area_sub = 0.0;
    std::array<int, 3> u_nodes{-1, -1, -1};  // compact nodes of the element containing X
    std::array<double, 3> u_w{};             // P1 weights at X
    std::vector<std::pair<int, Vec2>> gradp_coeff;  // grad p = sum coeff * p_node
    std::vector<SubOverlap> parts;                  // with compact element ids resolved
    std::vector<int> part_elem;                     // element index per part
};

struct CouplingState {
    std::vector<OverlapDecomposition> overlaps;  // per grain
    std::vector<double> eps;                     // nodal void fraction, in [1e-8, 1]
    std::vector<double> lumped_mass;             // nodal integral of the P1 basis
    std::vector<GrainCoupling> grains;
    // per node: (grain k, weight) terms of w = (1-eps) v*, lumped
    std::vector<std::vector<std::pair<int, double>>> w_terms;
};

inline constexpr double kEpsFloor = 1e-8;

// Lumped L2 projection of the grain indicator: nodal (1-eps).
std::vector<double> project_void_fraction(std::span<const OverlapDecomposition> overlaps,
                                          const FemSpace& space);

// Lumped L2 projection of per-grain vectors (grain velocity field (1-eps)v).
std::vector<Vec2> project_grain_velocity(std::span<const OverlapDecomposition> overlaps,
                                         std::span<const Vec2> values, const FemSpace& space);

// Builds the per-step coupling state from step-n data.
CouplingState build_coupling(std::span<const Grain> grains, const FemSpace& space,
                             const FluidField& field_n, const FluidMaterial& mat, double dt,
                             std::span<const int> locate_hints);

struct ExchangeResult {
    std::vector<Vec2> grain_force;    // F_i per grain
    std::vector<Vec2> Vstar;          // evaluated predictions
    double balance_residual = 0.0;    // |sum F_i + sum fluid side| / scale
    double total_submerged_area = 0.0;
};

// Evaluates predictions against the solved field and forms the grain forces
// F_i = -A_sub <grad p> + gamma (u(X) - V*); the equal-and-opposite fluid
// share is distributed over the overlapped elements proportionally to A_e.
ExchangeResult interaction_force_exchange(const CouplingState& cpl, const FemSpace& space,
                                          const FluidField& solved);

}  // namespace gf
