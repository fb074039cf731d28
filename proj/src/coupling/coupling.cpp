#include "coupling/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace gf {

FemSpace build_fem_space(const DomainMesh& mesh) {
    FemSpace sp;
    sp.mesh = &mesh;
    const auto& T = mesh.tri;
    sp.compact.assign(T.points.size(), -1);
    for (int t : mesh.kept_ids)
        for (int v : T.tris[t])
            if (sp.compact[v] < 0) {
                sp.compact[v] = static_cast<int>(sp.nodes.size());
                sp.nodes.push_back(v);
            }
    sp.elem_of_tri.assign(T.tris.size(), -1);
    sp.elems.reserve(mesh.kept_ids.size());
    for (int t : mesh.kept_ids) {
        Point2 a = T.points[T.tris[t][0]], b = T.points[T.tris[t][1]], c = T.points[T.tris[t][2]];
        double area = triangle_area(a, b, c);
        if (area < 1e-14)
            throw Error(ErrorCode::SingularElement,
                        "kept triangle below the area threshold reached assembly");
        FemSpace::Elem e;
        e.n = {sp.compact[T.tris[t][0]], sp.compact[T.tris[t][1]], sp.compact[T.tris[t][2]]};
        e.area = area;
        double inv2A = 1.0 / (2.0 * area);
        e.grad = {perp(c - b) * inv2A, perp(a - c) * inv2A, perp(b - a) * inv2A};
        e.centroid = (a + b + c) / 3.0;
        e.tri = t;
        sp.elem_of_tri[t] = static_cast<int>(sp.elems.size());
        sp.elems.push_back(e);
    }
    return sp;
}

double drag_coefficient(const Grain& grain, Vec2 u_local, double eps_local,
                        const FluidMaterial& mat) {
    double eps = std::clamp(eps_local, kEpsFloor, 1.0);
    double d = 2.0 * grain.radius;
    double re = mat.density * d * (u_local - grain.V).norm() / mat.viscosity;
    double base = 0.63 * std::sqrt(eps * re) + 4.8;
    return std::pow(eps, -2.8) * base * base * (std::numbers::pi * d / 4.0) * mat.viscosity;
}

GrainPrediction predict_grain_velocity(const Grain& grain, double gamma, double dt, Vec2 gravity,
                                       double submerged_area) {
    GrainPrediction p;
    p.beta = dt / (grain.mass + gamma * dt);
    p.s = gamma * p.beta;
    p.gradp_coeff = -p.beta * submerged_area;
    p.vstar_const = grain.V * (1.0 - p.s) + (grain.Fc + gravity * grain.mass) * p.beta;
    return p;
}

std::vector<double> project_void_fraction(std::span<const OverlapDecomposition> overlaps,
                                          const FemSpace& space) {
    std::vector<double> eps(space.n_nodes(), 1.0);
    std::vector<double> solid(space.n_nodes(), 0.0);
    std::vector<double> lumped(space.n_nodes(), 0.0);
    for (const auto& e : space.elems)
        for (int a = 0; a < 3; ++a) lumped[e.n[a]] += e.area / 3.0;

    for (const auto& dec : overlaps) {
        for (const auto& part : dec.parts) {
            int ei = space.elem_of_tri[part.tri];
            if (ei < 0) continue;
            const auto& e = space.elems[ei];
            const auto& T = space.mesh->tri;
            auto bc = barycentric(T.points[T.tris[e.tri][0]], T.points[T.tris[e.tri][1]],
                                  T.points[T.tris[e.tri][2]], part.centroid);
            for (int a = 0; a < 3; ++a) solid[e.n[a]] += part.area * bc[a];
        }
    }
    for (int n = 0; n < space.n_nodes(); ++n) {
        if (lumped[n] > 0.0) eps[n] = std::clamp(1.0 - solid[n] / lumped[n], kEpsFloor, 1.0);
    }
    return eps;
}

std::vector<Vec2> project_grain_velocity(std::span<const OverlapDecomposition> overlaps,
                                         std::span<const Vec2> values, const FemSpace& space) {
    std::vector<Vec2> w(space.n_nodes(), Vec2{});
    std::vector<double> lumped(space.n_nodes(), 0.0);
    for (const auto& e : space.elems)
        for (int a = 0; a < 3; ++a) lumped[e.n[a]] += e.area / 3.0;
    for (std::size_t k = 0; k < overlaps.size(); ++k) {
        for (const auto& part : overlaps[k].parts) {
            int ei = space.elem_of_tri[part.tri];
            if (ei < 0) continue;
            const auto& e = space.elems[ei];
            const auto& T = space.mesh->tri;
            auto bc = barycentric(T.points[T.tris[e.tri][0]], T.points[T.tris[e.tri][1]],
                                  T.points[T.tris[e.tri][2]], part.centroid);
            for (int a = 0; a < 3; ++a) w[e.n[a]] += values[k] * (part.area * bc[a]);
        }
    }
    for (int n = 0; n < space.n_nodes(); ++n)
        if (lumped[n] > 0.0) w[n] = w[n] / lumped[n];
    return w;
}

CouplingState build_coupling(std::span<const Grain> grains, const FemSpace& space,
                             const FluidField& field_n, const FluidMaterial& mat, double dt,
                             std::span<const int> locate_hints) {
    CouplingState st;
    const DomainMesh& mesh = *space.mesh;
    const auto& T = mesh.tri;

    st.overlaps.resize(grains.size());
    st.grains.resize(grains.size());
    for (std::size_t k = 0; k < grains.size(); ++k) {
        int hint = locate_hints.empty() ? -1 : locate_hints[k];
        st.overlaps[k] = disc_element_overlap(grains[k], mesh, hint);
        st.overlaps[k].grain = static_cast<int>(k);
    }

    st.eps = project_void_fraction(st.overlaps, space);
    st.lumped_mass.assign(space.n_nodes(), 0.0);
    for (const auto& e : space.elems)
        for (int a = 0; a < 3; ++a) st.lumped_mass[e.n[a]] += e.area / 3.0;

    st.w_terms.assign(space.n_nodes(), {});

    for (std::size_t k = 0; k < grains.size(); ++k) {
        GrainCoupling& gc = st.grains[k];
        gc.grain = static_cast<int>(k);
        const auto& dec = st.overlaps[k];
        if (dec.empty()) continue;

        gc.area_sub = dec.total_area;
        gc.parts = dec.parts;
        gc.part_elem.reserve(dec.parts.size());
        for (const auto& p : dec.parts) gc.part_elem.push_back(space.elem_of_tri[p.tri]);

        // Containing element for the grain center. A grain whose center has
        // left the domain but whose rim still overlaps it gets no drag and no
        // force (it is dry), but its displacement flux stays in the
        // continuity equation through a ballistic prediction below.
        int center_tri = mesh.locate(grains[k].X, dec.parts.front().tri);
        if (center_tri < 0) {
            gc.pred.vstar_const =
                grains[k].V + (grains[k].Fc + mat.gravity * grains[k].mass) *
                                  (dt / grains[k].mass);
            gc.pred.s = 0.0;
            gc.pred.gradp_coeff = 0.0;
            for (std::size_t pi = 0; pi < gc.parts.size(); ++pi) {
                const auto& el = space.elems[gc.part_elem[pi]];
                auto bcc = barycentric(T.points[T.tris[el.tri][0]], T.points[T.tris[el.tri][1]],
                                       T.points[T.tris[el.tri][2]], gc.parts[pi].centroid);
                for (int a = 0; a < 3; ++a) {
                    double w = gc.parts[pi].area * bcc[a] / st.lumped_mass[el.n[a]];
                    st.w_terms[el.n[a]].emplace_back(static_cast<int>(k), w);
                }
            }
            continue;
        }
        int ei = space.elem_of_tri[center_tri];
        if (ei < 0) continue;
        const auto& ce = space.elems[ei];

        gc.active = true;
        auto bc = barycentric(T.points[T.tris[center_tri][0]], T.points[T.tris[center_tri][1]],
                              T.points[T.tris[center_tri][2]], grains[k].X);
        gc.u_nodes = ce.n;
        gc.u_w = bc;

        Vec2 u_loc = field_n.u[ce.n[0]] * bc[0] + field_n.u[ce.n[1]] * bc[1] +
                     field_n.u[ce.n[2]] * bc[2];
        double eps_loc = st.eps[ce.n[0]] * bc[0] + st.eps[ce.n[1]] * bc[1] + st.eps[ce.n[2]] * bc[2];
        // The drag voidage is the worst (most covered) element the grain
        // touches, not just the centre value: a near-empty element at the bed
        // frontier has almost no fluid mass left, and only a drag that blows
        // up like eps^-2.8 there keeps its momentum rows non-singular.
        for (const auto& p : dec.parts) {
            int pe = space.elem_of_tri[p.tri];
            if (pe < 0) continue;
            const auto& el = space.elems[pe];
            double em = (st.eps[el.n[0]] + st.eps[el.n[1]] + st.eps[el.n[2]]) / 3.0;
            eps_loc = std::min(eps_loc, em);
        }
        gc.gamma = drag_coefficient(grains[k], u_loc, eps_loc, mat);
        gc.pred = predict_grain_velocity(grains[k], gc.gamma, dt, mat.gravity, gc.area_sub);

        // grad p at the grain: sub-area weighted element-constant gradients
        for (std::size_t pi = 0; pi < gc.parts.size(); ++pi) {
            const auto& el = space.elems[gc.part_elem[pi]];
            double w = gc.parts[pi].area / gc.area_sub;
            for (int a = 0; a < 3; ++a) gc.gradp_coeff.emplace_back(el.n[a], el.grad[a] * w);
        }

        // lumped w = (1-eps) v* terms
        for (std::size_t pi = 0; pi < gc.parts.size(); ++pi) {
            const auto& el = space.elems[gc.part_elem[pi]];
            auto bcc = barycentric(T.points[T.tris[el.tri][0]], T.points[T.tris[el.tri][1]],
                                   T.points[T.tris[el.tri][2]], gc.parts[pi].centroid);
            for (int a = 0; a < 3; ++a) {
                double w = gc.parts[pi].area * bcc[a] / st.lumped_mass[el.n[a]];
                st.w_terms[el.n[a]].emplace_back(static_cast<int>(k), w);
            }
        }
    }
    return st;
}

ExchangeResult interaction_force_exchange(const CouplingState& cpl, const FemSpace& space,
                                          const FluidField& solved) {
    ExchangeResult res;
    res.grain_force.assign(cpl.grains.size(), Vec2{});
    res.Vstar.assign(cpl.grains.size(), Vec2{});

    std::vector<Vec2> fluid_share(space.elems.size(), Vec2{});

    for (std::size_t k = 0; k < cpl.grains.size(); ++k) {
        const GrainCoupling& gc = cpl.grains[k];
        if (!gc.active) continue;
        Vec2 u_at = solved.u[gc.u_nodes[0]] * gc.u_w[0] + solved.u[gc.u_nodes[1]] * gc.u_w[1] +
                    solved.u[gc.u_nodes[2]] * gc.u_w[2];
        Vec2 grad_p{};
        for (const auto& [n, c] : gc.gradp_coeff) grad_p += c * solved.p[n];
        Vec2 vstar = gc.pred.evaluate(u_at, grad_p);
        res.Vstar[k] = vstar;
        Vec2 fi = grad_p * (-gc.area_sub) + (u_at - vstar) * gc.gamma;
        res.grain_force[k] = fi;
        res.total_submerged_area += gc.area_sub;
        for (std::size_t pi = 0; pi < gc.parts.size(); ++pi)
            fluid_share[gc.part_elem[pi]] -= fi * (gc.parts[pi].area / gc.area_sub);
    }

    Vec2 sum_grain{}, sum_fluid{};
    double scale = 0.0;
    for (const auto& f : res.grain_force) {
        sum_grain += f;
        scale += f.norm();
    }
    for (const auto& f : fluid_share) sum_fluid += f;
    res.balance_residual = (sum_grain + sum_fluid).norm() / std::max(scale, 1e-300);
    return res;
}

}  // namespace gf
