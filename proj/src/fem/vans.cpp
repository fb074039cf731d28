#include "fem/vans.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace gf {

LinearSystem assemble_vans(const FemSpace& space, const FluidField& field_n,
                           const CouplingState& cpl, const FluidMaterial& mat, double dt) {
    const int nn = space.n_nodes();
    LinearSystem sys(space.n_dof());
    const double rho = mat.density, eta = mat.viscosity, nu = eta / rho;
    const Vec2 g = mat.gravity;

    // Domain-mean velocity: the PSPG advective scale uses |u - u_mean| so a
    // uniformly translating frame assembles the same stabilization.
    Vec2 u_mean{};
    for (const auto& u : field_n.u) u_mean += u;
    if (nn > 0) u_mean = u_mean / static_cast<double>(nn);

    auto eps_of = [&](int cn) { return cpl.eps.empty() ? 1.0 : cpl.eps[cn]; };

    for (const auto& e : space.elems) {
        const double A = e.area;
        const std::array<double, 3> eps{eps_of(e.n[0]), eps_of(e.n[1]), eps_of(e.n[2])};
        const double eps_bar = (eps[0] + eps[1] + eps[2]) / 3.0;

        for (int a = 0; a < 3; ++a) {
            // \int_e eps phi_a (exact for P1 eps)
            const double int_eps_phi =
                A / 12.0 * (2.0 * eps[a] + eps[(a + 1) % 3] + eps[(a + 2) % 3]);
            const double lumped_mass = rho / dt * int_eps_phi;
            for (int k = 0; k < 2; ++k) {
                const int row = space.udof(e.n[a], k);
                sys.add(row, row, lumped_mass);
                sys.add_rhs(row, lumped_mass * (k == 0 ? field_n.u[e.n[a]].x : field_n.u[e.n[a]].y));
                // gravity
                sys.add_rhs(row, rho * (k == 0 ? g.x : g.y) * int_eps_phi);
                // viscous eps*eta*(grad u + grad u^T) : grad(phi_a e_k)
                for (int m = 0; m < 3; ++m) {
                    sys.add(row, space.udof(e.n[m], k), eps_bar * eta * A * dot(e.grad[a], e.grad[m]));
                    const double ga[2] = {e.grad[a].x, e.grad[a].y};
                    const double gm[2] = {e.grad[m].x, e.grad[m].y};
                    for (int l = 0; l < 2; ++l)
                        sys.add(row, space.udof(e.n[m], l), eps_bar * eta * A * ga[l] * gm[k]);
                }
                // pressure gradient, integrated by parts: -\int p div(phi_a e_k)
                const double gak = k == 0 ? e.grad[a].x : e.grad[a].y;
                for (int m = 0; m < 3; ++m) sys.add(row, space.pdof(e.n[m]), -A / 3.0 * gak);
            }

            // continuity row
            const int rowp = space.pdof(e.n[a]);
            // \int eps (div u) phi_a
            for (int m = 0; m < 3; ++m) {
                sys.add(rowp, space.udof(e.n[m], 0), e.grad[m].x * int_eps_phi);
                sys.add(rowp, space.udof(e.n[m], 1), e.grad[m].y * int_eps_phi);
            }
            // \int (u . grad eps) phi_a
            Vec2 grad_eps = e.grad[0] * eps[0] + e.grad[1] * eps[1] + e.grad[2] * eps[2];
            for (int m = 0; m < 3; ++m) {
                const double mass_am = A / 12.0 * (a == m ? 2.0 : 1.0);
                sys.add(rowp, space.udof(e.n[m], 0), grad_eps.x * mass_am);
                sys.add(rowp, space.udof(e.n[m], 1), grad_eps.y * mass_am);
            }
            // grain flux: \int div((1-eps) v*) phi_a = A/3 sum_b grad(phi_b) . w_b
            if (!cpl.w_terms.empty()) {
                for (int b = 0; b < 3; ++b) {
                    for (const auto& [k, wt] : cpl.w_terms[e.n[b]]) {
                        const GrainCoupling& gc = cpl.grains[k];
                        const double f = A / 3.0 * wt;
                        sys.add_rhs(rowp, -f * dot(e.grad[b], gc.pred.vstar_const));
                        for (int j = 0; j < 3; ++j) {
                            const double cj = f * gc.pred.s * gc.u_w[j];
                            sys.add(rowp, space.udof(gc.u_nodes[j], 0), cj * e.grad[b].x);
                            sys.add(rowp, space.udof(gc.u_nodes[j], 1), cj * e.grad[b].y);
                        }
                        for (const auto& [pn, c] : gc.gradp_coeff)
                            sys.add(rowp, space.pdof(pn), f * gc.pred.gradp_coeff * dot(e.grad[b], c));
                    }
                }
            }
            // PSPG: tau eps (grad phi_a) . (grad p - eps rho g) / rho
            Vec2 ue = (field_n.u[e.n[0]] + field_n.u[e.n[1]] + field_n.u[e.n[2]]) / 3.0 - u_mean;
            const double he = std::sqrt(4.0 * A / std::sqrt(3.0));
            const double tau = he * he / (4.0 * nu + 2.0 * ue.norm() * he);
            const double coef = tau * eps_bar * A / rho;
            for (int m = 0; m < 3; ++m) sys.add(rowp, space.pdof(e.n[m]), coef * dot(e.grad[a], e.grad[m]));
            sys.add_rhs(rowp, coef * eps_bar * rho * dot(e.grad[a], g));
        }
    }

    // Semi-implicit drag source on the momentum rows, distributed over the
    // overlapped elements proportionally to the overlap areas.
    for (const auto& gc : cpl.grains) {
        if (!gc.active) continue;
        const double one_minus_s = 1.0 - gc.pred.s;
        for (std::size_t pi = 0; pi < gc.parts.size(); ++pi) {
            const auto& el = space.elems[gc.part_elem[pi]];
            const auto& T = space.mesh->tri;
            auto bc = barycentric(T.points[T.tris[el.tri][0]], T.points[T.tris[el.tri][1]],
                                  T.points[T.tris[el.tri][2]], gc.parts[pi].centroid);
            for (int a = 0; a < 3; ++a) {
                const double w = gc.parts[pi].area * bc[a] / gc.area_sub;
                for (int k = 0; k < 2; ++k) {
                    const int row = space.udof(el.n[a], k);
                    for (int j = 0; j < 3; ++j)
                        sys.add(row, space.udof(gc.u_nodes[j], k),
                                w * gc.gamma * one_minus_s * gc.u_w[j]);
                    for (const auto& [pn, c] : gc.gradp_coeff)
                        sys.add(row, space.pdof(pn),
                                -w * gc.area_sub * one_minus_s * (k == 0 ? c.x : c.y));
                    sys.add_rhs(row, w * gc.gamma *
                                         (k == 0 ? gc.pred.vstar_const.x : gc.pred.vstar_const.y));
                }
            }
        }
    }
    return sys;
}

void apply_boundary_conditions(LinearSystem& sys, const FemSpace& space, const FluidMaterial& mat) {
    const DomainMesh& mesh = *space.mesh;

    // Free-surface traction: t = p0 n - kappa gamma_st n on FS edges.
    for (const auto& be : mesh.boundary) {
        if (be.color != EdgeColor::FreeSurface) continue;
        int ca = space.compact[be.a], cb = space.compact[be.b];
        if (ca < 0 || cb < 0) continue;
        Point2 pa = mesh.tri.points[be.a], pb = mesh.tri.points[be.b];
        Vec2 d = pb - pa;
        double len = d.norm();
        if (len <= 0.0) continue;
        Vec2 n_out{d.y / len, -d.x / len};  // fluid on the left of a->b
        double ka = mesh.curvature[be.a], kb = mesh.curvature[be.b];
        double fa = len * (mat.p0 / 2.0 - mat.surface_tension * (ka / 3.0 + kb / 6.0));
        double fb = len * (mat.p0 / 2.0 - mat.surface_tension * (kb / 3.0 + ka / 6.0));
        sys.add_rhs(space.udof(ca, 0), n_out.x * fa);
        sys.add_rhs(space.udof(ca, 1), n_out.y * fa);
        sys.add_rhs(space.udof(cb, 0), n_out.x * fb);
        sys.add_rhs(space.udof(cb, 1), n_out.y * fb);
    }

    // Free-slip walls.
    std::vector<std::pair<int, Vec2>> rotations;
    std::vector<std::pair<int, double>> dirichlet;
    bool has_free_surface = false;
    for (const auto& be : mesh.boundary)
        if (be.color == EdgeColor::FreeSurface) has_free_surface = true;

    for (int cn = 0; cn < space.n_nodes(); ++cn) {
        int v = space.nodes[cn];
        if (!mesh.on_wall[v]) continue;
        if (mesh.wall_conflict[v])
            throw Error(ErrorCode::ConflictingConstraints,
                        "more than two independent wall normals at node " + std::to_string(v));
        Vec2 n1 = mesh.wall_normal[v];
        Vec2 vw = mesh.wall_velocity[v];
        if (mesh.wall_normal2[v] != Vec2{0.0, 0.0}) {
            // corner: both normal constraints pin the velocity
            Vec2 n2 = mesh.wall_normal2[v];
            double det = cross(n1, n2);
            double b1 = dot(n1, vw), b2 = dot(n2, vw);
            // solve [n1; n2] u = [b1; b2]
            Vec2 u{(b1 * n2.y - n1.y * b2) / det, (n1.x * b2 - b1 * n2.x) / det};
            dirichlet.emplace_back(space.udof(cn, 0), u.x);
            dirichlet.emplace_back(space.udof(cn, 1), u.y);
        } else {
            rotations.emplace_back(space.udof(cn, 0), n1);
            dirichlet.emplace_back(space.udof(cn, 0), dot(n1, vw));
        }
    }
    sys.rotate_pairs(rotations);
    for (const auto& [dof, val] : dirichlet) sys.set_dirichlet(dof, val);

    // Pressure gauge only when the boundary has no free surface.
    if (!has_free_surface && space.n_nodes() > 0) sys.set_dirichlet(space.pdof(0), 0.0);
}

FluidField solve_step(LinearSystem& sys, const FemSpace& space) {
    sys.finalize();
    auto x = sys.solve();
    FluidField f;
    f.u.resize(space.n_nodes());
    f.p.resize(space.n_nodes());
    for (int cn = 0; cn < space.n_nodes(); ++cn) {
        f.u[cn] = {x[space.udof(cn, 0)], x[space.udof(cn, 1)]};
        f.p[cn] = x[space.pdof(cn)];
    }
    return f;
}

ElementStress compute_element_stress(const FemSpace& space, const FluidField& field,
                                     std::span<const double> eps, const FluidMaterial& mat) {
    ElementStress out;
    out.sigma.resize(space.elems.size());
    out.div_sigma.resize(space.elems.size());
    for (std::size_t i = 0; i < space.elems.size(); ++i) {
        const auto& e = space.elems[i];
        double dudx = 0, dudy = 0, dvdx = 0, dvdy = 0, pbar = 0;
        Vec2 gradp{};
        double eps_bar = 0;
        for (int m = 0; m < 3; ++m) {
            dudx += field.u[e.n[m]].x * e.grad[m].x;
            dudy += field.u[e.n[m]].x * e.grad[m].y;
            dvdx += field.u[e.n[m]].y * e.grad[m].x;
            dvdy += field.u[e.n[m]].y * e.grad[m].y;
            pbar += field.p[e.n[m]] / 3.0;
            gradp += e.grad[m] * field.p[e.n[m]];
            eps_bar += (eps.empty() ? 1.0 : eps[e.n[m]]) / 3.0;
        }
        // sigma = -p I + eps eta (grad u + grad u^T); the viscous part of a P1
        // field has zero element-wise divergence, so div sigma = -grad p.
        const double ee = eps_bar * mat.viscosity;
        out.sigma[i] = {-pbar + 2.0 * ee * dudx, ee * (dudy + dvdx), ee * (dudy + dvdx),
                        -pbar + 2.0 * ee * dvdy};
        out.div_sigma[i] = -gradp;
    }
    return out;
}

}  // namespace gf
