#include "dem/contact_solver.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace gf {

ContactSolution solve_contacts_nscd(std::span<const Grain> grains,
                                    std::span<const ContactCandidate> candidates,
                                    std::span<const Vec2> external_force,
                                    const GrainMaterial& mat, double dt,
                                    const WarmStart* warm_start) {
    const std::size_t n = grains.size();
    ContactSolution sol;
    sol.post_velocity.resize(n);
    sol.post_omega.resize(n);
    sol.contact_force.assign(n, Vec2{});
    sol.contact_torque.assign(n, 0.0);

    // Free velocities: external impulses applied up-front.
    for (std::size_t i = 0; i < n; ++i) {
        sol.post_velocity[i] = grains[i].V + external_force[i] * (dt / grains[i].mass);
        sol.post_omega[i] = grains[i].omega;  // no external torque (no fluid torque)
    }
    auto& V = sol.post_velocity;
    auto& W = sol.post_omega;

    sol.impulses.reserve(candidates.size());
    for (const auto& c : candidates) {
        ContactSolution::Impulse imp;
        imp.contact = c;
        // A positive gap may close by at most gap/dt this step; overlapping
        // contacts must not approach any further (velocity-level Signorini).
        imp.bound = c.gap > 0.0 ? -c.gap / dt : 0.0;
        sol.impulses.push_back(imp);
    }

    // Warm start: merge previous impulses by (kind, i, j); both lists share
    // the candidate ordering so one linear sweep matches them up.
    if (warm_start && !warm_start->entries.empty()) {
        auto key_less = [](ContactKind k1, int a1, int b1, ContactKind k2, int a2, int b2) {
            if (k1 != k2) return k1 == ContactKind::GrainGrain;
            if (a1 != a2) return a1 < a2;
            return b1 < b2;
        };
        std::size_t w = 0;
        for (auto& imp : sol.impulses) {
            const auto& c = imp.contact;
            while (w < warm_start->entries.size() &&
                   key_less(warm_start->entries[w].kind, warm_start->entries[w].i,
                            warm_start->entries[w].j, c.kind, c.i, c.j))
                ++w;
            if (w < warm_start->entries.size()) {
                const auto& e = warm_start->entries[w];
                if (e.kind == c.kind && e.i == c.i && e.j == c.j) {
                    imp.pn = e.pn;
                    imp.pt = e.pt;
                }
            }
            // apply the seeded impulses to the working velocities
            if (imp.pn != 0.0 || imp.pt != 0.0) {
                Vec2 P = c.normal * imp.pn + c.tangent * imp.pt;
                if (c.kind == ContactKind::GrainGrain) {
                    V[c.i] -= P / grains[c.i].mass;
                    V[c.j] += P / grains[c.j].mass;
                    W[c.i] -= grains[c.i].radius * imp.pt / grains[c.i].inertia;
                    W[c.j] -= grains[c.j].radius * imp.pt / grains[c.j].inertia;
                } else {
                    V[c.i] += P / grains[c.i].mass;
                    W[c.i] -= grains[c.i].radius * imp.pt / grains[c.i].inertia;
                }
            }
        }
    }

    double vscale = 1.0;
    for (std::size_t i = 0; i < n; ++i) vscale = std::max(vscale, V[i].norm());
    for (const auto& c : candidates) vscale = std::max(vscale, c.wall_velocity.norm());

    auto normal_residual = [&](const ContactSolution::Impulse& imp) {
        const auto& c = imp.contact;
        double vn = c.kind == ContactKind::GrainGrain ? dot(c.normal, V[c.j] - V[c.i])
                                                      : dot(c.normal, V[c.i] - c.wall_velocity);
        return vn - imp.bound;
    };

    for (int sweep = 0; sweep < kContactSweepCap; ++sweep) {
        double max_delta = 0.0, max_imp = 0.0;
        for (auto& imp : sol.impulses) {
            const auto& c = imp.contact;
            const Grain& gi = grains[c.i];
            Vec2 nrm = c.normal, tng = c.tangent;
            double mu = c.kind == ContactKind::GrainGrain ? mat.friction : mat.wall_friction;

            if (c.kind == ContactKind::GrainGrain) {
                const Grain& gj = grains[c.j];
                const double kn = 1.0 / gi.mass + 1.0 / gj.mass;
                const double kt = kn + gi.radius * gi.radius / gi.inertia +
                                  gj.radius * gj.radius / gj.inertia;
                double vn = dot(nrm, V[c.j] - V[c.i]);
                double dpn = (imp.bound - vn) / kn;
                double pn_new = std::max(0.0, imp.pn + dpn);
                double d = pn_new - imp.pn;
                imp.pn = pn_new;
                V[c.i] -= nrm * (d / gi.mass);
                V[c.j] += nrm * (d / gj.mass);

                double vt = dot(tng, V[c.j] - V[c.i]) - gi.radius * W[c.i] - gj.radius * W[c.j];
                double dpt = -vt / kt;
                double bound = mu * imp.pn;
                double pt_new = std::clamp(imp.pt + dpt, -bound, bound);
                double dT = pt_new - imp.pt;
                imp.pt = pt_new;
                V[c.i] -= tng * (dT / gi.mass);
                V[c.j] += tng * (dT / gj.mass);
                W[c.i] -= gi.radius * dT / gi.inertia;
                W[c.j] -= gj.radius * dT / gj.inertia;

                max_delta = std::max({max_delta, std::fabs(d), std::fabs(dT)});
            } else {
                const double kn = 1.0 / gi.mass;
                const double kt = kn + gi.radius * gi.radius / gi.inertia;
                double vn = dot(nrm, V[c.i] - c.wall_velocity);
                double dpn = (imp.bound - vn) / kn;
                double pn_new = std::max(0.0, imp.pn + dpn);
                double d = pn_new - imp.pn;
                imp.pn = pn_new;
                V[c.i] += nrm * (d / gi.mass);

                double vt = dot(tng, V[c.i] - c.wall_velocity) - gi.radius * W[c.i];
                double dpt = -vt / kt;
                double bound = mu * imp.pn;
                double pt_new = std::clamp(imp.pt + dpt, -bound, bound);
                double dT = pt_new - imp.pt;
                imp.pt = pt_new;
                V[c.i] += tng * (dT / gi.mass);
                W[c.i] -= gi.radius * dT / gi.inertia;

                max_delta = std::max({max_delta, std::fabs(d), std::fabs(dT)});
            }
            max_imp = std::max({max_imp, std::fabs(imp.pn), std::fabs(imp.pt)});
        }
        sol.sweeps = sweep + 1;
        if (max_delta <= kContactRelTol * std::max(max_imp, 1e-300)) {
            // Impulse changes have settled; accept only once the Signorini
            // residuals are tight as well (active contacts at their bound,
            // inactive ones non-approaching).
            bool tight = true;
            for (const auto& imp : sol.impulses) {
                double r = normal_residual(imp);
                if (imp.pn > 0.0 ? std::fabs(r) > 5e-11 * vscale : r < -5e-11 * vscale) {
                    tight = false;
                    break;
                }
            }
            if (tight) break;
        }
        if (sweep == kContactSweepCap - 1) sol.converged = false;
    }

    // Equivalent forces and torques from the converged impulses.
    for (const auto& imp : sol.impulses) {
        const auto& c = imp.contact;
        Vec2 P = c.normal * imp.pn + c.tangent * imp.pt;
        if (c.kind == ContactKind::GrainGrain) {
            sol.contact_force[c.i] -= P / dt;
            sol.contact_force[c.j] += P / dt;
            sol.contact_torque[c.i] += -grains[c.i].radius * imp.pt / dt;
            sol.contact_torque[c.j] += -grains[c.j].radius * imp.pt / dt;
        } else {
            sol.contact_force[c.i] += P / dt;
            sol.contact_torque[c.i] += -grains[c.i].radius * imp.pt / dt;
        }
    }
    return sol;
}

WarmStart make_warm_start(const ContactSolution& sol) {
    WarmStart ws;
    ws.entries.reserve(sol.impulses.size());
    for (const auto& imp : sol.impulses)
        ws.entries.push_back({imp.contact.kind, imp.contact.i, imp.contact.j, imp.pn, imp.pt});
    return ws;
}

void integrate_grains(std::vector<Grain>& grains, const ContactSolution& contacts, Vec2 gravity,
                      double dt) {
    for (std::size_t i = 0; i < grains.size(); ++i) {
        Grain& g = grains[i];
        g.Fc = contacts.contact_force[i];
        g.Mc = contacts.contact_torque[i];
        g.V = g.V + (g.Fc + g.Ffluid + gravity * g.mass) * (dt / g.mass);
        g.omega = g.omega + dt / g.inertia * g.Mc;
        g.X = g.X + g.V * dt;
    }
}

}  // namespace gf
