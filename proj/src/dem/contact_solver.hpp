#pragma once

#include <span>
#include <vector>

#include "dem/broad_phase.hpp"
#include "dem/grain.hpp"

namespace gf {

// Velocity-level non-smooth contact dynamics: fully inelastic Signorini
// complementarity plus a Coulomb cone, solved by projected Gauss-Seidel over
// the candidate contacts in their (sorted) order.
struct ContactSolution {
    struct Impulse {
        ContactCandidate contact;
        double pn = 0.0;  // normal impulse >= 0 [N s/m]
        double pt = 0.0;  // tangential impulse, |pt| <= mu*pn
        double bound = 0.0;  // Signorini velocity bound: v_n_post >= bound
    };
    std::vector<Impulse> impulses;
    std::vector<Vec2> post_velocity;     // per grain
    std::vector<double> post_omega;
    std::vector<Vec2> contact_force;     // Fc = sum(impulses)/dt
    std::vector<double> contact_torque;  // Mc
    bool converged = true;
    int sweeps = 0;
};

inline constexpr int kContactSweepCap = 200;
inline constexpr double kContactRelTol = 1e-10;

// `external` holds the total non-contact force on each grain (gravity plus
// fluid) whose impulse over dt enters the free velocity. `warm_start`, when
// given, seeds the impulses of persistent contacts from the previous step
// (keyed by kind and ids), which settles dense piles in a few sweeps.
struct WarmStart {
    struct Entry {
        ContactKind kind;
        int i, j;
        double pn, pt;
    };
    std::vector<Entry> entries;  // sorted like the candidate order
};

ContactSolution solve_contacts_nscd(std::span<const Grain> grains,
                                    std::span<const ContactCandidate> candidates,
                                    std::span<const Vec2> external_force,
                                    const GrainMaterial& mat, double dt,
                                    const WarmStart* warm_start = nullptr);

WarmStart make_warm_start(const ContactSolution& sol);

// First-order implicit-Euler state update using the solved contact forces.
void integrate_grains(std::vector<Grain>& grains, const ContactSolution& contacts, Vec2 gravity,
                      double dt);

}  // namespace gf
