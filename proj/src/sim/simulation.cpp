#include "sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "core/error.hpp"

namespace gf {

Simulation::Simulation(const ScenarioConfig& cfg) : cfg_(cfg) {
    validate_config(cfg_);
    BuiltScenario scen = build_scenario(cfg_);
    walls_ = std::move(scen.walls);
    x_ = std::move(scen.fluid_points);
    grains_ = std::move(scen.grains);
    u_.assign(x_.size(), Vec2{});
    p_.assign(x_.size(), 0.0);
    grain_hints_.assign(grains_.size(), -1);
    surface_seed_ = scen.initial_surface;
    scen_swl_ = scen.still_water_level;
    h0_ref_ = scen.h0_reference;
    runup_shore_ = scen.runup_shore_segment;
    remesh();
    initial_volume_ = mesh_.area;
}

void Simulation::dedup_points() {
    // Merge close pairs, keeping the lower index. The triangulation needs
    // 1e-12; beyond that, free-surface nodes can crowd arbitrarily (boundary
    // nodes are never collapsed by the adaptation) and two nearly coincident
    // nodes make the linear system numerically singular. A merge band well
    // below the target size is invisible to the physics.
    const double tol = std::max(1e-12, 0.05 * cfg_.num.h_min);
    struct CellHash {
        std::size_t operator()(const std::pair<long long, long long>& c) const {
            return std::hash<long long>()(c.first * 73856093LL ^ c.second * 19349663LL);
        }
    };
    std::unordered_map<std::pair<long long, long long>, std::vector<int>, CellHash> grid;
    const double cell = 4.0 * tol;
    std::vector<char> drop(x_.size(), 0);
    for (std::size_t i = 0; i < x_.size(); ++i) {
        auto cx = static_cast<long long>(std::floor(x_[i].x / cell));
        auto cy = static_cast<long long>(std::floor(x_[i].y / cell));
        bool dup = false;
        for (long long dx = -1; dx <= 1 && !dup; ++dx)
            for (long long dy = -1; dy <= 1 && !dup; ++dy) {
                auto it = grid.find({cx + dx, cy + dy});
                if (it == grid.end()) continue;
                for (int j : it->second)
                    if (dist(x_[i], x_[j]) < tol) dup = true;
            }
        if (dup)
            drop[i] = 1;
        else
            grid[{cx, cy}].push_back(static_cast<int>(i));
    }
    std::size_t w = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (drop[i]) continue;
        x_[w] = x_[i];
        u_[w] = u_[i];
        p_[w] = p_[i];
        ++w;
    }
    x_.resize(w);
    u_.resize(w);
    p_.resize(w);
}

void Simulation::remesh() {
    dedup_points();
    SizeFieldParams sfp{cfg_.num.h_min, cfg_.num.h_max, cfg_.num.transition};
    size_field_ = SizeField(sfp, surface_seed_);
    AlphaShapeParams ap{cfg_.num.alpha, cfg_.num.droplet_filter};

    auto tri = delaunay_triangulate(x_);
    DomainMesh mesh = alpha_shape_extract(std::move(tri), size_field_, ap, &walls_,
                                          cfg_.num.wall_tol_factor);
    color_boundary_edges(mesh, walls_, size_field_, cfg_.num.wall_tol_factor);

    auto res = adapt_mesh(mesh, size_field_, ap, walls_, cfg_.num.wall_tol_factor);
    if (res.stalled) ++warn_adaptation_stall;
    stats_.adapt_inserted = static_cast<int>(res.inserted_nodes.size());
    stats_.adapt_removed = static_cast<int>(res.removed_nodes.size());

    if (!res.inserted_nodes.empty() || !res.removed_nodes.empty()) {
        auto tr = transfer_solution(mesh, u_, p_, res.mesh.tri.points, res.old_of_new);
        stats_.transfer_extrapolated = tr.extrapolated;
        warn_extrapolation += tr.extrapolated;
        x_ = res.mesh.tri.points;
        u_ = std::move(tr.u);
        p_ = std::move(tr.p);
    } else {
        stats_.transfer_extrapolated = 0;
    }
    mesh_ = std::move(res.mesh);
    space_ = build_fem_space(mesh_);
    grain_hints_.assign(grains_.size(), -1);
}

void Simulation::step() {
    try {
        step_impl();
    } catch (const Error& e) {
        throw Error(e.code(), "step " + std::to_string(step_index_) + ": " + e.what());
    }
}

void Simulation::step_impl() {
    const double dt = cfg_.num.dt;
    stats_ = StepStats{};
    stats_.step = step_index_;

    // 1-4: triangulate, alpha-shape, colour, adapt (walls at t^n)
    remesh();

    // 5: coupling fields on the current mesh
    FluidField un;
    un.u.resize(space_.n_nodes());
    un.p.resize(space_.n_nodes());
    for (int cn = 0; cn < space_.n_nodes(); ++cn) {
        un.u[cn] = u_[space_.nodes[cn]];
        un.p[cn] = p_[space_.nodes[cn]];
    }
    cpl_ = build_coupling(grains_, space_, un, cfg_.fluid, dt, grain_hints_);
    for (std::size_t k = 0; k < grains_.size(); ++k)
        if (!cpl_.overlaps[k].empty()) grain_hints_[k] = cpl_.overlaps[k].parts.front().tri;

    // 6: assemble and solve the semi-implicit VANS system
    auto sys = assemble_vans(space_, un, cpl_, cfg_.fluid, dt);
    apply_boundary_conditions(sys, space_, cfg_.fluid);
    solved_ = solve_step(sys, space_);

    // 7: interaction forces (drag + stress term), Newton's third law exact
    auto ex = interaction_force_exchange(cpl_, space_, solved_);
    for (std::size_t k = 0; k < grains_.size(); ++k) grains_[k].Ffluid = ex.grain_force[k];
    stats_.balance_residual = ex.balance_residual;
    stats_.submerged_area = ex.total_submerged_area;

    // 8: contacts and grain integration
    if (!grains_.empty()) {
        double rmax = 0.0;
        for (const auto& g : grains_) rmax = std::max(rmax, g.radius);
        auto cands = broad_phase(grains_, walls_, 0.1 * rmax);
        std::vector<Vec2> ext(grains_.size());
        for (std::size_t k = 0; k < grains_.size(); ++k)
            ext[k] = grains_[k].Ffluid + cfg_.fluid.gravity * grains_[k].mass;
        auto sol = solve_contacts_nscd(grains_, cands, ext,
                                       {cfg_.grains.density, cfg_.grains.friction,
                                        cfg_.grains.wall_friction},
                                       dt, &contact_warm_);
        contact_warm_ = make_warm_start(sol);
        if (!sol.converged) {
            ++warn_no_convergence;
            stats_.contact_converged = false;
        }
        stats_.contact_sweeps = sol.sweeps;
        integrate_grains(grains_, sol, cfg_.fluid.gravity, dt);
    }

    // 9: scatter the solved fields; ballistic update for free particles
    std::vector<Vec2> u_new = u_;
    std::vector<double> p_new = p_;
    std::vector<char> in_space(x_.size(), 0);
    for (int cn = 0; cn < space_.n_nodes(); ++cn) {
        u_new[space_.nodes[cn]] = solved_.u[cn];
        p_new[space_.nodes[cn]] = solved_.p[cn];
        in_space[space_.nodes[cn]] = 1;
    }
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!in_space[i]) {
            u_new[i] = u_[i] + cfg_.fluid.gravity * dt;
            p_new[i] = 0.0;
        }
    }

    double umax = 0.0;
    for (const auto& uu : u_new) umax = std::max(umax, uu.norm());
    stats_.max_u = umax;
    if (umax * dt > 0.5 * cfg_.num.h_min) {
        ++warn_cfl;
        stats_.cfl_warning = true;
    }

    // 10: advect the fluid, move the gate, project wall crossers
    std::vector<Point2> prev = x_;
    advect_fluid(x_, u_new, u_, dt);
    walls_.advance(dt);
    auto rep = project_wall_crossers(x_, u_new, prev, walls_,
                                     cfg_.num.wall_tol_factor * cfg_.num.h_min);
    stats_.wall_projected = rep.projected;
    stats_.max_penetration = rep.max_penetration;

    u_ = std::move(u_new);
    p_ = std::move(p_new);

    // next step's size field follows this step's free surface
    surface_seed_ = mesh_.free_surface_segments();

    t_ += dt;
    ++step_index_;
    stats_.t = t_;
    stats_.nodes = space_.n_nodes();
    stats_.elements = static_cast<int>(space_.elems.size());
    stats_.grains = static_cast<int>(grains_.size());
    stats_.fluid_volume = mesh_.area;
    stats_.min_eps = cpl_.eps.empty() ? 1.0
                                      : *std::min_element(cpl_.eps.begin(), cpl_.eps.end());
}

}  // namespace gf
