#pragma once

#include <functional>
#include <optional>
#include <string>

#include "advection/advection.hpp"
#include "coupling/coupling.hpp"
#include "dem/broad_phase.hpp"
#include "dem/contact_solver.hpp"
#include "fem/vans.hpp"
#include "sim/scenario.hpp"

namespace gf {

struct StepStats {
    double t = 0.0;
    int step = 0;
    int nodes = 0, elements = 0, grains = 0;
    double fluid_volume = 0.0;
    double min_eps = 1.0;
    double submerged_area = 0.0;
    double balance_residual = 0.0;
    double max_u = 0.0;
    int contact_sweeps = 0;
    bool contact_converged = true;
    int wall_projected = 0;
    double max_penetration = 0.0;
    int adapt_inserted = 0, adapt_removed = 0;
    int transfer_extrapolated = 0;
    bool cfl_warning = false;
};

// One fully-Lagrangian coupled simulation: per step the fluid cloud is
// re-triangulated, filtered to the alpha-shape, colored against the walls and
// adapted; grains are projected onto the mesh; the semi-implicit VANS system
// is solved; grain forces are exchanged; contacts are resolved; and both
// phases advect (fluid wall crossings projected back).
class Simulation {
public:
    explicit Simulation(const ScenarioConfig& cfg);

    void step();
    double time() const { return t_; }
    int step_index() const { return step_index_; }
    bool finished() const { return t_ >= cfg_.end_time - 1e-12; }

    const ScenarioConfig& config() const { return cfg_; }
    const DomainMesh& mesh() const { return mesh_; }
    const FemSpace& space() const { return space_; }
    const std::vector<Point2>& points() const { return x_; }
    const std::vector<Vec2>& velocities() const { return u_; }
    const std::vector<double>& pressures() const { return p_; }
    const std::vector<double>& void_fraction() const { return cpl_.eps; }
    const std::vector<Grain>& grains() const { return grains_; }
    const WallSet& walls() const { return walls_; }
    const StepStats& stats() const { return stats_; }
    double still_water_level() const { return scen_swl_; }
    double h0_reference() const { return h0_ref_; }
    double initial_volume() const { return initial_volume_; }
    int runup_shore_segment() const { return runup_shore_; }
    const SizeField& size_field() const { return size_field_; }

    int warn_no_convergence = 0;
    int warn_extrapolation = 0;
    int warn_cfl = 0;
    int warn_adaptation_stall = 0;

private:
    ScenarioConfig cfg_;
    WallSet walls_;
    std::vector<Point2> x_;
    std::vector<Vec2> u_;
    std::vector<double> p_;
    std::vector<Grain> grains_;
    std::vector<int> grain_hints_;
    std::vector<WallSegment> surface_seed_;
    SizeField size_field_;

    DomainMesh mesh_;
    FemSpace space_;
    CouplingState cpl_;
    FluidField solved_;
    WarmStart contact_warm_;

    double t_ = 0.0;
    int step_index_ = 0;
    double scen_swl_ = 0.0, h0_ref_ = 0.0;
    double initial_volume_ = -1.0;
    int runup_shore_ = -1;
    StepStats stats_;

    void remesh();
    void dedup_points();
    void step_impl();
};

}  // namespace gf
