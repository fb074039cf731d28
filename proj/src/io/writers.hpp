#pragma once

#include <string>

#include "sim/diagnostics.hpp"
#include "sim/simulation.hpp"

namespace gf {

// Legacy ASCII VTK snapshots: unstructured triangles with nodal u, p and
// void fraction, plus a companion polydata file with the coloured boundary
// polylines. File names follow mesh_%06d.vtk / boundary_%06d.vtk.
void write_mesh_vtk(const std::string& path, const Simulation& sim);
void write_boundary_vtk(const std::string& path, const Simulation& sim);

// grains_%06d.csv with header id,x,y,vx,vy,omega,radius
void write_grains_csv(const std::string& path, const std::vector<Grain>& grains);

// Per-run CSV streams; headers written on creation, rows flushed per call.
class CsvLog {
public:
    CsvLog() = default;
    CsvLog(const std::string& path, const std::string& header);
    void row(const std::string& line);

private:
    std::string path_;
};

std::string format_csv(std::initializer_list<double> values);

// Orchestrates one run: output directory, cadence-gated snapshot writing,
// diagnostics/coupling/advection CSVs and the run manifest.
class RunWriter {
public:
    RunWriter(const std::string& directory, const ScenarioConfig& cfg);

    // called after every step; writes snapshots at the configured cadence
    void on_step(const Simulation& sim);
    void finalize(const Simulation& sim, const std::string& extra_summary_json = "{}");

    const std::string& directory() const { return dir_; }


    // post-run series (kept for Froude evaluation)
    std::vector<double> times, fluid_front, grain_front, volumes;
    std::vector<std::vector<double>> probe_series;  // per probe
    std::vector<double> runup_series;
    // grain-impact detection (landslide runs)
    double impact_time = -1.0;
    double impact_mean_speed = 0.0;

private:
    std::string dir_;
    ScenarioConfig cfg_;
    CsvLog diagnostics_, coupling_stats_, advection_stats_;
    std::string started_at_;
    double wall_t0_ = 0.0;
    int snapshots_ = 0;
};

// Scenario-aware end-of-run summary (front Froude number and regime for the
// collapse, impact Froude/runup/sloshing for the landslide, volume budget
// for everything) as a JSON object string.
std::string summarize_run(const Simulation& sim, const RunWriter& writer);

}  // namespace gf
