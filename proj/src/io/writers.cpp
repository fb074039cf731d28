#include "io/writers.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/error.hpp"

namespace gf {

namespace {

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    auto tt = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

double wall_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void write_or_throw(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for '" + path + "'");
}

}  // namespace

void write_mesh_vtk(const std::string& path, const Simulation& sim) {
    const auto& mesh = sim.mesh();
    const auto& space = sim.space();
    std::string s;
    s.reserve(1 << 20);
    char buf[256];
    s += "# vtk DataFile Version 3.0\nfluid mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    std::snprintf(buf, sizeof buf, "POINTS %zu double\n", sim.points().size());
    s += buf;
    for (const auto& p : sim.points()) {
        std::snprintf(buf, sizeof buf, "%.9g %.9g 0\n", p.x, p.y);
        s += buf;
    }
    std::snprintf(buf, sizeof buf, "CELLS %zu %zu\n", mesh.kept_ids.size(),
                  4 * mesh.kept_ids.size());
    s += buf;
    for (int t : mesh.kept_ids) {
        const auto& v = mesh.tri.tris[t];
        std::snprintf(buf, sizeof buf, "3 %d %d %d\n", v[0], v[1], v[2]);
        s += buf;
    }
    std::snprintf(buf, sizeof buf, "CELL_TYPES %zu\n", mesh.kept_ids.size());
    s += buf;
    for (std::size_t i = 0; i < mesh.kept_ids.size(); ++i) s += "5\n";

    std::snprintf(buf, sizeof buf, "POINT_DATA %zu\n", sim.points().size());
    s += buf;
    s += "VECTORS velocity double\n";
    for (const auto& u : sim.velocities()) {
        std::snprintf(buf, sizeof buf, "%.9g %.9g 0\n", u.x, u.y);
        s += buf;
    }
    s += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (double p : sim.pressures()) {
        std::snprintf(buf, sizeof buf, "%.9g\n", p);
        s += buf;
    }
    s += "SCALARS void_fraction double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < sim.points().size(); ++i) {
        int cn = space.compact[i];
        double eps = (cn >= 0 && cn < static_cast<int>(sim.void_fraction().size()))
                         ? sim.void_fraction()[cn]
                         : 1.0;
        std::snprintf(buf, sizeof buf, "%.9g\n", eps);
        s += buf;
    }
    write_or_throw(path, s);
}

void write_boundary_vtk(const std::string& path, const Simulation& sim) {
    const auto& mesh = sim.mesh();
    std::string s;
    char buf[256];
    s += "# vtk DataFile Version 3.0\nboundary polylines\nASCII\nDATASET POLYDATA\n";
    std::snprintf(buf, sizeof buf, "POINTS %zu double\n", sim.points().size());
    s += buf;
    for (const auto& p : sim.points()) {
        std::snprintf(buf, sizeof buf, "%.9g %.9g 0\n", p.x, p.y);
        s += buf;
    }
    std::snprintf(buf, sizeof buf, "LINES %zu %zu\n", mesh.boundary.size(),
                  3 * mesh.boundary.size());
    s += buf;
    for (const auto& e : mesh.boundary) {
        std::snprintf(buf, sizeof buf, "2 %d %d\n", e.a, e.b);
        s += buf;
    }
    std::snprintf(buf, sizeof buf, "CELL_DATA %zu\n", mesh.boundary.size());
    s += buf;
    s += "SCALARS colour int 1\nLOOKUP_TABLE default\n";
    for (const auto& e : mesh.boundary) s += e.color == EdgeColor::Wall ? "0\n" : "1\n";
    write_or_throw(path, s);
}

void write_grains_csv(const std::string& path, const std::vector<Grain>& grains) {
    std::string s = "id,x,y,vx,vy,omega,radius\n";
    char buf[256];
    for (const auto& g : grains) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", g.id, g.X.x,
                      g.X.y, g.V.x, g.V.y, g.omega, g.radius);
        s += buf;
    }
    write_or_throw(path, s);
}

CsvLog::CsvLog(const std::string& path, const std::string& header) : path_(path) {
    write_or_throw(path_, header + "\n");
}

void CsvLog::row(const std::string& line) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot append to '" + path_ + "'");
    out << line << "\n";
}

std::string format_csv(std::initializer_list<double> values) {
    std::string s;
    char buf[64];
    bool first = true;
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%s%.17g", first ? "" : ",", v);
        s += buf;
        first = false;
    }
    return s;
}

RunWriter::RunWriter(const std::string& directory, const ScenarioConfig& cfg)
    : dir_(directory), cfg_(cfg) {
    std::filesystem::create_directories(dir_);
    std::string probe_cols;
    for (std::size_t i = 0; i < cfg.probes.size(); ++i)
        probe_cols += ",probe_" + std::to_string(i);
    diagnostics_ = CsvLog(dir_ + "/diagnostics.csv",
                          "t,fluid_front,grain_front" + probe_cols + ",runup,volume,min_eps");
    coupling_stats_ = CsvLog(dir_ + "/coupling_stats.csv",
                             "t,min_eps,submerged_area,balance_residual");
    advection_stats_ = CsvLog(dir_ + "/advection_stats.csv",
                              "t,projected,max_penetration,volume");
    probe_series.resize(cfg.probes.size());
    started_at_ = timestamp_now();
    wall_t0_ = wall_seconds();

    nlohmann::json j;
    j["config"] = config_to_string(cfg);
    j["seed"] = cfg.seed;
    j["started_at"] = started_at_;
    j["status"] = "running";
    write_or_throw(dir_ + "/run_manifest.json", j.dump(2) + "\n");
}

void RunWriter::on_step(const Simulation& sim) {
    const auto& st = sim.stats();

    if (impact_time < 0.0 && !sim.grains().empty()) {
        int submerged = 0;
        for (const auto& g : sim.grains())
            if (g.X.y - g.radius < sim.still_water_level()) ++submerged;
        if (static_cast<std::size_t>(submerged) >= std::max<std::size_t>(1, sim.grains().size() / 100)) {
            impact_time = st.t;
            double v = 0.0;
            for (const auto& g : sim.grains()) v += g.V.norm();
            impact_mean_speed = v / sim.grains().size();
        }
    }

    auto fronts = track_fronts(sim);
    times.push_back(st.t);
    fluid_front.push_back(fronts.fluid);
    grain_front.push_back(fronts.granular);
    volumes.push_back(st.fluid_volume);
    double runup = shore_runup(sim, sim.runup_shore_segment());
    runup_series.push_back(runup);

    std::string row = format_csv({st.t, fronts.fluid, fronts.granular});
    for (std::size_t pi = 0; pi < cfg_.probes.size(); ++pi) {
        auto reading = wave_probe(sim, cfg_.probes[pi]);
        probe_series[pi].push_back(reading.amplitude);
        row += "," + format_csv({reading.amplitude});
    }
    row += "," + format_csv({runup, st.fluid_volume, st.min_eps});
    diagnostics_.row(row);
    coupling_stats_.row(format_csv({st.t, st.min_eps, st.submerged_area, st.balance_residual}));
    advection_stats_.row(format_csv({st.t, static_cast<double>(st.wall_projected),
                                     st.max_penetration, st.fluid_volume}));

    if ((sim.step_index() - 1) % cfg_.out.cadence == 0 || sim.finished()) {
        char name[64];
        if (cfg_.out.vtk) {
            std::snprintf(name, sizeof name, "/mesh_%06d.vtk", snapshots_);
            write_mesh_vtk(dir_ + name, sim);
            std::snprintf(name, sizeof name, "/boundary_%06d.vtk", snapshots_);
            write_boundary_vtk(dir_ + name, sim);
        }
        if (cfg_.out.grains_csv && !sim.grains().empty()) {
            std::snprintf(name, sizeof name, "/grains_%06d.csv", snapshots_);
            write_grains_csv(dir_ + name, sim.grains());
        }
        ++snapshots_;
    }
}

void RunWriter::finalize(const Simulation& sim, const std::string& extra_summary_json) {
    nlohmann::json j;
    j["config"] = config_to_string(cfg_);
    j["seed"] = cfg_.seed;
    j["started_at"] = started_at_;
    j["finished_at"] = timestamp_now();
    j["wall_clock_seconds"] = wall_seconds() - wall_t0_;
    j["steps"] = sim.step_index();
    j["status"] = "finished";
    j["warnings"] = {{"no_convergence", sim.warn_no_convergence},
                     {"extrapolation", sim.warn_extrapolation},
                     {"cfl", sim.warn_cfl},
                     {"adaptation_stall", sim.warn_adaptation_stall}};
    j["initial_volume"] = sim.initial_volume();
    j["final_volume"] = sim.mesh().area;
    j["summary"] = nlohmann::json::parse(extra_summary_json);
    write_or_throw(dir_ + "/run_manifest.json", j.dump(2) + "\n");
}

std::string summarize_run(const Simulation& sim, const RunWriter& w) {
    nlohmann::json j;
    const auto& cfg = sim.config();
    double g = -cfg.fluid.gravity.y;
    double h0 = sim.h0_reference();

    double vmin = sim.initial_volume(), vmax = sim.initial_volume();
    for (double v : w.volumes) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    j["initial_volume"] = sim.initial_volume();
    j["max_volume_loss_fraction"] =
        sim.initial_volume() > 0.0
            ? std::max(std::fabs(vmin - sim.initial_volume()),
                       std::fabs(vmax - sim.initial_volume())) / sim.initial_volume()
            : 0.0;

    if (cfg.name == "granular_collapse") {
        double vfm = max_front_velocity(w.times, w.grain_front);
        double fr = vfm / std::sqrt(g * h0);
        j["v_fm"] = vfm;
        j["fr_f"] = fr;
        j["regime"] = regime_name(classify_regime(fr));
    }
    if (cfg.name == "lituya") {
        j["impact_time"] = w.impact_time;
        j["impact_mean_speed"] = w.impact_mean_speed;
        j["impact_froude"] =
            w.impact_time >= 0.0 ? w.impact_mean_speed / std::sqrt(g * h0) : 0.0;
        double runup_max = 0.0;
        for (double r : w.runup_series) runup_max = std::max(runup_max, r);
        j["max_runup"] = runup_max;
    }
    if (!w.probe_series.empty()) {
        double amax = 0.0;
        for (double a : w.probe_series[0]) amax = std::max(amax, std::fabs(a));
        j["max_probe_amplitude"] = amax;
    }
    return j.dump();
}

}  // namespace gf
