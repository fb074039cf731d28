#include "sim/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

WaveRegime classify_regime(double fr_f) {
    if (fr_f <= 0.35) return WaveRegime::NonlinearTransition;
    if (fr_f <= 0.87) return WaveRegime::SolitaryNonBreaking;
    return WaveRegime::TransientBore;
}

const char* regime_name(WaveRegime r) {
    switch (r) {
        case WaveRegime::NonlinearTransition: return "nonlinear_transition";
        case WaveRegime::SolitaryNonBreaking: return "solitary_non_breaking";
        case WaveRegime::TransientBore: return "transient_bore";
    }
    return "unknown";
}

Fronts track_fronts(const Simulation& sim) {
    Fronts f;
    const auto& mesh = sim.mesh();
    const auto& sf = sim.size_field();

    if (sim.config().name == "granular_collapse") {
        double h0 = sim.still_water_level();
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& g : sim.grains())
            if (g.X.y >= h0) best = std::max(best, g.X.x);
        if (best > -std::numeric_limits<double>::infinity()) f.granular = best;
        // fluid front: furthest surface point (for reference output)
        double fbest = -std::numeric_limits<double>::infinity();
        for (const auto& e : mesh.boundary)
            if (e.color == EdgeColor::FreeSurface)
                fbest = std::max({fbest, mesh.tri.points[e.a].x, mesh.tri.points[e.b].x});
        if (fbest > -std::numeric_limits<double>::infinity()) f.fluid = fbest;
        return f;
    }

    // dam break and friends: horizontal advance near the floor
    double fbest = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sim.points().size(); ++i) {
        if (!mesh.in_mesh[i]) continue;
        Point2 p = sim.points()[i];
        if (p.y <= sf(p)) fbest = std::max(fbest, p.x);
    }
    if (fbest > -std::numeric_limits<double>::infinity()) f.fluid = fbest;
    double gbest = -std::numeric_limits<double>::infinity();
    for (const auto& g : sim.grains()) gbest = std::max(gbest, g.X.x);
    if (!sim.grains().empty()) f.granular = gbest;
    return f;
}

ProbeReading wave_probe(const Simulation& sim, double x_probe) {
    ProbeReading out;
    const auto& mesh = sim.mesh();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& e : mesh.boundary) {
        if (e.color != EdgeColor::FreeSurface) continue;
        Point2 a = mesh.tri.points[e.a], b = mesh.tri.points[e.b];
        if ((a.x - x_probe) * (b.x - x_probe) > 0.0) continue;
        double y;
        if (a.x == b.x) {
            y = std::max(a.y, b.y);
        } else {
            double t = (x_probe - a.x) / (b.x - a.x);
            y = a.y + t * (b.y - a.y);
        }
        best = std::max(best, y);
        out.intersected = true;
    }
    out.amplitude = out.intersected ? best - sim.still_water_level() : 0.0;
    return out;
}

double shore_runup(const Simulation& sim, int shore_segment) {
    if (shore_segment < 0) return 0.0;
    const auto& mesh = sim.mesh();
    const WallSegment& shore = sim.walls().segments()[shore_segment];
    double band = 2.0 * sim.config().num.h_min;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sim.points().size(); ++i) {
        if (!mesh.in_mesh[i]) continue;
        Vec2 cp;
        if (closest_point_on_segment(sim.points()[i], shore.a, shore.b, cp) <= band * band)
            best = std::max(best, sim.points()[i].y);
    }
    if (best == -std::numeric_limits<double>::infinity()) return 0.0;
    return best - sim.still_water_level();
}

double fluid_volume(const Simulation& sim) { return sim.mesh().area; }

double max_front_velocity(std::span<const double> t, std::span<const double> x) {
    double vmax = 0.0;
    const int w = 2;  // 5-sample centred window
    for (std::size_t k = w; k + w < t.size(); ++k) {
        if (std::isnan(x[k - w]) || std::isnan(x[k + w])) continue;
        double dtw = t[k + w] - t[k - w];
        if (dtw <= 0.0) continue;
        vmax = std::max(vmax, (x[k + w] - x[k - w]) / dtw);
    }
    return vmax;
}

}  // namespace gf
