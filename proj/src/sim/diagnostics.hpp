#pragma once

#include <optional>
#include <span>
#include <string>

#include "sim/simulation.hpp"

namespace gf {

enum class WaveRegime { NonlinearTransition, SolitaryNonBreaking, TransientBore };

// Froude-number thresholds between the collapse wave regimes.
WaveRegime classify_regime(double fr_f);
const char* regime_name(WaveRegime r);

struct Fronts {
    double fluid = std::numeric_limits<double>::quiet_NaN();
    double granular = std::numeric_limits<double>::quiet_NaN();
};

// Dam break: furthest horizontal advance within one local h of the floor
// (fluid) and the furthest grain. Collapse: furthest grain at or above the
// still-water level; NaN once every grain is submerged below it.
Fronts track_fronts(const Simulation& sim);

struct ProbeReading {
    double amplitude = 0.0;   // highest free-surface crossing minus still water
    bool intersected = false; // false: domain absent at the probe (datum used)
};
ProbeReading wave_probe(const Simulation& sim, double x_probe);

// Highest fluid point against the given shore wall, relative to still water.
double shore_runup(const Simulation& sim, int shore_segment);

double fluid_volume(const Simulation& sim);

// Max of the 5-sample smoothed finite-difference front velocity.
double max_front_velocity(std::span<const double> t, std::span<const double> x);

}  // namespace gf
