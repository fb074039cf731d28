#pragma once

#include <vector>

#include "dem/grain.hpp"
#include "geom/walls.hpp"
#include "sim/config.hpp"

namespace gf {

struct BuiltScenario {
    WallSet walls;
    std::vector<Point2> fluid_points;
    std::vector<Grain> grains;
    GrainMaterial grain_material;
    double still_water_level = 0.0;
    double h0_reference = 0.0;  // Froude reference height
    std::vector<WallSegment> initial_surface;  // seeds the first size field
    int runup_shore_segment = -1;              // lituya: opposite-shore wall id
    int settle_steps = 0;
};

// Builds the initial state: container walls (gate included), a fluid point
// lattice at the target size, and a grain packing produced by a gravity
// settling pre-run against the closed container (fluid disabled, state
// frozen afterwards).
BuiltScenario build_scenario(const ScenarioConfig& cfg);

}  // namespace gf
