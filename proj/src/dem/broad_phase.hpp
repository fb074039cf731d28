#pragma once

#include <span>
#include <vector>

#include "dem/grain.hpp"
#include "geom/walls.hpp"

namespace gf {

enum class ContactKind { GrainGrain, GrainWall };

struct ContactCandidate {
    ContactKind kind;
    int i;          // grain index
    int j;          // other grain index, or wall segment id
    double gap;     // signed distance at current positions
    Vec2 normal;    // grain-grain: from i to j; grain-wall: from wall into the grain
    Vec2 tangent;   // perp(normal)
    Vec2 wall_velocity{};
};

// Uniform-grid candidate generation: every pair with gap < margin is
// returned (no false negatives), sorted by (kind, i, j) for determinism.
std::vector<ContactCandidate> broad_phase(std::span<const Grain> grains, const WallSet& walls,
                                          double margin);

}  // namespace gf
