#pragma once

#include <vector>

#include "geom/vec2.hpp"
#include "geom/walls.hpp"

namespace gf {

struct SizeFieldParams {
    double h_min = 0.0;
    double h_max = 0.0;
    double transition = 0.0;  // distance over which h ramps from h_min to h_max
};

// Target mesh size: h_min on the free surface, ramping linearly to h_max at
// `transition` distance from it. With no reference polyline every evaluation
// returns h_min (first time step).
class SizeField {
public:
    SizeField() = default;
    SizeField(SizeFieldParams params, std::vector<WallSegment> free_surface_segments);

    double operator()(Vec2 p) const;
    const SizeFieldParams& params() const { return params_; }
    bool uniform() const { return segments_.empty() || params_.h_min == params_.h_max; }

    static SizeField uniform_field(double h);

private:
    SizeFieldParams params_{};
    std::vector<WallSegment> segments_;
    SegmentQuadtree tree_;
    mutable std::vector<int> scratch_;
};

}  // namespace gf
