#include "geom/size_field.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace gf {

SizeField::SizeField(SizeFieldParams params, std::vector<WallSegment> free_surface_segments)
    : params_(params), segments_(std::move(free_surface_segments)) {
    if (params_.h_min <= 0.0 || params_.h_max < params_.h_min)
        throw Error(ErrorCode::ConfigInvalid, "size field requires 0 < h_min <= h_max");
    if (params_.transition <= 0.0) params_.transition = params_.h_max;
    if (!segments_.empty()) tree_.build(segments_, params_.h_max);
}

SizeField SizeField::uniform_field(double h) {
    SizeField f;
    f.params_ = {h, h, h};
    return f;
}

double SizeField::operator()(Vec2 p) const {
    if (params_.h_min == params_.h_max) return params_.h_min;
    if (segments_.empty()) return params_.h_min;  // no polyline yet: finest everywhere
    tree_.candidates(p, params_.transition, scratch_);
    double d2_best = params_.transition * params_.transition;
    bool found = false;
    Vec2 best_cp{}, best_normal{};
    for (int s : scratch_) {
        Vec2 cp;
        double d2 = closest_point_on_segment(p, segments_[s].a, segments_[s].b, cp);
        if (d2 <= d2_best) {
            d2_best = d2;
            best_cp = cp;
            best_normal = segments_[s].normal;
            found = true;
        }
    }
    if (!found) return params_.h_max;
    // The ramp runs inward only: anything on or beyond the surface stays at
    // h_min, otherwise an outward-drifting envelope would see ever looser
    // acceptance from its own previous surface (positive feedback).
    if (dot(p - best_cp, best_normal) <= 0.0) return params_.h_min;
    double t = std::clamp(std::sqrt(d2_best) / params_.transition, 0.0, 1.0);
    return params_.h_min + (params_.h_max - params_.h_min) * t;
}

}  // namespace gf
