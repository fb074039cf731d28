#include "geom/walls.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace gf {

void SegmentQuadtree::build(const std::vector<WallSegment>& segments, double target_leaf_size) {
    nodes_.clear();
    nsegs_ = static_cast<int>(segments.size());
    seen_epoch_.assign(nsegs_, 0);
    epoch_ = 0;
    if (segments.empty()) return;

    double x0 = segments[0].a.x, x1 = x0, y0 = segments[0].a.y, y1 = y0;
    for (const auto& s : segments) {
        x0 = std::min({x0, s.a.x, s.b.x});
        x1 = std::max({x1, s.a.x, s.b.x});
        y0 = std::min({y0, s.a.y, s.b.y});
        y1 = std::max({y1, s.a.y, s.b.y});
    }
    double span = std::max(x1 - x0, y1 - y0);
    if (span <= 0.0) span = 1.0;
    double pad = 0.02 * span;
    x0 -= pad; y0 -= pad; x1 += pad; y1 += pad;
    span = std::max(x1 - x0, y1 - y0);

    if (target_leaf_size <= 0.0) target_leaf_size = span / 16.0;
    depth_ = std::clamp(static_cast<int>(std::ceil(std::log2(span / target_leaf_size))), 2, 8);

    nodes_.push_back({x0, y0, x0 + span, y0 + span, -1, {}});
    for (int s = 0; s < nsegs_; ++s) {
        double sx0 = std::min(segments[s].a.x, segments[s].b.x);
        double sx1 = std::max(segments[s].a.x, segments[s].b.x);
        double sy0 = std::min(segments[s].a.y, segments[s].b.y);
        double sy1 = std::max(segments[s].a.y, segments[s].b.y);
        insert(0, 0, s, sx0, sy0, sx1, sy1);
    }
}

void SegmentQuadtree::insert(int node, int level, int seg, double sx0, double sy0, double sx1,
                             double sy1) {
    Node& n = nodes_[node];
    if (sx1 < n.x0 || sx0 > n.x1 || sy1 < n.y0 || sy0 > n.y1) return;
    if (level == depth_) {
        nodes_[node].segs.push_back(seg);
        return;
    }
    if (n.child < 0) {
        int base = static_cast<int>(nodes_.size());
        double mx = 0.5 * (n.x0 + n.x1), my = 0.5 * (n.y0 + n.y1);
        double cx0 = n.x0, cy0 = n.y0, cx1 = n.x1, cy1 = n.y1;
        nodes_.push_back({cx0, cy0, mx, my, -1, {}});
        nodes_.push_back({mx, cy0, cx1, my, -1, {}});
        nodes_.push_back({cx0, my, mx, cy1, -1, {}});
        nodes_.push_back({mx, my, cx1, cy1, -1, {}});
        nodes_[node].child = base;
    }
    int child = nodes_[node].child;
    for (int c = 0; c < 4; ++c) insert(child + c, level + 1, seg, sx0, sy0, sx1, sy1);
}

void SegmentQuadtree::candidates(Vec2 p, double radius, std::vector<int>& out) const {
    out.clear();
    if (nodes_.empty()) return;
    ++epoch_;
    double qx0 = p.x - radius, qx1 = p.x + radius, qy0 = p.y - radius, qy1 = p.y + radius;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int ni = stack.back();
        stack.pop_back();
        const Node& n = nodes_[ni];
        if (qx1 < n.x0 || qx0 > n.x1 || qy1 < n.y0 || qy0 > n.y1) continue;
        if (n.child >= 0) {
            for (int c = 0; c < 4; ++c) stack.push_back(n.child + c);
        } else {
            for (int s : n.segs) {
                if (seen_epoch_[s] != epoch_) {
                    seen_epoch_[s] = epoch_;
                    out.push_back(s);
                }
            }
        }
    }
}

WallSet::WallSet(std::vector<WallSegment> segments, double index_leaf_size)
    : segments_(std::move(segments)), leaf_size_(index_leaf_size) {
    for (auto& s : segments_) {
        double len = dist(s.a, s.b);
        if (len <= 0.0) throw Error(ErrorCode::ConfigInvalid, "degenerate wall segment");
        s.normal = perp(s.b - s.a) / len;
    }
    rebuild();
}

void WallSet::rebuild() { tree_.build(segments_, leaf_size_); }

std::optional<WallHit> WallSet::query(Vec2 p, double radius) const {
    if (segments_.empty()) return std::nullopt;
    tree_.candidates(p, radius, scratch_);
    double best = radius * radius;
    int best_seg = -1;
    Vec2 best_point;
    bool found = false;
    for (int s : scratch_) {
        Vec2 cp;
        double d2 = closest_point_on_segment(p, segments_[s].a, segments_[s].b, cp);
        // closed predicate: a point exactly at `radius` counts
        if (d2 < best || (!found && d2 <= best)) {
            best = d2;
            best_seg = s;
            best_point = cp;
            found = true;
        }
    }
    if (!found) return std::nullopt;
    const WallSegment& seg = segments_[best_seg];
    return WallHit{std::sqrt(best), best_point, seg.normal, seg.velocity, best_seg};
}

void WallSet::candidates_along(Vec2 p0, Vec2 p1, double pad, std::vector<int>& out) const {
    Vec2 mid = (p0 + p1) * 0.5;
    double radius = 0.5 * dist(p0, p1) + pad;
    tree_.candidates(mid, radius, out);
}

void WallSet::advance(double dt) {
    bool any = false;
    for (auto& s : segments_) {
        if (s.moving()) {
            s.a += s.velocity * dt;
            s.b += s.velocity * dt;
            any = true;
        }
    }
    if (any) rebuild();
}

std::optional<WallHit> wall_query(Vec2 p, const WallSet& walls, double radius) {
    return walls.query(p, radius);
}

}  // namespace gf
