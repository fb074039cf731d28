#pragma once

#include <optional>
#include <vector>

#include "geom/vec2.hpp"

namespace gf {

// A wall segment is directed so the fluid side is on its left; the cached
// normal points away from the wall into the fluid.
struct WallSegment {
    Vec2 a, b;
    Vec2 velocity{0.0, 0.0};  // prescribed rigid translation (moving gate)
    Vec2 normal{0.0, 0.0};
    bool moving() const { return velocity.x != 0.0 || velocity.y != 0.0; }
};

struct WallHit {
    double distance;
    Vec2 point;    // closest point on the wall
    Vec2 normal;   // away from wall, fluid side
    Vec2 velocity;
    int segment;
};

// Fixed-depth quadtree over segment bounding boxes. Queries return every
// segment within the radius (false positives possible, never negatives).
class SegmentQuadtree {
public:
    SegmentQuadtree() = default;
    void build(const std::vector<WallSegment>& segments, double target_leaf_size);
    // Collect candidate segment ids whose leaf cells intersect the disc.
    void candidates(Vec2 p, double radius, std::vector<int>& out) const;
    bool empty() const { return nodes_.empty(); }

private:
    struct Node {
        double x0, y0, x1, y1;
        int child = -1;            // index of first of 4 children, -1 for leaf
        std::vector<int> segs;     // leaf payload
    };
    std::vector<Node> nodes_;
    int depth_ = 0;
    mutable std::vector<int> seen_epoch_;
    mutable int epoch_ = 0;
    int nsegs_ = 0;

    void insert(int node, int level, int seg, double sx0, double sy0, double sx1, double sy1);
    friend class WallSet;
};

class WallSet {
public:
    WallSet() = default;
    explicit WallSet(std::vector<WallSegment> segments, double index_leaf_size = 0.0);

    const std::vector<WallSegment>& segments() const { return segments_; }

    // Exact closest wall within `radius` of p, or nullopt.
    std::optional<WallHit> query(Vec2 p, double radius) const;

    // Wall segments whose leaf cells intersect the bbox of [p0, p1] inflated
    // by `pad` (for displacement-crossing tests).
    void candidates_along(Vec2 p0, Vec2 p1, double pad, std::vector<int>& out) const;

    // Candidate segment ids near p (superset of all segments within radius).
    void segment_candidates(Vec2 p, double radius, std::vector<int>& out) const {
        tree_.candidates(p, radius, out);
    }

    // Advance moving segments by dt and rebuild the index.
    void advance(double dt);

    bool empty() const { return segments_.empty(); }

private:
    std::vector<WallSegment> segments_;
    SegmentQuadtree tree_;
    double leaf_size_ = 0.0;
    mutable std::vector<int> scratch_;

    void rebuild();
};

// Free function matching the geometric operation: minimum distance to any
// wall within radius, with the closest point and fluid-side normal.
std::optional<WallHit> wall_query(Vec2 p, const WallSet& walls, double radius);

}  // namespace gf
