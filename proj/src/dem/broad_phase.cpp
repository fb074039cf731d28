#include "dem/broad_phase.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace gf {

namespace {

struct CellKey {
    long long x, y;
    bool operator==(const CellKey&) const = default;
};
struct CellHash {
    std::size_t operator()(const CellKey& c) const {
        return std::hash<long long>()(c.x * 73856093LL ^ c.y * 19349663LL);
    }
};

}  // namespace

std::vector<ContactCandidate> broad_phase(std::span<const Grain> grains, const WallSet& walls,
                                          double margin) {
    std::vector<ContactCandidate> out;
    if (grains.empty()) return out;

    double rmax = 0.0;
    for (const auto& g : grains) rmax = std::max(rmax, g.radius);
    const double cell = 2.0 * rmax + margin;

    std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
    grid.reserve(grains.size() * 2);
    auto cell_of = [&](Vec2 p) {
        return CellKey{static_cast<long long>(std::floor(p.x / cell)),
                       static_cast<long long>(std::floor(p.y / cell))};
    };
    for (std::size_t i = 0; i < grains.size(); ++i) grid[cell_of(grains[i].X)].push_back(static_cast<int>(i));

    for (std::size_t i = 0; i < grains.size(); ++i) {
        const Grain& gi = grains[i];
        CellKey c = cell_of(gi.X);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find({c.x + dx, c.y + dy});
                if (it == grid.end()) continue;
                for (int j : it->second) {
                    if (j <= static_cast<int>(i)) continue;
                    const Grain& gj = grains[j];
                    double d = dist(gi.X, gj.X);
                    double gap = d - gi.radius - gj.radius;
                    if (gap >= margin) continue;
                    Vec2 n = d > 0.0 ? (gj.X - gi.X) / d : Vec2{1.0, 0.0};
                    out.push_back({ContactKind::GrainGrain, static_cast<int>(i), j, gap, n, perp(n), {}});
                }
            }
        }
    }

    if (!walls.empty()) {
        std::vector<int> segs;
        for (std::size_t i = 0; i < grains.size(); ++i) {
            const Grain& g = grains[i];
            walls.segment_candidates(g.X, g.radius + margin, segs);
            std::sort(segs.begin(), segs.end());
            for (int s : segs) {
                const WallSegment& seg = walls.segments()[s];
                Vec2 cp;
                double d = std::sqrt(closest_point_on_segment(g.X, seg.a, seg.b, cp));
                double gap = d - g.radius;
                if (gap >= margin) continue;
                Vec2 n = d > 1e-14 ? (g.X - cp) / d : seg.normal;
                out.push_back({ContactKind::GrainWall, static_cast<int>(i), s, gap, n, perp(n),
                               seg.velocity});
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const ContactCandidate& a, const ContactCandidate& b) {
        if (a.kind != b.kind) return a.kind == ContactKind::GrainGrain;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    return out;
}

}  // namespace gf
