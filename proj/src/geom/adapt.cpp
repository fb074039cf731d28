#include "geom/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "core/error.hpp"

namespace gf {

namespace {

constexpr double kSplitFactor = 1.4;
constexpr double kCollapseFactor = 0.6;
constexpr int kMaxIterations = 5;

struct EdgeKey {
    int a, b;
    bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};
EdgeKey key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Edges of kept triangles, each listed once with the apex nodes of the (up
// to two) incident kept triangles; boundary edges flagged separately. Long
// boundary edges are split too (their midpoints lie exactly on the old
// boundary, so no node moves): a stretching free surface otherwise sheds its
// surface layer into the alpha filter step after step.
struct EdgeInfo {
    std::vector<int> apex;
    bool boundary = false;
};
std::map<EdgeKey, EdgeInfo> kept_edges(const DomainMesh& mesh) {
    std::set<EdgeKey> bnd;
    for (const auto& e : mesh.boundary) bnd.insert(key(e.a, e.b));
    std::map<EdgeKey, EdgeInfo> edges;
    for (int t : mesh.kept_ids) {
        const auto& v = mesh.tri.tris[t];
        for (int i = 0; i < 3; ++i) {
            EdgeKey k = key(v[(i + 1) % 3], v[(i + 2) % 3]);
            auto& info = edges[k];
            info.apex.push_back(v[i]);
            info.boundary = bnd.count(k) > 0;
        }
    }
    return edges;
}

}  // namespace

AdaptResult adapt_mesh(const DomainMesh& mesh, const SizeField& h, const AlphaShapeParams& params,
                       const WallSet& walls, double wall_tol_factor) {
    AdaptResult res;
    res.area_before = mesh.area;

    std::vector<Point2> points = mesh.tri.points;
    std::vector<int> origin(points.size());
    for (std::size_t i = 0; i < origin.size(); ++i) origin[i] = static_cast<int>(i);
    // nodes inserted during this call are shielded from collapse: split and
    // collapse otherwise chase each other around the size-field ramp
    std::vector<char> inserted_node(points.size(), 0);

    const DomainMesh* cur = &mesh;
    DomainMesh work;

    for (int iter = 0; iter < kMaxIterations + 1; ++iter) {
        const auto edges = kept_edges(*cur);

        // Shortest incident interior-or-boundary kept edge per node.
        std::vector<double> min_edge(points.size(), std::numeric_limits<double>::infinity());
        for (int t : cur->kept_ids) {
            const auto& v = cur->tri.tris[t];
            for (int i = 0; i < 3; ++i) {
                int a = v[i], b = v[(i + 1) % 3];
                double len = dist(points[a], points[b]);
                min_edge[a] = std::min(min_edge[a], len);
                min_edge[b] = std::min(min_edge[b], len);
            }
        }

        // Collapse: interior mesh nodes crowded below 0.6*h. Marking skips
        // neighbors of already-marked nodes so one pass never empties a
        // whole edge.
        std::vector<char> remove(points.size(), 0);
        std::vector<char> shielded(points.size(), 0);
        std::vector<std::vector<int>> node_nbrs(points.size());
        for (const auto& [e, info] : edges) {
            if (info.boundary) continue;
            node_nbrs[e.a].push_back(e.b);
            node_nbrs[e.b].push_back(e.a);
        }
        int collapsed = 0;
        for (std::size_t n = 0; n < points.size(); ++n) {
            if (!cur->in_mesh[n] || cur->on_boundary[n] || shielded[n] || inserted_node[n]) continue;
            if (min_edge[n] < kCollapseFactor * h(points[n])) {
                remove[n] = 1;
                ++collapsed;
                for (int nb : node_nbrs[n]) shielded[nb] = 1;
            }
        }

        // Split: long edges get a midpoint node, unless the midpoint would
        // immediately be a collapse candidate against an apex node.
        std::vector<Point2> inserted;
        for (const auto& [e, info] : edges) {
            if (remove[e.a] || remove[e.b]) continue;
            Point2 pa = points[e.a], pb = points[e.b];
            Point2 mid = (pa + pb) * 0.5;
            double hv = h(mid);
            if (dist(pa, pb) <= kSplitFactor * hv) continue;
            // Skip a split that would crowd something uncollapsible: another
            // fresh midpoint or a boundary apex. A crowded interior apex is
            // fine, the collapse pass removes it next round.
            bool crowded = false;
            for (int apex : info.apex) {
                bool uncollapsible = cur->on_boundary[apex] || inserted_node[apex];
                if (uncollapsible && dist(mid, points[apex]) < kCollapseFactor * hv) crowded = true;
            }
            for (const auto& q : inserted)
                if (dist(mid, q) < kCollapseFactor * hv) crowded = true;
            if (!crowded) inserted.push_back(mid);
        }

        if (collapsed == 0 && inserted.empty()) {
            res.iterations = iter;
            break;
        }
        if (iter == kMaxIterations) {
            res.iterations = iter;
            res.stalled = true;
            break;
        }

        std::vector<Point2> next_points;
        std::vector<int> next_origin;
        std::vector<char> next_inserted;
        next_points.reserve(points.size() + inserted.size());
        for (std::size_t n = 0; n < points.size(); ++n) {
            if (remove[n]) continue;
            next_points.push_back(points[n]);
            next_origin.push_back(origin[n]);
            next_inserted.push_back(inserted_node[n]);
        }
        for (const auto& p : inserted) {
            next_points.push_back(p);
            next_origin.push_back(-1);
            next_inserted.push_back(1);
        }
        points = std::move(next_points);
        origin = std::move(next_origin);
        inserted_node = std::move(next_inserted);

        work = alpha_shape_extract(delaunay_triangulate(points), h, params, &walls, wall_tol_factor);
        color_boundary_edges(work, walls, h, wall_tol_factor);
        cur = &work;
    }

    if (cur == &mesh) {
        res.mesh = mesh;  // identity adaptation
    } else {
        res.mesh = std::move(work);
    }
    res.old_of_new = std::move(origin);
    std::vector<char> survived(mesh.tri.points.size(), 0);
    for (std::size_t n = 0; n < res.old_of_new.size(); ++n) {
        if (res.old_of_new[n] >= 0)
            survived[res.old_of_new[n]] = 1;
        else
            res.inserted_nodes.push_back(static_cast<int>(n));
    }
    for (std::size_t n = 0; n < survived.size(); ++n)
        if (!survived[n]) res.removed_nodes.push_back(static_cast<int>(n));
    res.area_after = res.mesh.area;
    return res;
}

AdaptAudit audit_mesh(const DomainMesh& mesh, const SizeField& h) {
    AdaptAudit audit;
    std::set<EdgeKey> bnd;
    for (const auto& e : mesh.boundary) bnd.insert(key(e.a, e.b));
    std::vector<char> near_boundary(mesh.tri.points.size(), 0);
    for (const auto& e : mesh.boundary) {
        near_boundary[e.a] = 1;
        near_boundary[e.b] = 1;
    }
    std::set<EdgeKey> seen;
    for (std::size_t k = 0; k < mesh.kept_ids.size(); ++k) {
        int t = mesh.kept_ids[k];
        const auto& v = mesh.tri.tris[t];
        for (int i = 0; i < 3; ++i) {
            EdgeKey ek = key(v[i], v[(i + 1) % 3]);
            if (bnd.count(ek) || seen.count(ek)) continue;
            seen.insert(ek);
            // one violation layer near the boundary is excused
            if (near_boundary[ek.a] || near_boundary[ek.b]) continue;
            ++audit.interior_edges;
            Point2 pa = mesh.tri.points[ek.a], pb = mesh.tri.points[ek.b];
            double len = dist(pa, pb);
            double hv = h((pa + pb) * 0.5);
            if (len > kSplitFactor * hv) ++audit.long_interior_edges;
            if (len < kCollapseFactor * hv * 0.999) ++audit.short_interior_edges;
        }
        Point2 a = mesh.tri.points[v[0]], b = mesh.tri.points[v[1]], c = mesh.tri.points[v[2]];
        if (triangle_quality(a, b, c) < 0.3 && !mesh.sliver[k]) ++audit.untagged_bad_triangles;
    }
    return audit;
}

}  // namespace gf
