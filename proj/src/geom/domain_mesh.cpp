#include "geom/domain_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/error.hpp"

namespace gf {

namespace {

double safe_circumradius(const Triangulation& tri, int t) {
    Point2 a = tri.points[tri.tris[t][0]];
    Point2 b = tri.points[tri.tris[t][1]];
    Point2 c = tri.points[tri.tris[t][2]];
    double area = triangle_area(a, b, c);
    if (std::fabs(area) < 1e-14) return std::numeric_limits<double>::infinity();
    return dist(b, c) * dist(c, a) * dist(a, b) / (4.0 * std::fabs(area));
}

}  // namespace

int DomainMesh::locate(Vec2 p, int hint) const {
    int t = locate_triangle(tri, p, hint);
    if (t < 0 || !kept[t]) return -1;
    return t;
}

std::vector<WallSegment> DomainMesh::free_surface_segments() const {
    std::vector<WallSegment> segs;
    for (const auto& e : boundary) {
        if (e.color == EdgeColor::FreeSurface) {
            WallSegment s;
            s.a = tri.points[e.a];
            s.b = tri.points[e.b];
            double len = dist(s.a, s.b);
            if (len > 0.0) s.normal = perp(s.b - s.a) / len;  // into the fluid
            segs.push_back(s);
        }
    }
    return segs;
}

double DomainMesh::min_kept_edge_length() const {
    double m = std::numeric_limits<double>::infinity();
    for (int t : kept_ids) {
        const auto& v = tri.tris[t];
        for (int i = 0; i < 3; ++i)
            m = std::min(m, dist(tri.points[v[i]], tri.points[v[(i + 1) % 3]]));
    }
    return m;
}

DomainMesh alpha_shape_extract(Triangulation tri, const SizeField& h, const AlphaShapeParams& params,
                               const WallSet* walls, double wall_tol_factor) {
    DomainMesh mesh;
    mesh.tri = std::move(tri);
    const auto& T = mesh.tri;
    const std::size_t nt = T.tris.size();
    mesh.kept.assign(nt, 0);

    for (std::size_t t = 0; t < nt; ++t) {
        Point2 a = T.points[T.tris[t][0]], b = T.points[T.tris[t][1]], c = T.points[T.tris[t][2]];
        Point2 centroid = (a + b + c) / 3.0;
        double hv = h(centroid);
        if (safe_circumradius(T, static_cast<int>(t)) < params.alpha * hv) mesh.kept[t] = 1;
    }

    if (params.droplet_filter) {
        for (std::size_t t = 0; t < nt; ++t) {
            if (!mesh.kept[t]) continue;
            bool has_kept_neighbor = false;
            for (int nb : T.neighbors[t])
                if (nb >= 0 && mesh.kept[nb]) has_kept_neighbor = true;
            if (has_kept_neighbor) continue;
            bool near_wall = false;
            if (walls && !walls->empty()) {
                for (int v : T.tris[t]) {
                    Point2 p = T.points[v];
                    double tol = wall_tol_factor * h(p);
                    if (walls->query(p, tol)) near_wall = true;
                }
            }
            if (!near_wall) mesh.kept[t] = 0;
        }
    }

    mesh.kept_ids.clear();
    mesh.area = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        if (!mesh.kept[t]) continue;
        mesh.kept_ids.push_back(static_cast<int>(t));
        mesh.area += triangle_area(T.points[T.tris[t][0]], T.points[T.tris[t][1]],
                                   T.points[T.tris[t][2]]);
    }
    if (mesh.kept_ids.empty()) throw Error(ErrorCode::EmptyDomain, "alpha-shape kept no triangle");

    const std::size_t nn = T.points.size();
    mesh.in_mesh.assign(nn, 0);
    mesh.on_boundary.assign(nn, 0);
    mesh.on_wall.assign(nn, 0);
    mesh.wall_normal.assign(nn, Vec2{});
    mesh.wall_normal2.assign(nn, Vec2{});
    mesh.wall_conflict.assign(nn, 0);
    mesh.wall_velocity.assign(nn, Vec2{});
    mesh.curvature.assign(nn, 0.0);
    mesh.sliver.assign(mesh.kept_ids.size(), 0);

    mesh.boundary.clear();
    for (std::size_t k = 0; k < mesh.kept_ids.size(); ++k) {
        int t = mesh.kept_ids[k];
        for (int v : T.tris[t]) mesh.in_mesh[v] = 1;
        for (int i = 0; i < 3; ++i) {
            int nb = T.neighbors[t][i];
            if (nb >= 0 && mesh.kept[nb]) continue;
            BoundaryEdge e;
            e.a = T.tris[t][(i + 1) % 3];
            e.b = T.tris[t][(i + 2) % 3];
            e.tri = static_cast<int>(k);
            mesh.boundary.push_back(e);
            mesh.on_boundary[e.a] = 1;
            mesh.on_boundary[e.b] = 1;
        }
        Point2 a = T.points[T.tris[t][0]], b = T.points[T.tris[t][1]], c = T.points[T.tris[t][2]];
        if (triangle_quality(a, b, c) < 0.3) mesh.sliver[k] = 1;
    }
    return mesh;
}

void color_boundary_edges(DomainMesh& mesh, const WallSet& walls, const SizeField& h,
                          double tol_factor) {
    const auto& T = mesh.tri;
    const std::size_t nn = T.points.size();

    // Node-level wall proximity; tolerance is closed (<= tol counts).
    std::vector<char> node_near(nn, 0);
    for (std::size_t v = 0; v < nn; ++v) {
        if (!mesh.on_boundary[v] && !mesh.in_mesh[v]) continue;
        Point2 p = T.points[v];
        double tol = tol_factor * h(p);
        auto hit = walls.query(p, tol);
        if (!hit) continue;
        node_near[v] = 1;
        mesh.on_wall[v] = 1;
        mesh.wall_normal[v] = hit->normal;
        mesh.wall_velocity[v] = hit->velocity;
        // Corner detection: collect further independent wall normals.
        for (const auto& seg : walls.segments()) {
            Vec2 cp;
            double d2 = closest_point_on_segment(p, seg.a, seg.b, cp);
            if (d2 > tol * tol || std::fabs(cross(seg.normal, hit->normal)) <= 1e-6) continue;
            if (mesh.wall_normal2[v] == Vec2{0.0, 0.0}) {
                mesh.wall_normal2[v] = seg.normal;
            } else if (std::fabs(cross(seg.normal, mesh.wall_normal2[v])) > 1e-6) {
                mesh.wall_conflict[v] = 1;
            }
        }
    }

    for (auto& e : mesh.boundary) {
        e.color = (node_near[e.a] && node_near[e.b]) ? EdgeColor::Wall : EdgeColor::FreeSurface;
    }

    // Free-surface chains: follow directed FS edges (fluid on the left).
    std::map<int, std::vector<int>> out_edges;  // start node -> boundary edge ids
    for (std::size_t i = 0; i < mesh.boundary.size(); ++i) {
        if (mesh.boundary[i].color == EdgeColor::FreeSurface)
            out_edges[mesh.boundary[i].a].push_back(static_cast<int>(i));
    }
    std::vector<char> used(mesh.boundary.size(), 0);
    mesh.free_surface_chains.clear();
    for (std::size_t i = 0; i < mesh.boundary.size(); ++i) {
        if (mesh.boundary[i].color != EdgeColor::FreeSurface || used[i]) continue;
        // Prefer starting at a chain head (no incoming FS edge at node a);
        // loops get picked up wherever the scan finds them.
        std::vector<int> chain{mesh.boundary[i].a, mesh.boundary[i].b};
        used[i] = 1;
        int cur = mesh.boundary[i].b;
        while (true) {
            auto it = out_edges.find(cur);
            int next_edge = -1;
            if (it != out_edges.end()) {
                for (int e : it->second)
                    if (!used[e]) {
                        next_edge = e;
                        break;
                    }
            }
            if (next_edge < 0) break;
            used[next_edge] = 1;
            cur = mesh.boundary[next_edge].b;
            chain.push_back(cur);
            if (cur == chain.front()) break;  // closed loop
        }
        mesh.free_surface_chains.push_back(std::move(chain));
    }

    // Discrete curvature: turn angle over mean adjacent edge length.
    for (const auto& chain : mesh.free_surface_chains) {
        const std::size_t n = chain.size();
        if (n < 3) continue;
        bool closed = chain.front() == chain.back();
        std::size_t lim = closed ? n - 1 : n;
        for (std::size_t k = 0; k < lim; ++k) {
            if (!closed && (k == 0 || k == n - 1)) continue;
            int prev = chain[(k + lim - 1) % lim];
            int node = chain[k];
            int next = chain[(k + 1) % lim];
            if (closed && k == 0) prev = chain[n - 2];
            Vec2 e1 = T.points[node] - T.points[prev];
            Vec2 e2 = T.points[next] - T.points[node];
            double l1 = e1.norm(), l2 = e2.norm();
            if (l1 <= 0.0 || l2 <= 0.0) continue;
            double turn = std::atan2(cross(e1, e2), dot(e1, e2));
            mesh.curvature[node] = turn / (0.5 * (l1 + l2));
        }
    }
}

}  // namespace gf
