#include "advection/advection.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

void advect_fluid(std::vector<Point2>& positions, std::span<const Vec2> u_np1,
                  std::span<const Vec2> u_n, double dt) {
    for (std::size_t i = 0; i < positions.size(); ++i) {
        positions[i] += u_np1[i] * dt + (u_np1[i] - u_n[i]) * dt;
    }
}

namespace {

// parametric intersection of the displacement p0->p1 with segment a->b
bool segments_cross(Vec2 p0, Vec2 p1, Vec2 a, Vec2 b, double& t) {
    Vec2 d = p1 - p0, e = b - a;
    double den = cross(d, e);
    if (den == 0.0) return false;
    Vec2 f = a - p0;
    t = cross(f, e) / den;
    double s = cross(f, d) / den;
    return t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0;
}

}  // namespace

AdvectionReport project_wall_crossers(std::vector<Point2>& positions, std::vector<Vec2>& velocity,
                                      std::span<const Point2> previous, const WallSet& walls,
                                      double on_wall_tol) {
    AdvectionReport rep;
    if (walls.empty()) return rep;
    std::vector<int> cands;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        Vec2 p0 = previous[i], p1 = positions[i];
        walls.candidates_along(p0, p1, on_wall_tol, cands);
        if (cands.empty()) continue;
        std::sort(cands.begin(), cands.end());

        // walls are two-sided (the gate holds grains on one side and water on
        // the other), so only a genuine side change counts as a crossing
        int hit_seg = -1;
        double hit_t = 2.0;
        for (int s : cands) {
            const WallSegment& seg = walls.segments()[s];
            Vec2 cp0, cp1;
            closest_point_on_segment(p0, seg.a, seg.b, cp0);
            closest_point_on_segment(p1, seg.a, seg.b, cp1);
            double s0 = dot(p0 - cp0, seg.normal);
            double s1 = dot(p1 - cp1, seg.normal);
            double t;
            if (s0 * s1 < 0.0 && segments_cross(p0, p1, seg.a, seg.b, t) && t < hit_t) {
                hit_t = t;
                hit_seg = s;
                continue;
            }
            // a particle that was sitting on the wall may only slide along it
            double tiny = 1e-12 * (1.0 + p0.norm());
            if (std::fabs(s0) <= tiny && std::fabs(s1) > tiny && std::fabs(s1) <= on_wall_tol &&
                hit_seg < 0) {
                hit_seg = s;
                hit_t = 0.0;
            }
        }
        if (hit_seg < 0) continue;
        const WallSegment& seg = walls.segments()[hit_seg];
        Vec2 cp;
        closest_point_on_segment(p1, seg.a, seg.b, cp);
        double depth = dist(p1, cp);
        rep.max_penetration = std::max(rep.max_penetration, depth);
        ++rep.projected;
        positions[i] = cp;
        Vec2 rel = velocity[i] - seg.velocity;
        velocity[i] = seg.velocity + rel - seg.normal * dot(rel, seg.normal);
    }
    return rep;
}

TransferResult transfer_solution(const DomainMesh& old_mesh, std::span<const Vec2> u_old,
                                 std::span<const double> p_old,
                                 std::span<const Point2> new_points,
                                 std::span<const int> old_of_new) {
    TransferResult out;
    out.u.resize(new_points.size());
    out.p.resize(new_points.size());
    const auto& T = old_mesh.tri;
    int hint = old_mesh.kept_ids.empty() ? -1 : old_mesh.kept_ids.front();
    for (std::size_t n = 0; n < new_points.size(); ++n) {
        int old_id = old_of_new[n];
        if (old_id >= 0) {
            out.u[n] = u_old[old_id];
            out.p[n] = p_old[old_id];
            continue;
        }
        int t = locate_triangle(T, new_points[n], hint);
        if (t < 0) {
            // outside the old hull: nearest old node value, flagged
            ++out.extrapolated;
            double best = std::numeric_limits<double>::infinity();
            int bi = 0;
            for (std::size_t k = 0; k < T.points.size(); ++k) {
                double d2 = dist2(T.points[k], new_points[n]);
                if (d2 < best) {
                    best = d2;
                    bi = static_cast<int>(k);
                }
            }
            out.u[n] = u_old[bi];
            out.p[n] = p_old[bi];
            continue;
        }
        hint = t;
        auto bc = barycentric(T.points[T.tris[t][0]], T.points[T.tris[t][1]],
                              T.points[T.tris[t][2]], new_points[n]);
        Vec2 u{};
        double p = 0.0;
        for (int m = 0; m < 3; ++m) {
            u += u_old[T.tris[t][m]] * bc[m];
            p += p_old[T.tris[t][m]] * bc[m];
        }
        out.u[n] = u;
        out.p[n] = p;
    }
    return out;
}

}  // namespace gf
