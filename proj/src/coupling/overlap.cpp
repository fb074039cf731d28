#include "coupling/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geom/predicates.hpp"

namespace gf {

namespace {

struct Accum {
    double area = 0.0;
    Vec2 moment{};  // area-weighted centroid sum

    void add_triangle(Vec2 c, Vec2 a, Vec2 b) {
        double s = 0.5 * cross(a - c, b - c);
        area += s;
        moment += (c + a + b) * (s / 3.0);
    }
    // signed circular sector of the disc (center c, radius r) from angle t1 to
    // t2, wrapped to (-pi, pi]
    void add_sector(Vec2 c, double r, double t1, double t2) {
        double d = t2 - t1;
        while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
        while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
        double s = 0.5 * r * r * d;
        area += s;
        if (d == 0.0) return;
        double tm = t1 + 0.5 * d;
        double half = 0.5 * std::fabs(d);
        double off = half > 1e-8 ? (2.0 * r * std::sin(half)) / (3.0 * half) : (2.0 / 3.0) * r;
        Vec2 cen = c + Vec2{std::cos(tm), std::sin(tm)} * off;
        moment += cen * s;
    }
};

// parameter of the circle crossing on segment a + t(b-a); roots sorted
int circle_segment_roots(Vec2 c, double r, Vec2 a, Vec2 b, double& t1, double& t2) {
    Vec2 d = b - a, f = a - c;
    double A = dot(d, d);
    double B = 2.0 * dot(f, d);
    double C = dot(f, f) - r * r;
    double disc = B * B - 4.0 * A * C;
    if (disc <= 0.0 || A == 0.0) return 0;
    double sq = std::sqrt(disc);
    double q = B > 0.0 ? -0.5 * (B + sq) : -0.5 * (B - sq);
    t1 = q / A;
    t2 = C / q;
    if (t1 > t2) std::swap(t1, t2);
    return 2;
}

double angle_of(Vec2 c, Vec2 p) { return std::atan2(p.y - c.y, p.x - c.x); }

}  // namespace

void disc_triangle_overlap(Vec2 c, double r, Point2 p0, Point2 p1, Point2 p2, double& area,
                           Vec2& centroid) {
    Accum acc;
    const double r2 = r * r;
    const Point2 v[3] = {p0, p1, p2};
    for (int e = 0; e < 3; ++e) {
        Vec2 a = v[e], b = v[(e + 1) % 3];
        bool a_in = dist2(a, c) <= r2;
        bool b_in = dist2(b, c) <= r2;
        if (a_in && b_in) {
            acc.add_triangle(c, a, b);
            continue;
        }
        double t1, t2;
        int nroots = circle_segment_roots(c, r, a, b, t1, t2);
        if (a_in && !b_in) {
            // exit point: the larger root inside [0,1]
            double t = nroots == 2 ? std::clamp(t2, 0.0, 1.0) : 1.0;
            Vec2 q = a + (b - a) * t;
            Vec2 s = c + (b - c) * (r / dist(b, c));
            acc.add_triangle(c, a, q);
            acc.add_sector(c, r, angle_of(c, q), angle_of(c, s));
        } else if (!a_in && b_in) {
            double t = nroots == 2 ? std::clamp(t1, 0.0, 1.0) : 0.0;
            Vec2 q = a + (b - a) * t;
            Vec2 s = c + (a - c) * (r / dist(a, c));
            acc.add_sector(c, r, angle_of(c, s), angle_of(c, q));
            acc.add_triangle(c, q, b);
        } else {
            Vec2 sa = c + (a - c) * (r / dist(a, c));
            Vec2 sb = c + (b - c) * (r / dist(b, c));
            if (nroots == 2 && t1 > 0.0 && t2 < 1.0 && t1 < t2) {
                Vec2 q1 = a + (b - a) * t1;
                Vec2 q2 = a + (b - a) * t2;
                acc.add_sector(c, r, angle_of(c, sa), angle_of(c, q1));
                acc.add_triangle(c, q1, q2);
                acc.add_sector(c, r, angle_of(c, q2), angle_of(c, sb));
            } else {
                acc.add_sector(c, r, angle_of(c, sa), angle_of(c, sb));
            }
        }
    }
    area = acc.area;
    centroid = acc.area != 0.0 ? acc.moment / acc.area : c;
}

OverlapDecomposition disc_element_overlap(const Grain& grain, const DomainMesh& mesh, int hint) {
    OverlapDecomposition out;
    out.grain = grain.id;
    const auto& T = mesh.tri;
    int start = locate_triangle(T, grain.X, hint);
    if (start < 0) {
        // Center outside the cloud. A grain straddling the free surface must
        // still contribute its submerged rim, or each splash-in/out becomes
        // an impulsive volume source; seed the walk from the hint if that
        // still touches the disc.
        if (hint >= 0 && hint < static_cast<int>(T.tris.size())) {
            Point2 a = T.points[T.tris[hint][0]], b = T.points[T.tris[hint][1]],
                   p = T.points[T.tris[hint][2]];
            Vec2 cp;
            double r2h = grain.radius * grain.radius;
            bool touches = closest_point_on_segment(grain.X, a, b, cp) <= r2h ||
                           closest_point_on_segment(grain.X, b, p, cp) <= r2h ||
                           closest_point_on_segment(grain.X, p, a, cp) <= r2h ||
                           (orient2d(a, b, grain.X) >= 0 && orient2d(b, p, grain.X) >= 0 &&
                            orient2d(p, a, grain.X) >= 0);
            if (touches) start = hint;
        }
        if (start < 0) return out;  // genuinely dry
    }

    const double r = grain.radius;
    const double r2 = r * r;
    auto intersects = [&](int t) {
        Point2 a = T.points[T.tris[t][0]], b = T.points[T.tris[t][1]], p = T.points[T.tris[t][2]];
        if (orient2d(a, b, grain.X) >= 0 && orient2d(b, p, grain.X) >= 0 &&
            orient2d(p, a, grain.X) >= 0)
            return true;
        Vec2 cp;
        return closest_point_on_segment(grain.X, a, b, cp) <= r2 ||
               closest_point_on_segment(grain.X, b, p, cp) <= r2 ||
               closest_point_on_segment(grain.X, p, a, cp) <= r2;
    };

    // A disc only touches a handful of triangles; a linear-scan visited list
    // beats clearing a mesh-sized mark array for every grain.
    std::vector<int> stack{start};
    std::vector<int> visited{start};
    auto seen = [&](int t) { return std::find(visited.begin(), visited.end(), t) != visited.end(); };
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        if (mesh.kept[t]) {
            double area;
            Vec2 cen;
            disc_triangle_overlap(grain.X, r, T.points[T.tris[t][0]], T.points[T.tris[t][1]],
                                  T.points[T.tris[t][2]], area, cen);
            if (area > 0.0) {
                out.parts.push_back({t, area, cen});
                out.total_area += area;
            }
        }
        for (int nb : T.neighbors[t]) {
            if (nb < 0 || seen(nb)) continue;
            if (intersects(nb)) {
                visited.push_back(nb);
                stack.push_back(nb);
            }
        }
    }
    std::sort(out.parts.begin(), out.parts.end(),
              [](const SubOverlap& a, const SubOverlap& b) { return a.tri < b.tri; });
    double full = grain.area();
    out.partial = out.total_area < full * (1.0 - 1e-9);
    return out;
}

}  // namespace gf
