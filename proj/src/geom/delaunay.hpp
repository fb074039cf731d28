#pragma once

#include <array>
#include <span>
#include <vector>

#include "core/error.hpp"
#include "geom/vec2.hpp"

namespace gf {

// Delaunay triangulation of the convex hull of a point cloud.
// Triangles are CCW; neighbors[t][i] is the triangle across the edge opposite
// vertex i of t, or -1 on the hull. Cocircular ties are resolved
// deterministically by insertion (node index) order, so the result is
// bit-reproducible for a fixed input sequence.
struct Triangulation {
    std::vector<Point2> points;
    std::vector<std::array<int, 3>> tris;
    std::vector<std::array<int, 3>> neighbors;

    std::size_t node_count() const { return points.size(); }
    std::size_t tri_count() const { return tris.size(); }
};

// Throws AllCollinear if no triangle can be formed, DuplicateCollision if two
// points lie within 1e-12 m of each other (callers merge duplicates first).
Triangulation delaunay_triangulate(std::span<const Point2> pts);

// Walk-based point location on a triangulation. Returns the index of a
// triangle containing p (boundary inclusive) or -1 if p is outside the hull.
// `hint` is a triangle to start from (-1 picks triangle 0).
int locate_triangle(const Triangulation& tri, Point2 p, int hint = -1);

// Signed doubled area of triangle (a,b,c); positive when CCW.
inline double doubled_area(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }
inline double triangle_area(Point2 a, Point2 b, Point2 c) { return 0.5 * doubled_area(a, b, c); }

// Circumradius R = abc / (4A). Throws DegenerateTriangle below the area
// threshold of 1e-14 m^2.
double circumradius(Point2 a, Point2 b, Point2 c);
Point2 circumcenter(Point2 a, Point2 b, Point2 c);

// Radius-ratio quality 2*r_in/R_circ in (0, 1], 1 for equilateral.
double triangle_quality(Point2 a, Point2 b, Point2 c);

// P1 barycentric coordinates of p in (a,b,c).
std::array<double, 3> barycentric(Point2 a, Point2 b, Point2 c, Point2 p);

}  // namespace gf
