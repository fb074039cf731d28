#pragma once

#include <vector>

#include "dem/grain.hpp"
#include "geom/domain_mesh.hpp"

namespace gf {

struct SubOverlap {
    int tri;         // full-triangulation triangle id (always a kept triangle)
    double area;     // overlap area [m^2]
    Vec2 centroid;   // centroid of the intersection region
};

struct OverlapDecomposition {
    int grain = -1;
    std::vector<SubOverlap> parts;
    double total_area = 0.0;
    bool partial = false;  // disc clipped by the domain boundary
    bool empty() const { return parts.empty(); }
};

// Exact area and centroid of the intersection of a disc with a triangle,
// via a signed fan over the triangle edges: each edge contributes the
// disc-clipped triangle (center, a, b), which decomposes into plain triangles
// and circular sectors. Linear integrands are integrated exactly this way.
void disc_triangle_overlap(Vec2 center, double radius, Point2 p0, Point2 p1, Point2 p2,
                           double& area, Vec2& centroid);

// Decomposes the grain's disc over the kept elements reachable from its
// containing element. A grain whose center lies outside the triangulated
// domain yields an empty decomposition; a disc that sticks out of the kept
// region is clipped and flagged partial.
OverlapDecomposition disc_element_overlap(const Grain& grain, const DomainMesh& mesh,
                                          int hint = -1);

}  // namespace gf
