#pragma once

#include <array>
#include <vector>

#include "geom/delaunay.hpp"
#include "geom/size_field.hpp"
#include "geom/walls.hpp"

namespace gf {

enum class EdgeColor { Wall, FreeSurface };

struct BoundaryEdge {
    int a, b;       // directed: fluid on the left of a->b
    int tri;        // owning kept triangle (index into kept_ids)
    EdgeColor color = EdgeColor::FreeSurface;
};

struct AlphaShapeParams {
    double alpha = 1.25;
    bool droplet_filter = true;
};

// The fluid domain for one time step: the alpha-complex of the Delaunay
// triangulation, its colored boundary, and per-node boundary metadata.
// Triangle/node indices refer to the full triangulation stored inside.
struct DomainMesh {
    Triangulation tri;
    std::vector<char> kept;       // per full triangle
    std::vector<int> kept_ids;    // kept triangle indices, ascending
    std::vector<BoundaryEdge> boundary;
    std::vector<std::vector<int>> free_surface_chains;  // ordered node ids

    // per node
    std::vector<char> in_mesh;        // member of >= 1 kept triangle
    std::vector<char> on_boundary;
    std::vector<char> on_wall;        // within coloring tolerance of a wall
    std::vector<Vec2> wall_normal;    // primary wall normal (on_wall nodes)
    std::vector<Vec2> wall_normal2;   // second independent normal at corners ({0,0} if none)
    std::vector<char> wall_conflict;  // more than two independent wall normals
    std::vector<Vec2> wall_velocity;
    std::vector<double> curvature;    // free-surface curvature (angle deficit)
    std::vector<char> sliver;         // per kept triangle: low-quality boundary sliver

    double area = 0.0;

    std::size_t node_count() const { return tri.points.size(); }
    Point2 point(int i) const { return tri.points[i]; }

    // Kept triangle containing p, or -1 (walks the full triangulation).
    int locate(Vec2 p, int hint = -1) const;

    std::vector<WallSegment> free_surface_segments() const;
    double min_kept_edge_length() const;
};

// Keeps triangles with circumradius < alpha * h(centroid); the boundary is
// the set of edges with exactly one kept incident triangle. Isolated kept
// triangles away from walls are dropped when the droplet filter is on.
// Throws EmptyDomain when nothing passes the criterion.
DomainMesh alpha_shape_extract(Triangulation tri, const SizeField& h, const AlphaShapeParams& params,
                               const WallSet* walls = nullptr, double wall_tol_factor = 0.25);

// Colors each boundary edge Wall when both endpoints lie within
// tol = tol_factor * h(node) of a wall segment, FreeSurface otherwise, and
// caches node wall normals/velocities and free-surface chains + curvature.
void color_boundary_edges(DomainMesh& mesh, const WallSet& walls, const SizeField& h,
                          double tol_factor = 0.25);

}  // namespace gf
