#pragma once

#include <vector>

#include "geom/domain_mesh.hpp"

namespace gf {

struct AdaptResult {
    DomainMesh mesh;
    // For every node of the adapted mesh: index into the pre-adapt node array,
    // or -1 for nodes inserted by edge splits.
    std::vector<int> old_of_new;
    std::vector<int> removed_nodes;   // pre-adapt indices that were collapsed
    std::vector<int> inserted_nodes;  // post-adapt indices of new nodes
    int iterations = 0;
    bool stalled = false;  // node count still changing after the iteration cap
    double area_before = 0.0;
    double area_after = 0.0;
};

// Size-field driven adaptation: interior edges longer than 1.4*h are split at
// their midpoint, interior nodes whose shortest incident edge is below 0.6*h
// are removed, and the point set is re-triangulated, re-filtered and
// re-colored after every pass. Boundary node positions are never touched.
AdaptResult adapt_mesh(const DomainMesh& mesh, const SizeField& h, const AlphaShapeParams& params,
                       const WallSet& walls, double wall_tol_factor = 0.25);

// Post-condition audit used by callers and tests: fraction of interior edges
// outside [0.6h, 1.4h] (one violation layer near the boundary excused) and
// the number of untagged low-quality triangles.
struct AdaptAudit {
    int long_interior_edges = 0;
    int short_interior_edges = 0;
    int untagged_bad_triangles = 0;
    int interior_edges = 0;
};
AdaptAudit audit_mesh(const DomainMesh& mesh, const SizeField& h);

}  // namespace gf
