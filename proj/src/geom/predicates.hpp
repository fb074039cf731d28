#pragma once

#include "geom/vec2.hpp"

namespace gf {

// Exact-sign geometric predicates. A floating-point filter handles the vast
// majority of calls; near-degenerate inputs fall back to expansion arithmetic
// so the sign is always correct (Shewchuk-style).

// > 0 if a,b,c counter-clockwise, < 0 clockwise, 0 collinear.
double orient2d(Vec2 a, Vec2 b, Vec2 c);

// > 0 if d strictly inside the circumcircle of CCW triangle (a,b,c),
// < 0 outside, 0 cocircular.
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

}  // namespace gf
