#include "geom/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "geom/predicates.hpp"

namespace gf {

namespace {

constexpr int kGhost = -1;
constexpr double kMergeTol = 1e-12;

// Incremental Bowyer-Watson with ghost triangles covering the exterior.
// Ghost triangles are stored canonically as (a, b, kGhost); their directed
// hull edge a->b has the exterior on its left.
class Builder {
public:
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> nbr;  // across edge opposite v[i]
        bool alive = true;
    };

    explicit Builder(std::span<const Point2> pts) : pts_(pts) {}

    void run() {
        const std::size_t n = pts_.size();
        if (n < 3) throw Error(ErrorCode::AllCollinear, "need at least 3 points");
        check_duplicates();

        // Seed triangle: points 0, 1 and the first non-collinear point.
        std::size_t k = 2;
        double orient = 0.0;
        for (; k < n; ++k) {
            orient = orient2d(pts_[0], pts_[1], pts_[k]);
            if (orient != 0.0) break;
        }
        if (k == n) throw Error(ErrorCode::AllCollinear, "all input points are collinear");
        seed(0, 1, static_cast<int>(k), orient > 0.0);

        for (std::size_t i = 2; i < n; ++i) {
            if (i == k) continue;
            insert(static_cast<int>(i));
        }
    }

    Triangulation output() const {
        Triangulation out;
        out.points.assign(pts_.begin(), pts_.end());
        std::vector<int> remap(tris_.size(), -1);
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (tris_[t].alive && !is_ghost(static_cast<int>(t))) {
                remap[t] = static_cast<int>(out.tris.size());
                out.tris.push_back(tris_[t].v);
            }
        }
        out.neighbors.resize(out.tris.size());
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (remap[t] < 0) continue;
            for (int i = 0; i < 3; ++i) {
                int nb = tris_[t].nbr[i];
                out.neighbors[remap[t]][i] = (nb >= 0 && remap[nb] >= 0) ? remap[nb] : -1;
            }
        }
        return out;
    }

private:
    std::span<const Point2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> free_;
    int last_ = 0;
    // scratch (epoch-stamped marks avoid an O(n) clear per insertion)
    std::vector<int> cavity_, stack_;
    std::vector<int> mark_;
    int epoch_ = 0;

    bool is_ghost(int t) const { return tris_[t].v[2] == kGhost; }

    void check_duplicates() const {
        // Hash grid at the merge tolerance; exact pass, no false negatives.
        struct CellHash {
            std::size_t operator()(const std::pair<long long, long long>& c) const {
                return std::hash<long long>()(c.first * 73856093LL ^ c.second * 19349663LL);
            }
        };
        std::unordered_map<std::pair<long long, long long>, std::vector<int>, CellHash> grid;
        const double cell = 4.0 * kMergeTol;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            auto cx = static_cast<long long>(std::floor(pts_[i].x / cell));
            auto cy = static_cast<long long>(std::floor(pts_[i].y / cell));
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy) {
                    auto it = grid.find({cx + dx, cy + dy});
                    if (it == grid.end()) continue;
                    for (int j : it->second) {
                        if (dist(pts_[i], pts_[j]) < kMergeTol)
                            throw Error(ErrorCode::DuplicateCollision,
                                        "points " + std::to_string(j) + " and " + std::to_string(i) +
                                            " closer than merge tolerance");
                    }
                }
            grid[{cx, cy}].push_back(static_cast<int>(i));
        }
    }

    int alloc() {
        if (!free_.empty()) {
            int t = free_.back();
            free_.pop_back();
            tris_[t].alive = true;
            return t;
        }
        tris_.push_back({});
        tris_.back().alive = true;
        return static_cast<int>(tris_.size()) - 1;
    }

    void seed(int a, int b, int c, bool ccw) {
        if (!ccw) std::swap(b, c);
        int t = alloc();
        tris_[t].v = {a, b, c};
        int gab = alloc(), gbc = alloc(), gca = alloc();
        tris_[gab].v = {b, a, kGhost};
        tris_[gbc].v = {c, b, kGhost};
        tris_[gca].v = {a, c, kGhost};
        tris_[t].nbr = {gbc, gca, gab};
        // ghost (x,y,G): nbr[0] across (y,G), nbr[1] across (x..G), nbr[2] finite
        tris_[gab].nbr = {gca, gbc, t};
        tris_[gbc].nbr = {gab, gca, t};
        tris_[gca].nbr = {gbc, gab, t};
        last_ = t;
    }

    // True if p belongs to the Bowyer-Watson cavity of triangle t.
    bool in_cavity(int t, Point2 p) const {
        const auto& v = tris_[t].v;
        if (!is_ghost(t)) return incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0.0;
        Point2 a = pts_[v[0]], b = pts_[v[1]];
        double o = orient2d(a, b, p);
        if (o > 0.0) return true;
        if (o < 0.0) return false;
        // Collinear with the hull edge: inside only if strictly on the open segment.
        if (std::fabs(b.x - a.x) >= std::fabs(b.y - a.y)) {
            return (a.x < p.x) != (b.x < p.x) && p.x != a.x && p.x != b.x;
        }
        return (a.y < p.y) != (b.y < p.y) && p.y != a.y && p.y != b.y;
    }

    int walk(Point2 p, int start) {
        int cur = start, prev = -1;
        std::size_t guard = 4 * tris_.size() + 16;
        while (guard-- > 0) {
            if (is_ghost(cur)) {
                Point2 a = pts_[tris_[cur].v[0]], b = pts_[tris_[cur].v[1]];
                double o = orient2d(a, b, p);
                if (o > 0.0) return cur;
                if (o == 0.0) {
                    if (in_cavity(cur, p)) return cur;
                    // Collinear beyond the edge: step around the hull toward p.
                    int next = dist2(p, b) < dist2(p, a) ? tris_[cur].nbr[0] : tris_[cur].nbr[1];
                    prev = cur;
                    cur = next;
                    continue;
                }
                prev = cur;
                cur = tris_[cur].nbr[2];
                continue;
            }
            const auto& v = tris_[cur].v;
            int next = -1;
            for (int i = 0; i < 3; ++i) {
                int nb = tris_[cur].nbr[i];
                if (nb == prev) continue;
                if (orient2d(pts_[v[(i + 1) % 3]], pts_[v[(i + 2) % 3]], p) < 0.0) {
                    next = nb;
                    break;
                }
            }
            if (next < 0) return cur;
            prev = cur;
            cur = next;
        }
        // Pathological hint; fall back to an exhaustive scan.
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (tris_[t].alive && in_cavity(static_cast<int>(t), p)) return static_cast<int>(t);
        }
        throw Error(ErrorCode::Internal, "point location failed");
    }

    void insert(int pi) {
        Point2 p = pts_[pi];
        int seed_tri = walk(p, last_);
        if (!in_cavity(seed_tri, p)) {
            // Can happen when the walk stops on a ghost whose edge is collinear
            // with p; one of its hull neighbors must contain p in its wedge.
            int found = -1;
            for (int nb : tris_[seed_tri].nbr) {
                if (nb >= 0 && tris_[nb].alive && in_cavity(nb, p)) {
                    found = nb;
                    break;
                }
            }
            if (found < 0) throw Error(ErrorCode::Internal, "cavity seed failed");
            seed_tri = found;
        }

        cavity_.clear();
        stack_.clear();
        ++epoch_;
        mark_.resize(tris_.size() + 8, 0);
        stack_.push_back(seed_tri);
        mark_[seed_tri] = epoch_;
        while (!stack_.empty()) {
            int t = stack_.back();
            stack_.pop_back();
            cavity_.push_back(t);
            for (int nb : tris_[t].nbr) {
                if (nb < 0 || mark_[nb] == epoch_ || !tris_[nb].alive) continue;
                if (in_cavity(nb, p)) {
                    mark_[nb] = epoch_;
                    stack_.push_back(nb);
                }
            }
        }

        // Collect directed boundary edges (u, w) with the outside neighbor.
        struct BEdge {
            int u, w, outside;
        };
        std::vector<BEdge> boundary;
        for (int t : cavity_) {
            for (int i = 0; i < 3; ++i) {
                int nb = tris_[t].nbr[i];
                if (nb >= 0 && mark_[nb] == epoch_) continue;
                boundary.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], nb});
            }
        }
        for (int t : cavity_) {
            tris_[t].alive = false;
            free_.push_back(t);
        }

        // One new triangle (u, w, p) per boundary edge, ghosts canonicalized.
        std::unordered_map<int, int> by_u, by_w;  // first/second vertex -> new tri
        std::vector<int> created;
        created.reserve(boundary.size());
        for (const auto& be : boundary) {
            int t = alloc();
            if (be.u == kGhost) {
                tris_[t].v = {be.w, pi, kGhost};
            } else if (be.w == kGhost) {
                tris_[t].v = {pi, be.u, kGhost};
            } else {
                tris_[t].v = {be.u, be.w, pi};
            }
            // Link across the boundary edge.
            if (be.outside >= 0) {
                for (int j = 0; j < 3; ++j) {
                    int a = tris_[be.outside].v[(j + 1) % 3];
                    int b = tris_[be.outside].v[(j + 2) % 3];
                    if (a == be.w && b == be.u) {
                        tris_[be.outside].nbr[j] = t;
                        break;
                    }
                }
            }
            // Neighbor slot across (u,w): the slot opposite p.
            int slot_uw = slot_of(t, be.u, be.w);
            tris_[t].nbr = {-1, -1, -1};
            tris_[t].nbr[slot_uw] = be.outside;
            by_u[be.u] = t;
            by_w[be.w] = t;
            created.push_back(t);
        }
        // Link new triangles around p: triangle with edge (w,p) matches the
        // one whose first boundary vertex is w.
        for (std::size_t idx = 0; idx < created.size(); ++idx) {
            int t = created[idx];
            const auto& be = boundary[idx];
            int right = by_u.at(be.w);  // shares edge (w, p)
            int left = by_w.at(be.u);   // shares edge (p, u)
            set_nbr_across(t, be.w, pi, right);
            set_nbr_across(t, pi, be.u, left);
        }
        last_ = created.front();
    }

    int slot_of(int t, int a, int b) const {
        for (int i = 0; i < 3; ++i) {
            int u = tris_[t].v[(i + 1) % 3], w = tris_[t].v[(i + 2) % 3];
            if (u == a && w == b) return i;
        }
        throw Error(ErrorCode::Internal, "edge slot not found");
    }

    void set_nbr_across(int t, int a, int b, int nb) { tris_[t].nbr[slot_of(t, a, b)] = nb; }
};

}  // namespace

Triangulation delaunay_triangulate(std::span<const Point2> pts) {
    for (const auto& p : pts) {
        if (!p.finite()) throw Error(ErrorCode::ConfigInvalid, "non-finite point coordinates");
    }
    Builder b(pts);
    b.run();
    return b.output();
}

int locate_triangle(const Triangulation& tri, Point2 p, int hint) {
    if (tri.tris.empty()) return -1;
    int cur = (hint >= 0 && hint < static_cast<int>(tri.tris.size())) ? hint : 0;
    int prev = -1;
    std::size_t guard = 2 * tri.tris.size() + 16;
    while (guard-- > 0) {
        const auto& v = tri.tris[cur];
        int next = -1;
        bool outside = false;
        for (int i = 0; i < 3; ++i) {
            int nb = tri.neighbors[cur][i];
            if (nb == prev && prev != -1) continue;
            if (orient2d(tri.points[v[(i + 1) % 3]], tri.points[v[(i + 2) % 3]], p) < 0.0) {
                if (nb < 0) {
                    outside = true;
                    continue;
                }
                next = nb;
                break;
            }
        }
        if (next < 0) return outside ? -1 : cur;
        prev = cur;
        cur = next;
    }
    // Hint led to a cycle (can only happen with a stale hint); scan.
    for (std::size_t t = 0; t < tri.tris.size(); ++t) {
        const auto& v = tri.tris[t];
        if (orient2d(tri.points[v[0]], tri.points[v[1]], p) >= 0.0 &&
            orient2d(tri.points[v[1]], tri.points[v[2]], p) >= 0.0 &&
            orient2d(tri.points[v[2]], tri.points[v[0]], p) >= 0.0)
            return static_cast<int>(t);
    }
    return -1;
}

double circumradius(Point2 a, Point2 b, Point2 c) {
    double area = triangle_area(a, b, c);
    if (std::fabs(area) < 1e-14)
        throw Error(ErrorCode::DegenerateTriangle, "triangle area below degeneracy threshold");
    double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
    return la * lb * lc / (4.0 * std::fabs(area));
}

Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
    Vec2 ab = b - a, ac = c - a;
    double d = 2.0 * cross(ab, ac);
    if (std::fabs(d) < 1e-28)
        throw Error(ErrorCode::DegenerateTriangle, "circumcenter of a degenerate triangle");
    double ab2 = ab.norm2(), ac2 = ac.norm2();
    double ux = (ac.y * ab2 - ab.y * ac2) / d;
    double uy = (ab.x * ac2 - ac.x * ab2) / d;
    return {a.x + ux, a.y + uy};
}

double triangle_quality(Point2 a, Point2 b, Point2 c) {
    double area = std::fabs(triangle_area(a, b, c));
    double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
    double s = 0.5 * (la + lb + lc);
    if (s <= 0.0 || area <= 0.0) return 0.0;
    double r_in = area / s;
    double r_circ = la * lb * lc / (4.0 * area);
    return 2.0 * r_in / r_circ;
}

std::array<double, 3> barycentric(Point2 a, Point2 b, Point2 c, Point2 p) {
    double d = doubled_area(a, b, c);
    double wa = doubled_area(p, b, c) / d;
    double wb = doubled_area(a, p, c) / d;
    double wc = 1.0 - wa - wb;
    return {wa, wb, wc};
}

}  // namespace gf
