#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "fem/vans.hpp"
#include "geom/predicates.hpp"
#include "test_rng.hpp"

using namespace gf;

namespace {

constexpr double kG = 9.81;

struct Scene {
    DomainMesh mesh;
    WallSet walls;
    FemSpace space;
};

Scene water_box(double w, double depth, double h) {
    std::vector<WallSegment> segs;
    segs.push_back({{0, 0}, {w, 0}, {0, 0}, {}});
    segs.push_back({{0, 2 * depth}, {0, 0}, {0, 0}, {}});
    segs.push_back({{w, 0}, {w, 2 * depth}, {0, 0}, {}});
    WallSet walls(segs, h);
    std::vector<Point2> pts;
    int nx = static_cast<int>(std::round(w / h));
    int ny = static_cast<int>(std::round(depth / h));
    for (int j = 0; j <= ny; ++j) {
        double off = (j % 2 == 1) ? 0.5 * w / nx : 0.0;  // staggered rows avoid sliver diagonals
        for (int i = 0; i <= nx; ++i) {
            double x = std::clamp(i * w / nx + off, 0.0, w);
            pts.push_back({x, j * depth / ny});
        }
        if (off > 0.0) pts.push_back({0.0, pts.back().y});
    }
    SizeField hf = SizeField::uniform_field(h);
    Scene sc{alpha_shape_extract(delaunay_triangulate(pts), hf, {1.45, true}, &walls),
             std::move(walls), {}};
    color_boundary_edges(sc.mesh, sc.walls, hf);
    sc.space = build_fem_space(sc.mesh);
    return sc;
}

CouplingState no_grains(const FemSpace& space) {
    CouplingState st;
    st.eps.assign(space.n_nodes(), 1.0);
    st.w_terms.assign(space.n_nodes(), {});
    return st;
}

// 7-point degree-5 triangle quadrature
template <typename F>
double quad_tri(Point2 a, Point2 b, Point2 c, F&& f) {
    static const double w[7] = {0.225,
                                0.1323941527885062, 0.1323941527885062, 0.1323941527885062,
                                0.1259391805448271, 0.1259391805448271, 0.1259391805448271};
    static const double l1[7] = {1.0 / 3, 0.0597158717897698, 0.4701420641051151,
                                 0.4701420641051151, 0.7974269853530873, 0.1012865073234563,
                                 0.1012865073234563};
    static const double l2[7] = {1.0 / 3, 0.4701420641051151, 0.0597158717897698,
                                 0.4701420641051151, 0.1012865073234563, 0.7974269853530873,
                                 0.1012865073234563};
    double area = std::fabs(triangle_area(a, b, c));
    double s = 0.0;
    for (int q = 0; q < 7; ++q) {
        double la = l1[q], lb = l2[q], lc = 1.0 - la - lb;
        Point2 p = a * la + b * lb + c * lc;
        s += w[q] * f(p, la, lb, lc);
    }
    return s * area;
}

}  // namespace

TEST_CASE("linear system: identity and dirichlet handling") {
    LinearSystem sys(3);
    sys.add(0, 0, 1.0);
    sys.add(1, 1, 2.0);
    sys.add(2, 2, 4.0);
    sys.add_rhs(0, 3.0);
    sys.add_rhs(1, 4.0);
    sys.add_rhs(2, 8.0);
    sys.set_dirichlet(1, 7.0);
    sys.finalize();
    auto x = sys.solve();
    CHECK(x[0] == doctest::Approx(3.0));
    CHECK(x[1] == doctest::Approx(7.0));
    CHECK(x[2] == doctest::Approx(2.0));
}

TEST_CASE("linear system: random diagonally-dominant system meets the residual") {
    TestRng rng(3);
    int n = 200;
    LinearSystem sys(n);
    for (int i = 0; i < n; ++i) {
        double diag = 10.0 + rng.uniform();
        sys.add(i, i, diag);
        for (int k = 0; k < 4; ++k) {
            int j = static_cast<int>(rng.uniform() * n);
            if (j != i) sys.add(i, j, rng.uniform(-1.0, 1.0));
        }
        sys.add_rhs(i, rng.uniform(-5.0, 5.0));
    }
    sys.finalize();
    auto x = sys.solve();
    CHECK(sys.residual_norm(x) < 1e-10);
}

TEST_CASE("rotation transform preserves the solution in rotated coordinates") {
    // 2x2 block system solved directly vs after a rotate+dirichlet on v_n
    Vec2 nrm = normalized({0.6, 0.8});
    LinearSystem sys(2);
    sys.add(0, 0, 4.0);
    sys.add(0, 1, 1.0);
    sys.add(1, 0, 1.0);
    sys.add(1, 1, 3.0);
    sys.add_rhs(0, 1.0);
    sys.add_rhs(1, 2.0);
    sys.rotate_pairs({{0, nrm}});
    sys.set_dirichlet(0, 0.0);  // u.n = 0
    sys.finalize();
    auto x = sys.solve();
    // solve() hands back physical coordinates
    Vec2 tng = perp(nrm);
    Vec2 u{x[0], x[1]};
    CHECK(dot(u, nrm) == doctest::Approx(0.0).epsilon(1e-14));
    // tangential equation: t^T (A u - b) = 0
    Vec2 Au{4.0 * u.x + 1.0 * u.y, 1.0 * u.x + 3.0 * u.y};
    CHECK(dot(Au - Vec2{1.0, 2.0}, tng) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("assembled element integrals match the quadrature oracle") {
    // single triangle, manufactured linear fields, random nodal eps
    std::vector<Point2> pts{{0.1, 0.05}, {1.05, 0.22}, {0.4, 0.9}};
    auto mesh = alpha_shape_extract(delaunay_triangulate(pts), SizeField::uniform_field(2.0),
                                    {5.0, false});
    auto space = build_fem_space(mesh);
    REQUIRE(space.elems.size() == 1);

    FluidMaterial mat;
    mat.density = 850.0;
    mat.viscosity = 0.13;
    mat.gravity = {0.4, -9.81};
    double dt = 0.01;

    TestRng rng(8);
    CouplingState cpl = no_grains(space);
    for (auto& e : cpl.eps) e = rng.uniform(0.3, 1.0);

    FluidField un;
    auto lin_u = [](Point2 p) { return Vec2{0.3 + 1.2 * p.x - 0.7 * p.y, -0.25 + 0.5 * p.x + 0.9 * p.y}; };
    auto lin_p = [](Point2 p) { return 12.0 - 300.0 * p.x + 120.0 * p.y; };
    for (int cn = 0; cn < space.n_nodes(); ++cn) {
        un.u.push_back(lin_u(space.mesh->point(space.nodes[cn])));
        un.p.push_back(lin_p(space.mesh->point(space.nodes[cn])));
    }
    // solve-field x: another linear field
    auto lin_u1 = [](Point2 p) { return Vec2{-0.1 + 0.4 * p.x + 0.3 * p.y, 0.2 - 0.6 * p.x + 0.1 * p.y}; };
    std::vector<double> x(space.n_dof());
    for (int cn = 0; cn < space.n_nodes(); ++cn) {
        Vec2 u1 = lin_u1(space.mesh->point(space.nodes[cn]));
        x[space.udof(cn, 0)] = u1.x;
        x[space.udof(cn, 1)] = u1.y;
        x[space.pdof(cn)] = lin_p(space.mesh->point(space.nodes[cn]));
    }

    auto sys = assemble_vans(space, un, cpl, mat, dt);
    // Quadrature oracle per row
    Point2 A = space.mesh->point(space.nodes[space.elems[0].n[0]]);
    Point2 B = space.mesh->point(space.nodes[space.elems[0].n[1]]);
    Point2 C = space.mesh->point(space.nodes[space.elems[0].n[2]]);
    auto eps_at = [&](double la, double lb, double lc) {
        return cpl.eps[space.elems[0].n[0]] * la + cpl.eps[space.elems[0].n[1]] * lb +
               cpl.eps[space.elems[0].n[2]] * lc;
    };
    const auto& el = space.elems[0];
    double eps_bar = (cpl.eps[el.n[0]] + cpl.eps[el.n[1]] + cpl.eps[el.n[2]]) / 3.0;

    // constant gradients of the manufactured fields
    const double du1[2][2] = {{0.4, 0.3}, {-0.6, 0.1}};  // grad of lin_u1
    const Vec2 gradp{-300.0, 120.0};

    for (int a = 0; a < 3; ++a) {
        for (int k = 0; k < 2; ++k) {
            double oracle = quad_tri(A, B, C, [&](Point2 p, double la, double lb, double lc) {
                double phi_a = a == 0 ? la : (a == 1 ? lb : lc);
                double eps = eps_at(la, lb, lc);
                Vec2 u1 = lin_u1(p), u0 = lin_u(p);
                // lumped mass uses nodal u, not interpolated: handled below
                (void)u1;
                (void)u0;
                // viscous: eps_bar eta (grad u1 + grad u1^T) : grad(phi_a e_k)
                double visc = 0.0;
                for (int l = 0; l < 2; ++l) {
                    double Sym = du1[k][l] + du1[l][k];
                    visc += eps_bar * mat.viscosity * Sym * (l == 0 ? el.grad[a].x : el.grad[a].y);
                }
                // pressure: -p * d(phi_a)/dx_k
                double pres = -lin_p(p) * (k == 0 ? el.grad[a].x : el.grad[a].y);
                // gravity: -eps rho g phi_a  (moved to LHS as negative RHS)
                double grav = -eps * mat.density * (k == 0 ? mat.gravity.x : mat.gravity.y) * phi_a;
                return visc + pres + grav;
            });
            // lumped-mass part: M_a (u1_a - u0_a)/dt with M_a = rho*int(eps phi_a)
            double int_eps_phi = quad_tri(A, B, C, [&](Point2, double la, double lb, double lc) {
                double phi_a = a == 0 ? la : (a == 1 ? lb : lc);
                return eps_at(la, lb, lc) * phi_a;
            });
            int cn = el.n[a];
            double u1a = k == 0 ? lin_u1(space.mesh->point(space.nodes[cn])).x
                                : lin_u1(space.mesh->point(space.nodes[cn])).y;
            double u0a = k == 0 ? un.u[cn].x : un.u[cn].y;
            oracle += mat.density / dt * int_eps_phi * (u1a - u0a);

            int row = space.udof(cn, k);
            double assembled = sys.row_dot(row, x) - sys.rhs(row);
            CHECK(assembled == doctest::Approx(oracle).epsilon(1e-11));
        }
        // continuity row: int(eps div u1 + u1 . grad eps) phi_a + PSPG
        double oracle_c = quad_tri(A, B, C, [&](Point2 p, double la, double lb, double lc) {
            double phi_a = a == 0 ? la : (a == 1 ? lb : lc);
            double eps = eps_at(la, lb, lc);
            double divu = du1[0][0] + du1[1][1];
            Vec2 grad_eps = el.grad[0] * cpl.eps[el.n[0]] + el.grad[1] * cpl.eps[el.n[1]] +
                            el.grad[2] * cpl.eps[el.n[2]];
            return (eps * divu + dot(lin_u1(p), grad_eps)) * phi_a;
        });
        // PSPG (duplicate-formula check): tau from the stated formula
        {
            Vec2 u_mean{};
            for (const auto& uu : un.u) u_mean += uu;
            u_mean = u_mean / 3.0;
            Vec2 ue = (un.u[el.n[0]] + un.u[el.n[1]] + un.u[el.n[2]]) / 3.0 - u_mean;
            double he = std::sqrt(4.0 * el.area / std::sqrt(3.0));
            double nu = mat.viscosity / mat.density;
            double tau = he * he / (4.0 * nu + 2.0 * ue.norm() * he);
            oracle_c += tau * eps_bar * el.area / mat.density *
                        dot(el.grad[a], gradp - mat.gravity * (eps_bar * mat.density));
        }
        int rowp = space.pdof(el.n[a]);
        double assembled_c = sys.row_dot(rowp, x) - sys.rhs(rowp);
        CHECK(assembled_c == doctest::Approx(oracle_c).epsilon(1e-11));
    }
}

TEST_CASE("hydrostatic box: pressure matches rho*g*(H - y), velocity stays zero") {
    double H = 0.2;
    auto sc = water_box(0.2, H, 0.02);
    FluidMaterial mat;
    mat.density = 1000.0;
    mat.gravity = {0.0, -kG};
    mat.viscosity = 1e-3;
    FluidField un;
    un.u.assign(sc.space.n_nodes(), Vec2{});
    un.p.assign(sc.space.n_nodes(), 0.0);
    auto cpl = no_grains(sc.space);
    auto sys = assemble_vans(sc.space, un, cpl, mat, 1e-3);
    apply_boundary_conditions(sys, sc.space, mat);
    auto sol = solve_step(sys, sc.space);

    double pmax = mat.density * kG * H;
    for (int cn = 0; cn < sc.space.n_nodes(); ++cn) {
        Point2 p = sc.mesh.point(sc.space.nodes[cn]);
        double exact = mat.density * kG * (H - p.y);
        CHECK(std::fabs(sol.p[cn] - exact) < 0.01 * pmax);
        CHECK(sol.u[cn].norm() < 1e-6 * std::sqrt(kG * H));
    }
    // free-slip: u.n at wall nodes
    for (int cn = 0; cn < sc.space.n_nodes(); ++cn) {
        int v = sc.space.nodes[cn];
        if (sc.mesh.on_wall[v] && sc.mesh.wall_normal2[v] == Vec2{0.0, 0.0})
            CHECK(std::fabs(dot(sol.u[cn], sc.mesh.wall_normal[v])) < 1e-10);
    }
}

TEST_CASE("element stress closed forms") {
    std::vector<Point2> pts{{0, 0}, {1, 0}, {0, 1}};
    auto mesh = alpha_shape_extract(delaunay_triangulate(pts), SizeField::uniform_field(2.0),
                                    {5.0, false});
    auto space = build_fem_space(mesh);
    FluidMaterial mat;
    mat.viscosity = 0.7;

    SUBCASE("hydrostatic gradient") {
        FluidField f;
        f.u.assign(3, Vec2{});
        f.p.resize(3);
        for (int cn = 0; cn < 3; ++cn)
            f.p[cn] = 1000.0 * kG * space.mesh->point(space.nodes[cn]).y;
        auto st = compute_element_stress(space, f, {}, mat);
        CHECK(st.div_sigma[0].x == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(st.div_sigma[0].y == doctest::Approx(-1000.0 * kG).epsilon(1e-12));
    }
    SUBCASE("pure shear u = (y, 0)") {
        FluidField f;
        f.p.assign(3, 5.0);
        for (int cn = 0; cn < 3; ++cn) f.u.push_back({space.mesh->point(space.nodes[cn]).y, 0.0});
        auto st = compute_element_stress(space, f, {}, mat);
        CHECK(st.sigma[0][1] == doctest::Approx(mat.viscosity).epsilon(1e-12));
        CHECK(st.sigma[0][0] == doctest::Approx(-5.0).epsilon(1e-12));
        CHECK(st.sigma[0][3] == doctest::Approx(-5.0).epsilon(1e-12));
    }
    SUBCASE("random field: div sigma matches finite differences of the interpolant") {
        TestRng rng(4);
        FluidField f;
        for (int cn = 0; cn < 3; ++cn) {
            f.u.push_back({rng.uniform(), rng.uniform()});
            f.p.push_back(rng.uniform(-10, 10));
        }
        auto st = compute_element_stress(space, f, {}, mat);
        // FD gradient of the P1 pressure interpolant at the centroid
        auto p_at = [&](Point2 q) {
            const auto& el = space.elems[0];
            Point2 a = space.mesh->point(space.nodes[el.n[0]]);
            Point2 b = space.mesh->point(space.nodes[el.n[1]]);
            Point2 c = space.mesh->point(space.nodes[el.n[2]]);
            auto w = barycentric(a, b, c, q);
            return f.p[el.n[0]] * w[0] + f.p[el.n[1]] * w[1] + f.p[el.n[2]] * w[2];
        };
        double d = 1e-6;
        Point2 cen{1.0 / 3, 1.0 / 3};
        double dpdx = (p_at({cen.x + d, cen.y}) - p_at({cen.x - d, cen.y})) / (2 * d);
        double dpdy = (p_at({cen.x, cen.y + d}) - p_at({cen.x, cen.y - d})) / (2 * d);
        CHECK(st.div_sigma[0].x == doctest::Approx(-dpdx).epsilon(1e-8));
        CHECK(st.div_sigma[0].y == doctest::Approx(-dpdy).epsilon(1e-8));
    }
}

TEST_CASE("circular blob with surface tension: Young-Laplace pressure jump") {
    // circular cloud of radius R, no gravity, gamma_st > 0
    double R = 0.05, h = R / 20.0;
    std::vector<Point2> pts;
    int nr = static_cast<int>(R / h);
    pts.push_back({0, 0});
    for (int ir = 1; ir <= nr; ++ir) {
        double r = ir * h;
        int nth = static_cast<int>(std::round(2 * std::numbers::pi * r / h));
        for (int k = 0; k < nth; ++k) {
            double th = 2 * std::numbers::pi * k / nth;
            pts.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    SizeField hf = SizeField::uniform_field(h);
    auto mesh = alpha_shape_extract(delaunay_triangulate(pts), hf, {1.4, true});
    WallSet no_walls;
    color_boundary_edges(mesh, no_walls, hf);
    auto space = build_fem_space(mesh);

    FluidMaterial mat;
    mat.gravity = {0, 0};
    mat.surface_tension = 0.0072;
    mat.p0 = 0.0;
    mat.viscosity = 1e-3;
    FluidField un;
    un.u.assign(space.n_nodes(), Vec2{});
    un.p.assign(space.n_nodes(), 0.0);
    auto cpl = no_grains(space);
    auto sys = assemble_vans(space, un, cpl, mat, 1e-4);
    apply_boundary_conditions(sys, space, mat);
    auto sol = solve_step(sys, space);

    // interior pressure ~ gamma/R (2D Young-Laplace)
    double p_center = 0.0;
    int count = 0;
    for (int cn = 0; cn < space.n_nodes(); ++cn) {
        if (space.mesh->point(space.nodes[cn]).norm() < 0.5 * R) {
            p_center += sol.p[cn];
            ++count;
        }
    }
    p_center /= count;
    CHECK(p_center == doctest::Approx(mat.surface_tension / R).epsilon(0.05));
}

TEST_CASE("Galilean shift moves the solution exactly") {
    double H = 0.15;
    auto sc = water_box(0.3, H, 0.025);
    FluidMaterial mat;
    mat.viscosity = 1e-3;
    FluidField un;
    un.u.assign(sc.space.n_nodes(), Vec2{});
    un.p.assign(sc.space.n_nodes(), 0.0);
    auto cpl = no_grains(sc.space);
    auto sys = assemble_vans(sc.space, un, cpl, mat, 1e-3);
    apply_boundary_conditions(sys, sc.space, mat);
    auto base = solve_step(sys, sc.space);

    // shifted run: frame moving at U0; wall velocities shift too
    Vec2 U0{0.37, -0.11};
    Scene sc2 = sc;  // same geometry
    for (auto& v : sc2.mesh.wall_velocity) v += U0;
    auto space2 = build_fem_space(sc2.mesh);
    FluidField un2;
    un2.u.assign(space2.n_nodes(), U0);
    un2.p.assign(space2.n_nodes(), 0.0);
    auto cpl2 = no_grains(space2);
    auto sys2 = assemble_vans(space2, un2, cpl2, mat, 1e-3);
    apply_boundary_conditions(sys2, space2, mat);
    auto shifted = solve_step(sys2, space2);

    for (int cn = 0; cn < sc.space.n_nodes(); ++cn) {
        CHECK(std::fabs(shifted.u[cn].x - base.u[cn].x - U0.x) < 1e-8);
        CHECK(std::fabs(shifted.u[cn].y - base.u[cn].y - U0.y) < 1e-8);
    }
}
