#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "coupling/coupling.hpp"
#include "fem/vans.hpp"
#include "test_rng.hpp"

using namespace gf;

namespace {

struct Scene {
    DomainMesh mesh;
    FemSpace space;
};

Scene water_square(double w, double h) {
    std::vector<Point2> pts;
    int n = static_cast<int>(std::round(w / h));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) pts.push_back({i * w / n, j * w / n});
    Scene sc{alpha_shape_extract(delaunay_triangulate(pts), SizeField::uniform_field(h),
                                 {1.5, false}),
             {}};
    WallSet no_walls;
    color_boundary_edges(sc.mesh, no_walls, SizeField::uniform_field(h));
    sc.space = build_fem_space(sc.mesh);
    return sc;
}

}  // namespace

TEST_CASE("drag coefficient closed forms") {
    FluidMaterial mat;
    mat.density = 1000.0;
    mat.viscosity = 1e-3;
    Grain g = make_grain(0, {0, 0}, 0.5e-3, 2500.0);  // d = 1 mm
    g.V = {0, 0};

    // Re = 0, eps = 1: gamma = 4.8^2 * (pi d/4) * eta
    double gamma = drag_coefficient(g, {0, 0}, 1.0, mat);
    CHECK(gamma == doctest::Approx(4.8 * 4.8 * std::numbers::pi * 1e-3 / 4.0 * 1e-3).epsilon(1e-12));
    CHECK(gamma == doctest::Approx(1.80956e-5).epsilon(1e-4));

    // eps scaling at Re = 0: gamma(eps/2)/gamma(eps) = 2^2.8
    double g1 = drag_coefficient(g, {0, 0}, 0.8, mat);
    double g2 = drag_coefficient(g, {0, 0}, 0.4, mat);
    CHECK(g2 / g1 == doctest::Approx(std::pow(2.0, 2.8)).epsilon(1e-12));
}

TEST_CASE("drag coefficient matches an independent re-implementation on a grid") {
    FluidMaterial mat;
    mat.density = 998.0;
    mat.viscosity = 8.9e-4;
    TestRng rng(55);
    for (int trial = 0; trial < 300; ++trial) {
        Grain g = make_grain(0, {0, 0}, rng.uniform(1e-4, 5e-2), 2500.0);
        g.V = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Vec2 u{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        double eps = rng.uniform(1e-6, 1.0);
        double got = drag_coefficient(g, u, eps, mat);
        // independent evaluation of the same correlation
        double epsc = std::max(eps, 1e-8);
        double d = 2 * g.radius;
        double re = mat.density * d * std::hypot(u.x - g.V.x, u.y - g.V.y) / mat.viscosity;
        double expect = std::pow(epsc, -2.8) *
                        std::pow(0.63 * std::sqrt(epsc * re) + 4.8, 2.0) *
                        (std::numbers::pi * d / 4.0) * mat.viscosity;
        CHECK(got == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("void fraction projection") {
    auto sc = water_square(1.0, 0.1);

    SUBCASE("no grains: eps is one everywhere") {
        auto eps = project_void_fraction({}, sc.space);
        for (double e : eps) CHECK(e == 1.0);
    }

    SUBCASE("lumped projection conserves total solid area") {
        TestRng rng(9);
        std::vector<Grain> grains;
        std::vector<OverlapDecomposition> decs;
        double total = 0.0;
        for (int k = 0; k < 20; ++k) {
            Grain g = make_grain(k, {rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85)},
                                 rng.uniform(0.01, 0.05), 2500.0);
            auto dec = disc_element_overlap(g, sc.mesh);
            REQUIRE(!dec.empty());
            total += dec.total_area;
            decs.push_back(std::move(dec));
            grains.push_back(g);
        }
        auto eps = project_void_fraction(decs, sc.space);
        std::vector<double> lumped(sc.space.n_nodes(), 0.0);
        for (const auto& e : sc.space.elems)
            for (int a = 0; a < 3; ++a) lumped[e.n[a]] += e.area / 3.0;
        double projected = 0.0;
        for (int n = 0; n < sc.space.n_nodes(); ++n) projected += (1.0 - eps[n]) * lumped[n];
        CHECK(projected == doctest::Approx(total).epsilon(1e-10));
        for (double e : eps) {
            CHECK(e >= kEpsFloor);
            CHECK(e <= 1.0);
        }
    }

    SUBCASE("full coverage clamps to the floor") {
        // one huge grain covering the entire square
        Grain g = make_grain(0, {0.5, 0.5}, 2.0, 2500.0);
        OverlapDecomposition dec;
        dec.grain = 0;
        for (const auto& e : sc.space.elems) {
            dec.parts.push_back({e.tri, e.area, e.centroid});
            dec.total_area += e.area;
        }
        std::vector<OverlapDecomposition> decs{dec};
        auto eps = project_void_fraction(decs, sc.space);
        for (double v : eps) CHECK(v == kEpsFloor);
    }
}

TEST_CASE("grain velocity projection") {
    auto sc = water_square(1.0, 0.1);

    SUBCASE("grains at rest give a zero field") {
        std::vector<Grain> grains{make_grain(0, {0.5, 0.5}, 0.05, 2500.0)};
        std::vector<OverlapDecomposition> decs{disc_element_overlap(grains[0], sc.mesh)};
        std::vector<Vec2> vals{{0, 0}};
        auto w = project_grain_velocity(decs, vals, sc.space);
        for (const auto& v : w) {
            CHECK(v.x == 0.0);
            CHECK(v.y == 0.0);
        }
    }

    SUBCASE("total momentum identity for one grain") {
        Grain g = make_grain(0, {0.47, 0.53}, 0.06, 2500.0);
        std::vector<OverlapDecomposition> decs{disc_element_overlap(g, sc.mesh)};
        std::vector<Vec2> vals{{1.0, 0.0}};
        auto w = project_grain_velocity(decs, vals, sc.space);
        std::vector<double> lumped(sc.space.n_nodes(), 0.0);
        for (const auto& e : sc.space.elems)
            for (int a = 0; a < 3; ++a) lumped[e.n[a]] += e.area / 3.0;
        Vec2 momentum{};
        for (int n = 0; n < sc.space.n_nodes(); ++n) momentum += w[n] * lumped[n];
        CHECK(momentum.x == doctest::Approx(g.area() * 1.0).epsilon(1e-10));
        CHECK(momentum.y == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("mirror-symmetric grains with opposite velocities give an antisymmetric field") {
        // staggered lattice: unique Delaunay triangulation, symmetric about x=0.5
        std::vector<Point2> pts;
        double h = 0.1;
        for (int j = 0; j <= 10; ++j) {
            if (j % 2 == 0)
                for (int i = 0; i <= 10; ++i) pts.push_back({i * h, j * h});
            else
                for (int i = 0; i < 10; ++i) pts.push_back({h / 2 + i * h, j * h});
        }
        auto mesh = alpha_shape_extract(delaunay_triangulate(pts), SizeField::uniform_field(h),
                                        {1.5, false});
        WallSet no_walls;
        color_boundary_edges(mesh, no_walls, SizeField::uniform_field(h));
        auto space = build_fem_space(mesh);

        Grain ga = make_grain(0, {0.3, 0.5}, 0.05, 2500.0);
        Grain gb = make_grain(1, {0.7, 0.5}, 0.05, 2500.0);
        std::vector<OverlapDecomposition> decs{disc_element_overlap(ga, mesh),
                                               disc_element_overlap(gb, mesh)};
        std::vector<Vec2> vals{{1.0, 0.0}, {-1.0, 0.0}};
        auto w = project_grain_velocity(decs, vals, space);
        // pair nodes across the x=0.5 mirror
        for (int n = 0; n < space.n_nodes(); ++n) {
            Point2 p = mesh.point(space.nodes[n]);
            Point2 q{1.0 - p.x, p.y};
            for (int m = 0; m < space.n_nodes(); ++m) {
                Point2 pm = mesh.point(space.nodes[m]);
                if (std::fabs(pm.x - q.x) < 1e-12 && std::fabs(pm.y - q.y) < 1e-12) {
                    CHECK(w[n].x == doctest::Approx(-w[m].x).epsilon(1e-9));
                    CHECK(w[n].y == doctest::Approx(w[m].y).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("grain velocity prediction") {
    Vec2 g{0.0, -9.81};

    SUBCASE("free fall with no drag, contacts or pressure") {
        Grain gr = make_grain(0, {0, 0}, 0.01, 2500.0);
        gr.V = {0.3, 0.1};
        auto pred = predict_grain_velocity(gr, 0.0, 0.01, g, gr.area());
        Vec2 vstar = pred.evaluate({0, 0}, {0, 0});
        CHECK(vstar.x == doctest::Approx(0.3).epsilon(1e-14));
        CHECK(vstar.y == doctest::Approx(0.1 - 9.81 * 0.01).epsilon(1e-14));
    }

    SUBCASE("drag-dominated limit pins the prediction to the fluid velocity") {
        Grain gr = make_grain(0, {0, 0}, 0.01, 2500.0);
        gr.V = {0, 0};
        Vec2 u{1.5, -0.4};
        double prev = 1e9;
        for (double gamma : {1e2, 1e4, 1e6, 1e9}) {
            auto pred = predict_grain_velocity(gr, gamma, 0.01, g, gr.area());
            double err = (pred.evaluate(u, {0, 0}) - u).norm();
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-6);
    }

    SUBCASE("affine map matches direct substitution") {
        TestRng rng(12);
        for (int trial = 0; trial < 200; ++trial) {
            Grain gr = make_grain(0, {0, 0}, rng.uniform(0.005, 0.05), 2500.0);
            gr.V = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
            gr.Fc = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
            double gamma = rng.uniform(0.0, 10.0);
            double dt = rng.uniform(1e-4, 1e-2);
            double vsub = rng.uniform(0.2, 1.0) * gr.area();
            Vec2 u{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            Vec2 gp{rng.uniform(-100, 100), rng.uniform(-100, 100)};
            auto pred = predict_grain_velocity(gr, gamma, dt, g, vsub);
            Vec2 got = pred.evaluate(u, gp);
            Vec2 expect = gr.V + (gr.Fc - gp * vsub + (u - gr.V) * gamma + g * gr.mass) *
                                     (dt / (gr.mass + gamma * dt));
            CHECK(got.x == doctest::Approx(expect.x).epsilon(1e-14));
            CHECK(got.y == doctest::Approx(expect.y).epsilon(1e-14));
        }
    }
}

TEST_CASE("interaction force exchange") {
    auto sc = water_square(1.0, 0.1);
    FluidMaterial mat;
    mat.density = 1000.0;
    mat.viscosity = 1e-3;

    SUBCASE("neutrally buoyant grain at rest in hydrostatic pressure feels buoyancy") {
        // grain density = fluid density; V* stays zero, drag force vanishes
        Grain g = make_grain(0, {0.5, 0.5}, 0.05, mat.density);
        std::vector<Grain> grains{g};
        FluidField f;
        f.u.assign(sc.space.n_nodes(), Vec2{});
        f.p.resize(sc.space.n_nodes());
        for (int cn = 0; cn < sc.space.n_nodes(); ++cn)
            f.p[cn] = mat.density * 9.81 * (1.0 - sc.mesh.point(sc.space.nodes[cn]).y);
        auto cpl = build_coupling(grains, sc.space, f, mat, 1e-3, {});
        auto ex = interaction_force_exchange(cpl, sc.space, f);
        double buoyancy = g.area() * mat.density * 9.81;
        CHECK(ex.grain_force[0].y == doctest::Approx(buoyancy).epsilon(1e-9));
        CHECK(std::fabs(ex.grain_force[0].x) < 1e-9 * buoyancy);
        // prediction: neutral grain in equilibrium keeps V* = 0
        CHECK(ex.Vstar[0].norm() < 1e-12);
    }

    SUBCASE("uniform pressure and matched velocities give zero force") {
        FluidMaterial nog = mat;
        nog.gravity = {0, 0};
        Grain g = make_grain(0, {0.5, 0.5}, 0.05, 2500.0);
        g.V = {0.7, -0.3};
        std::vector<Grain> grains{g};
        FluidField f;
        f.u.assign(sc.space.n_nodes(), g.V);
        f.p.assign(sc.space.n_nodes(), 42.0);
        auto cpl = build_coupling(grains, sc.space, f, nog, 1e-3, {});
        auto ex = interaction_force_exchange(cpl, sc.space, f);
        CHECK(ex.grain_force[0].norm() < 1e-12);
    }

    SUBCASE("random configurations satisfy the global balance audit") {
        TestRng rng(31);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Grain> grains;
            for (int k = 0; k < 15; ++k) {
                Grain g = make_grain(k, {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)},
                                     rng.uniform(0.02, 0.06), 2500.0);
                g.V = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
                g.Fc = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
                grains.push_back(g);
            }
            FluidField f;
            f.u.resize(sc.space.n_nodes());
            f.p.resize(sc.space.n_nodes());
            for (int cn = 0; cn < sc.space.n_nodes(); ++cn) {
                f.u[cn] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
                f.p[cn] = rng.uniform(-100, 100);
            }
            auto cpl = build_coupling(grains, sc.space, f, mat, 1e-3, {});
            auto ex = interaction_force_exchange(cpl, sc.space, f);
            CHECK(ex.balance_residual < 1e-10);
        }
    }
}

TEST_CASE("coupling neutrality: zero grains reproduce the grain-free solve bitwise") {
    auto sc = water_square(0.4, 0.05);
    FluidMaterial mat;
    FluidField un;
    un.u.assign(sc.space.n_nodes(), Vec2{0.1, 0.0});
    un.p.assign(sc.space.n_nodes(), 0.0);

    CouplingState manual;
    manual.eps.assign(sc.space.n_nodes(), 1.0);
    manual.w_terms.assign(sc.space.n_nodes(), {});

    auto built = build_coupling({}, sc.space, un, mat, 1e-3, {});
    for (double e : built.eps) CHECK(e == 1.0);

    auto s1 = assemble_vans(sc.space, un, manual, mat, 1e-3);
    auto s2 = assemble_vans(sc.space, un, built, mat, 1e-3);
    apply_boundary_conditions(s1, sc.space, mat);
    apply_boundary_conditions(s2, sc.space, mat);
    auto f1 = solve_step(s1, sc.space);
    auto f2 = solve_step(s2, sc.space);
    for (int cn = 0; cn < sc.space.n_nodes(); ++cn) {
        CHECK(f1.u[cn].x == f2.u[cn].x);
        CHECK(f1.u[cn].y == f2.u[cn].y);
        CHECK(f1.p[cn] == f2.p[cn]);
    }
}
