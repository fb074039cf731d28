#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "advection/advection.hpp"
#include "geom/adapt.hpp"
#include "test_rng.hpp"

using namespace gf;

TEST_CASE("advection formula") {
    SUBCASE("constant velocity") {
        std::vector<Point2> x{{0, 0}};
        std::vector<Vec2> u1{{1, 0}}, u0{{1, 0}};
        advect_fluid(x, u1, u0, 0.1);
        CHECK(x[0].x == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(x[0].y == 0.0);
    }
    SUBCASE("acceleration term doubles the step") {
        std::vector<Point2> x{{0, 0}};
        std::vector<Vec2> u1{{1, 0}}, u0{{0, 0}};
        advect_fluid(x, u1, u0, 0.1);
        CHECK(x[0].x == doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("ballistic trajectory approaches the analytic parabola") {
        // velocities prescribed exactly from free fall; global error is O(dt)
        double g = -9.81, dt = 1e-3, T = 0.5;
        std::vector<Point2> x{{0, 0}};
        int n = static_cast<int>(T / dt);
        for (int k = 0; k < n; ++k) {
            std::vector<Vec2> u0{{0.0, g * (k * dt)}};
            std::vector<Vec2> u1{{0.0, g * ((k + 1) * dt)}};
            advect_fluid(x, u1, u0, dt);
        }
        double exact = 0.5 * g * T * T;
        CHECK(std::fabs(x[0].y - exact) < std::fabs(g) * T * dt * 2.0);
    }
}

TEST_CASE("wall crossing projection") {
    std::vector<WallSegment> segs{{{-1, 0}, {1, 0}, {0, 0}, {}}};  // floor, fluid above
    WallSet walls(segs);

    SUBCASE("straight down through the floor") {
        std::vector<Point2> prev{{0.0, 0.05}};
        std::vector<Point2> pos{{0.0, -0.02}};
        std::vector<Vec2> vel{{0.0, -1.0}};
        auto rep = project_wall_crossers(pos, vel, prev, walls, 0.01);
        CHECK(rep.projected == 1);
        CHECK(pos[0].y == doctest::Approx(0.0));
        CHECK(vel[0].y == doctest::Approx(0.0));
        CHECK(rep.max_penetration == doctest::Approx(0.02).epsilon(1e-12));
    }
    SUBCASE("parallel motion at tolerance distance is untouched") {
        std::vector<Point2> prev{{-0.3, 0.01}};
        std::vector<Point2> pos{{0.3, 0.01}};
        std::vector<Vec2> vel{{1.0, 0.0}};
        auto rep = project_wall_crossers(pos, vel, prev, walls, 0.01);
        CHECK(rep.projected == 0);
        CHECK(pos[0].x == 0.3);
        CHECK(vel[0].x == 1.0);
    }
    SUBCASE("oblique crossing of a 45-degree wall matches the closed form") {
        std::vector<WallSegment> diag{{{0, 0}, {1, 1}, {0, 0}, {}}};  // fluid upper-left
        WallSet dwalls(diag);
        std::vector<Point2> prev{{0.2, 0.5}};
        std::vector<Point2> pos{{0.55, 0.35}};  // ends below the diagonal
        Vec2 v0{1.0, -0.6};
        std::vector<Vec2> vel{v0};
        auto rep = project_wall_crossers(pos, vel, prev, dwalls, 0.01);
        REQUIRE(rep.projected == 1);
        // closest point of (0.55, 0.35) on y=x is the projection onto the diagonal
        double s = 0.5 * (0.55 + 0.35);
        CHECK(pos[0].x == doctest::Approx(s).epsilon(1e-12));
        CHECK(pos[0].y == doctest::Approx(s).epsilon(1e-12));
        // velocity keeps only the tangential component
        Vec2 t = normalized(Vec2{1, 1});
        CHECK(dot(vel[0], perp(t)) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(dot(vel[0], t) == doctest::Approx(dot(v0, t)).epsilon(1e-12));
    }
    SUBCASE("no post-correction penetration on random showers") {
        TestRng rng(41);
        std::vector<Point2> prev, pos;
        std::vector<Vec2> vel;
        for (int i = 0; i < 500; ++i) {
            prev.push_back({rng.uniform(-0.9, 0.9), rng.uniform(0.0, 0.2)});
            Vec2 d{rng.uniform(-0.1, 0.1), rng.uniform(-0.25, 0.05)};
            pos.push_back(prev.back() + d);
            vel.push_back(d / 0.01);
        }
        project_wall_crossers(pos, vel, prev, walls, 0.005);
        for (const auto& p : pos) CHECK(p.y >= -1e-12);
    }
}

TEST_CASE("solution transfer") {
    // old mesh: lattice over the unit square
    std::vector<Point2> pts;
    for (int j = 0; j <= 10; ++j)
        for (int i = 0; i <= 10; ++i) pts.push_back({i * 0.1, j * 0.1});
    auto mesh = alpha_shape_extract(delaunay_triangulate(pts), SizeField::uniform_field(0.1),
                                    {1.5, false});

    std::vector<Vec2> u_old(pts.size());
    std::vector<double> p_old(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        u_old[i] = {pts[i].x, pts[i].y};  // linear field
        p_old[i] = 3.0 * pts[i].x - 2.0 * pts[i].y + 0.5;
    }

    SUBCASE("linear fields are reproduced exactly") {
        TestRng rng(6);
        std::vector<Point2> new_pts;
        std::vector<int> old_of_new;
        for (int k = 0; k < 200; ++k) {
            new_pts.push_back({rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)});
            old_of_new.push_back(-1);
        }
        auto res = transfer_solution(mesh, u_old, p_old, new_pts, old_of_new);
        CHECK(res.extrapolated == 0);
        for (int k = 0; k < 200; ++k) {
            CHECK(res.u[k].x == doctest::Approx(new_pts[k].x).epsilon(1e-12));
            CHECK(res.u[k].y == doctest::Approx(new_pts[k].y).epsilon(1e-12));
            CHECK(res.p[k] ==
                  doctest::Approx(3.0 * new_pts[k].x - 2.0 * new_pts[k].y + 0.5).epsilon(1e-12));
        }
    }
    SUBCASE("surviving nodes keep values bitwise") {
        std::vector<Point2> new_pts{pts[37], {0.512, 0.488}};
        std::vector<int> old_of_new{37, -1};
        auto res = transfer_solution(mesh, u_old, p_old, new_pts, old_of_new);
        CHECK(res.u[0].x == u_old[37].x);
        CHECK(res.u[0].y == u_old[37].y);
        CHECK(res.p[0] == p_old[37]);
    }
    SUBCASE("smooth field interpolation error is bounded by C h^2 |Hessian|") {
        auto f = [](Point2 p) { return std::sin(3.0 * p.x) * std::cos(2.0 * p.y); };
        std::vector<double> p_smooth(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) p_smooth[i] = f(pts[i]);
        TestRng rng(77);
        double h = 0.1;
        // |Hessian| <= 13 for this field (9+4 bound on second derivatives)
        double bound = 13.0 * h * h;
        for (int k = 0; k < 300; ++k) {
            std::vector<Point2> q{{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)}};
            std::vector<int> oon{-1};
            auto res = transfer_solution(mesh, u_old, p_smooth, q, oon);
            CHECK(std::fabs(res.p[0] - f(q[0])) < bound);
        }
    }
}
