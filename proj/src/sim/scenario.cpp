#include "sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "dem/broad_phase.hpp"
#include "dem/contact_solver.hpp"
#include "geom/size_field.hpp"

namespace gf {

namespace {

// Rows marching up in y; each row spans [x_left(y), x_right(y)] with points
// exactly on the ends. Row spacing and in-row spacing follow the size field.
template <typename XL, typename XR>
std::vector<Point2> lattice_rows(double y0, double y1, XL&& x_left, XR&& x_right,
                                 const SizeField& h, double stagger = 0.5) {
    std::vector<Point2> pts;
    double y = y0;
    int row = 0;
    while (y <= y1 + 1e-12) {
        double xl = x_left(y), xr = x_right(y);
        double hv = h({0.5 * (xl + xr), y});
        if (xr - xl > 1e-9) {
            int n = std::max(1, static_cast<int>(std::round((xr - xl) / hv)));
            double dx = (xr - xl) / n;
            double off = (row % 2 == 1) ? stagger * dx : 0.0;
            pts.push_back({xl, y});
            for (int i = 1; i < n; ++i) {
                double x = xl + i * dx + off;
                if (x < xr - 0.25 * dx) pts.push_back({x, y});
            }
            pts.push_back({xr, y});
        }
        double hrow = h({0.5 * (xl + xr), std::min(y + hv, y1)});
        double step = 0.5 * std::sqrt(3.0) * std::min(hv, hrow);
        if (y >= y1 - 1e-12) break;
        y = (y + 1.75 * step >= y1) ? y1 : y + step;
        ++row;
    }
    return pts;
}

std::vector<double> sample_radii(int count, double r_avg, double poly, Rng& rng) {
    std::vector<double> radii(count);
    double lo = 2.0 * r_avg / (1.0 + poly);
    double hi = 2.0 * r_avg * poly / (1.0 + poly);
    for (auto& r : radii) r = rng.uniform(lo, hi);
    return radii;
}

// Gravity settling pre-run against the given (closed) walls; contacts only.
int settle(std::vector<Grain>& grains, const WallSet& walls, const GrainMaterial& mat, Vec2 gravity,
           double r_avg, double time_cap) {
    if (grains.empty()) return 0;
    double g = gravity.norm();
    double dt = 0.1 * std::sqrt(r_avg / g);
    int max_steps = std::max(1, static_cast<int>(time_cap / dt));
    double rmax = 0.0;
    for (const auto& gr : grains) rmax = std::max(rmax, gr.radius);
    const double v_still = 0.02 * std::sqrt(g * r_avg);
    int calm = 0, steps = 0;
    std::vector<Vec2> ext(grains.size());
    WarmStart warm;
    for (; steps < max_steps; ++steps) {
        for (std::size_t i = 0; i < grains.size(); ++i) ext[i] = gravity * grains[i].mass;
        auto cands = broad_phase(grains, walls, 0.1 * rmax);
        auto sol = solve_contacts_nscd(grains, cands, ext, mat, dt, &warm);
        warm = make_warm_start(sol);
        integrate_grains(grains, sol, gravity, dt);
        double vmax = 0.0;
        for (const auto& gr : grains) vmax = std::max(vmax, gr.V.norm());
        calm = vmax < v_still ? calm + 1 : 0;
        if (calm >= 20) break;
    }
    for (auto& gr : grains) {
        gr.V = {0, 0};
        gr.omega = 0.0;
        gr.Fc = {0, 0};
        gr.Mc = 0.0;
        gr.Ffluid = {0, 0};
    }
    return steps;
}

// Hex seeding of `count` grains above a base line, inside x в [x0, x1].
std::vector<Grain> seed_grains(int count, const std::vector<double>& radii, double x0, double x1,
                               double y_base, double density,
                               Vec2 along = {1, 0}, Vec2 up = {0, 1}) {
    std::vector<Grain> grains;
    grains.reserve(count);
    double rmax = 0.0;
    for (double r : radii) rmax = std::max(rmax, r);
    double pitch = 2.1 * rmax;
    double span = x1 - x0 - 2.0 * rmax;
    int per_row = std::max(1, static_cast<int>(span / pitch));
    Vec2 origin = along * x0 + up * y_base;
    for (int k = 0; k < count; ++k) {
        int row = k / per_row, col = k % per_row;
        double ax = rmax + col * pitch + (row % 2 ? 0.5 * pitch : 0.0);
        double ay = rmax + row * (0.5 * std::sqrt(3.0) * pitch + 0.02 * rmax);
        grains.push_back(make_grain(k, origin + along * ax + up * ay, radii[k], density));
    }
    return grains;
}

}  // namespace

BuiltScenario build_scenario(const ScenarioConfig& cfg) {
    BuiltScenario out;
    out.grain_material = {cfg.grains.density, cfg.grains.friction, cfg.grains.wall_friction};
    const Vec2 g = cfg.fluid.gravity;
    Rng rng(cfg.seed);

    SizeFieldParams sfp{cfg.num.h_min, cfg.num.h_max, cfg.num.transition};

    if (cfg.name == "hydrostatic") {
        double W = cfg.width, H = cfg.height, top = 2.0 * H;
        std::vector<WallSegment> walls{
            {{0, 0}, {W, 0}, {0, 0}, {}},
            {{0, top}, {0, 0}, {0, 0}, {}},
            {{W, 0}, {W, top}, {0, 0}, {}},
        };
        out.walls = WallSet(walls, cfg.num.h_max);
        out.initial_surface = {{{0, H}, {W, H}, {0, 0}, {}}};
        SizeField h(sfp, out.initial_surface);
        out.fluid_points = lattice_rows(0.0, H, [&](double) { return 0.0; },
                                        [&](double) { return W; }, h);
        out.still_water_level = H;
        out.h0_reference = H;
        return out;
    }

    if (cfg.name == "dam_break") {
        double L = cfg.container_length, CH = cfg.container_height;
        double W = cfg.column_width, H = cfg.column_height;
        std::vector<WallSegment> walls{
            {{0, 0}, {L, 0}, {0, 0}, {}},        // floor
            {{0, CH}, {0, 0}, {0, 0}, {}},       // left wall
            {{L, 0}, {L, CH}, {0, 0}, {}},       // right wall
            {{W, 0}, {W, CH}, {0, cfg.gate_speed}, {}},  // gate, lifts at t=0
        };
        out.walls = WallSet(walls, cfg.num.h_max);
        out.initial_surface = {{{0, H}, {W, H}, {0, 0}, {}}};
        SizeField h(sfp, out.initial_surface);
        out.fluid_points = lattice_rows(0.0, H, [&](double) { return 0.0; },
                                        [&](double) { return W; }, h);
        out.still_water_level = H;
        out.h0_reference = H;

        if (cfg.grains.count > 0) {
            auto radii = sample_radii(cfg.grains.count, cfg.grains.radius,
                                      cfg.grains.polydispersity, rng);
            out.grains = seed_grains(cfg.grains.count, radii, 0.0, W, 0.0, cfg.grains.density);
            // settle against the closed gate
            std::vector<WallSegment> closed = walls;
            closed[3].velocity = {0, 0};
            WallSet settle_walls(closed, cfg.num.h_max);
            out.settle_steps = settle(out.grains, settle_walls, out.grain_material, g,
                                      cfg.grains.radius, cfg.grains.settle_time);
        }
        return out;
    }

    if (cfg.name == "granular_collapse") {
        double L = cfg.container_length, CH = cfg.container_height;
        double L0 = cfg.grain_column_width, h0 = cfg.water_depth;
        std::vector<WallSegment> walls{
            {{0, 0}, {L, 0}, {0, 0}, {}},
            {{0, CH}, {0, 0}, {0, 0}, {}},
            {{L, 0}, {L, CH}, {0, 0}, {}},
            {{L0, CH}, {L0, 0}, {0, cfg.gate_speed}, {}},  // gate, water side left of a->b
        };
        out.walls = WallSet(walls, cfg.num.h_max);
        out.initial_surface = {{{L0, h0}, {L, h0}, {0, 0}, {}}};
        SizeField h(sfp, out.initial_surface);
        out.fluid_points = lattice_rows(0.0, h0, [&](double) { return L0; },
                                        [&](double) { return L; }, h);
        out.still_water_level = h0;
        out.h0_reference = h0;

        int count = cfg.grains.count;
        if (count == 0) {
            // fill the column footprint at a dense packing fraction
            double area = cfg.grain_column_width * cfg.grain_column_height;
            double lo = 2.0 * cfg.grains.radius / (1.0 + cfg.grains.polydispersity);
            double hi = 2.0 * cfg.grains.radius * cfg.grains.polydispersity /
                        (1.0 + cfg.grains.polydispersity);
            double mean_r2 = (lo * lo + lo * hi + hi * hi) / 3.0;
            count = static_cast<int>(0.82 * area / (std::numbers::pi * mean_r2));
        }
        auto radii = sample_radii(count, cfg.grains.radius, cfg.grains.polydispersity, rng);
        out.grains = seed_grains(count, radii, 0.0, L0, 0.0, cfg.grains.density);
        std::vector<WallSegment> closed = walls;
        closed[3].velocity = {0, 0};
        WallSet settle_walls(closed, cfg.num.h_max);
        out.settle_steps = settle(out.grains, settle_walls, out.grain_material, g,
                                  cfg.grains.radius, cfg.grains.settle_time);
        return out;
    }

    if (cfg.name == "lituya") {
        double h0 = cfg.water_depth, Lw = cfg.water_length;
        double ca = 1.0 / std::tan(cfg.shore_angle_deg * std::numbers::pi / 180.0);
        // left waterline at x = 0; floor from (h0*ca, 0) to (h0*ca + Lw, 0)
        double xf0 = h0 * ca, xf1 = h0 * ca + Lw;
        double slope_len = cfg.slide_height_above_water + cfg.slide_length + h0;
        Vec2 up_left = normalized(Vec2{-ca, 1.0});
        Vec2 up_right = normalized(Vec2{ca, 1.0});
        Point2 shore_left_top = Point2{xf0, 0.0} + up_left * (slope_len * 2.0);
        Point2 shore_right_top = Point2{xf1, 0.0} + up_right * (slope_len + 4.0 * h0);
        std::vector<WallSegment> walls{
            {shore_left_top, {xf0, 0.0}, {0, 0}, {}},  // left shore, water on the right
            {{xf0, 0.0}, {xf1, 0.0}, {0, 0}, {}},      // floor
            {{xf1, 0.0}, shore_right_top, {0, 0}, {}}, // right shore
        };
        out.walls = WallSet(walls, cfg.num.h_max);
        out.runup_shore_segment = 2;
        out.initial_surface = {{{0.0, h0}, {xf1 + h0 * ca, h0}, {0, 0}, {}}};
        SizeField h(sfp, out.initial_surface);
        out.fluid_points = lattice_rows(0.0, h0, [&](double y) { return xf0 - y * ca; },
                                        [&](double y) { return xf1 + y * ca; }, h);
        out.still_water_level = h0;
        out.h0_reference = h0;

        // slide mass packed on the left slope, released at t = 0
        auto radii = sample_radii(cfg.grains.count, cfg.grains.radius, cfg.grains.polydispersity,
                                  rng);
        Vec2 along = -up_left;  // down-slope
        Vec2 normal = normalized(perp(along));  // away from the hill
        // place the toe of the box at slide_height_above_water above the lake
        double toe_h = h0 + cfg.slide_height_above_water;
        Point2 toe{h0 * ca - toe_h * ca, toe_h};
        // seed grains in slope coordinates: s along the slope (uphill), n off it
        Vec2 uphill = up_left;
        out.grains = seed_grains(cfg.grains.count, radii, 0.0, cfg.slide_length, 0.0,
                                 cfg.grains.density, uphill, normal);
        for (auto& gr : out.grains) gr.X += toe - Point2{0, 0};

        // settle against the slope with retaining walls at the box ends
        Point2 box_hi = toe + uphill * cfg.slide_length;
        std::vector<WallSegment> closed = walls;
        closed.push_back({toe + normal * (6.0 * cfg.slide_thickness), toe, {0, 0}, {}});
        closed.push_back({box_hi, box_hi + normal * (6.0 * cfg.slide_thickness), {0, 0}, {}});
        WallSet settle_walls(closed, cfg.num.h_max);
        out.settle_steps = settle(out.grains, settle_walls, out.grain_material, g,
                                  cfg.grains.radius, cfg.grains.settle_time);
        if (cfg.slide_initial_speed > 0.0) {
            Vec2 v0 = along * cfg.slide_initial_speed;
            for (auto& gr : out.grains) gr.V = v0;
        }
        return out;
    }

    throw Error(ErrorCode::ConfigInvalid, "unknown scenario '" + cfg.name + "'");
}

}  // namespace gf
