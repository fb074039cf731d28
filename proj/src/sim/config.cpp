#include "sim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace gf {

namespace {

ScenarioConfig hydrostatic_defaults() {
    ScenarioConfig c;
    c.name = "hydrostatic";
    c.width = 0.2;
    c.height = 0.2;
    c.end_time = 0.05;
    c.fluid.surface_tension = 0.0;
    c.grains.count = 0;
    c.num.dt = 1e-3;
    c.num.h_min = 5e-3;
    c.num.h_max = 5e-3;
    c.num.transition = 2e-2;
    c.out.cadence = 10;
    return c;
}

ScenarioConfig dam_break_defaults() {
    ScenarioConfig c;
    c.name = "dam_break";
    c.container_length = 0.4;
    c.container_height = 0.3;
    c.column_width = 0.1;
    c.column_height = 0.1;
    c.gate_speed = 0.68;
    c.end_time = 1.0;
    c.fluid.surface_tension = 0.0072;
    c.grains = {279, 1.35e-3, 1.0, 2500.0, 0.2, 0.0, 1.0};
    c.num = {1.5e-4, 2e-3, 6e-3, 1.2e-2, 1.25, 0.25, true};
    c.out.cadence = 40;
    return c;
}

ScenarioConfig granular_collapse_defaults() {
    ScenarioConfig c;
    c.name = "granular_collapse";
    c.container_length = 1.2;
    c.container_height = 0.8;
    c.grain_column_width = 0.1;
    c.grain_column_height = 0.2;
    c.water_depth = 0.1;
    c.gate_speed = 1.0;
    c.end_time = 1.5;
    c.fluid.surface_tension = 0.0072;
    c.grains = {0, 2.5e-3, 1.2, 2500.0, 0.9, 0.9, 1.0};  // count derived from the column
    c.num = {4e-4, 3e-3, 1.2e-2, 2.4e-2, 1.25, 0.25, true};
    c.out.cadence = 25;
    return c;
}

ScenarioConfig lituya_defaults() {
    ScenarioConfig c;
    c.name = "lituya";
    c.water_depth = 122.0;
    c.water_length = 1342.0;
    c.shore_angle_deg = 45.0;
    c.slide_length = 970.0;
    c.slide_thickness = 92.0;
    c.slide_height_above_water = 230.0;
    c.slide_initial_speed = 0.0;
    c.end_time = 160.0;
    c.fluid.surface_tension = 0.0072;
    c.grains = {27960, 1.35, 3.0, 2640.0, 0.93, 0.93, 30.0};
    c.num = {2e-2, 10.0, 40.0, 80.0, 1.25, 0.25, true};
    c.out.cadence = 25;
    c.probes = {885.0};
    return c;
}

const std::map<std::string, std::set<std::string>>& geometry_keys() {
    static const std::map<std::string, std::set<std::string>> k{
        {"hydrostatic", {"width", "height"}},
        {"dam_break",
         {"container_length", "container_height", "column_width", "column_height", "gate_speed"}},
        {"granular_collapse",
         {"container_length", "container_height", "grain_column_width", "grain_column_height",
          "water_depth", "gate_speed"}},
        {"lituya",
         {"water_depth", "water_length", "shore_angle_deg", "slide_length", "slide_thickness",
          "slide_height_above_water", "slide_initial_speed"}},
    };
    return k;
}

[[noreturn]] void invalid(const std::string& key, const std::string& reason) {
    throw Error(ErrorCode::ConfigInvalid, key + ": " + reason);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) invalid(key, "not a number: '" + v + "'");
        return d;
    } catch (const std::logic_error&) {
        invalid(key, "not a number: '" + v + "'");
    }
}

long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos != v.size()) invalid(key, "not an integer: '" + v + "'");
        return d;
    } catch (const std::logic_error&) {
        invalid(key, "not an integer: '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    invalid(key, "not a boolean: '" + v + "'");
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"hydrostatic", "dam_break", "granular_collapse",
                                                "lituya"};
    return names;
}

ScenarioConfig default_config(const std::string& scenario) {
    if (scenario == "hydrostatic") return hydrostatic_defaults();
    if (scenario == "dam_break") return dam_break_defaults();
    if (scenario == "granular_collapse") return granular_collapse_defaults();
    if (scenario == "lituya") return lituya_defaults();
    invalid("scenario.name", "unknown scenario '" + scenario + "'");
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
    // section -> key -> value
    std::map<std::string, std::map<std::string, std::string>> kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                invalid(origin, "malformed section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            invalid(origin, "expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (section.empty()) invalid(origin, "key '" + key + "' outside any section");
        if (kv[section].count(key)) invalid(section + "." + key, "duplicate key");
        kv[section][key] = val;
    }

    static const std::set<std::string> known_sections{"scenario", "geometry", "fluid",
                                                      "grains",   "numerics", "output", "probes"};
    for (const auto& [sec, keys] : kv) {
        if (!known_sections.count(sec)) invalid(sec, "unknown section");
    }

    auto sc_it = kv.find("scenario");
    if (sc_it == kv.end() || !sc_it->second.count("name"))
        invalid("scenario.name", "missing (one of hydrostatic, dam_break, granular_collapse, lituya)");
    ScenarioConfig cfg = default_config(sc_it->second.at("name"));

    auto take = [&](const std::string& sec, const std::string& key,
                    std::string* out) -> bool {
        auto s = kv.find(sec);
        if (s == kv.end()) return false;
        auto k = s->second.find(key);
        if (k == s->second.end()) return false;
        *out = k->second;
        s->second.erase(k);
        return true;
    };
    std::string v;

    if (take("scenario", "name", &v)) {}
    if (take("scenario", "end_time", &v)) cfg.end_time = to_double("scenario.end_time", v);
    else cfg.notes.push_back("scenario.end_time defaulted");
    if (take("scenario", "seed", &v)) cfg.seed = static_cast<std::uint64_t>(to_int("scenario.seed", v));
    if (take("scenario", "scale", &v)) cfg.scale = to_double("scenario.scale", v);

    const auto& geo_allowed = geometry_keys().at(cfg.name);
    if (kv.count("geometry")) {
        for (const auto& [key, val] : kv["geometry"]) {
            if (!geo_allowed.count(key))
                invalid("geometry." + key, "unknown key for scenario '" + cfg.name + "'");
        }
    }
    if (take("geometry", "width", &v)) cfg.width = to_double("geometry.width", v);
    if (take("geometry", "height", &v)) cfg.height = to_double("geometry.height", v);
    if (take("geometry", "container_length", &v)) cfg.container_length = to_double("geometry.container_length", v);
    if (take("geometry", "container_height", &v)) cfg.container_height = to_double("geometry.container_height", v);
    if (take("geometry", "column_width", &v)) cfg.column_width = to_double("geometry.column_width", v);
    if (take("geometry", "column_height", &v)) cfg.column_height = to_double("geometry.column_height", v);
    if (take("geometry", "gate_speed", &v)) cfg.gate_speed = to_double("geometry.gate_speed", v);
    if (take("geometry", "water_depth", &v)) cfg.water_depth = to_double("geometry.water_depth", v);
    if (take("geometry", "water_length", &v)) cfg.water_length = to_double("geometry.water_length", v);
    if (take("geometry", "grain_column_width", &v)) cfg.grain_column_width = to_double("geometry.grain_column_width", v);
    if (take("geometry", "grain_column_height", &v)) cfg.grain_column_height = to_double("geometry.grain_column_height", v);
    if (take("geometry", "shore_angle_deg", &v)) cfg.shore_angle_deg = to_double("geometry.shore_angle_deg", v);
    if (take("geometry", "slide_length", &v)) cfg.slide_length = to_double("geometry.slide_length", v);
    if (take("geometry", "slide_thickness", &v)) cfg.slide_thickness = to_double("geometry.slide_thickness", v);
    if (take("geometry", "slide_height_above_water", &v)) cfg.slide_height_above_water = to_double("geometry.slide_height_above_water", v);
    if (take("geometry", "slide_initial_speed", &v)) cfg.slide_initial_speed = to_double("geometry.slide_initial_speed", v);

    if (take("fluid", "density", &v)) cfg.fluid.density = to_double("fluid.density", v);
    if (take("fluid", "viscosity", &v)) cfg.fluid.viscosity = to_double("fluid.viscosity", v);
    if (take("fluid", "surface_tension", &v)) cfg.fluid.surface_tension = to_double("fluid.surface_tension", v);
    if (take("fluid", "atmospheric_pressure", &v)) cfg.fluid.p0 = to_double("fluid.atmospheric_pressure", v);
    if (take("fluid", "g", &v)) cfg.fluid.gravity = {0.0, -to_double("fluid.g", v)};

    if (take("grains", "count", &v)) cfg.grains.count = static_cast<int>(to_int("grains.count", v));
    if (take("grains", "radius", &v)) cfg.grains.radius = to_double("grains.radius", v);
    if (take("grains", "polydispersity", &v)) cfg.grains.polydispersity = to_double("grains.polydispersity", v);
    if (take("grains", "density", &v)) cfg.grains.density = to_double("grains.density", v);
    if (take("grains", "friction", &v)) cfg.grains.friction = to_double("grains.friction", v);
    if (take("grains", "wall_friction", &v)) cfg.grains.wall_friction = to_double("grains.wall_friction", v);
    if (take("grains", "settle_time", &v)) cfg.grains.settle_time = to_double("grains.settle_time", v);

    if (take("numerics", "dt", &v)) cfg.num.dt = to_double("numerics.dt", v);
    else cfg.notes.push_back("numerics.dt defaulted");
    if (take("numerics", "h_min", &v)) cfg.num.h_min = to_double("numerics.h_min", v);
    if (take("numerics", "h_max", &v)) cfg.num.h_max = to_double("numerics.h_max", v);
    if (take("numerics", "transition", &v)) cfg.num.transition = to_double("numerics.transition", v);
    if (take("numerics", "alpha", &v)) cfg.num.alpha = to_double("numerics.alpha", v);
    if (take("numerics", "wall_tol_factor", &v)) cfg.num.wall_tol_factor = to_double("numerics.wall_tol_factor", v);
    if (take("numerics", "droplet_filter", &v)) cfg.num.droplet_filter = to_bool("numerics.droplet_filter", v);

    if (take("output", "directory", &v)) cfg.out.directory = v;
    if (take("output", "cadence", &v)) cfg.out.cadence = static_cast<int>(to_int("output.cadence", v));
    if (take("output", "vtk", &v)) cfg.out.vtk = to_bool("output.vtk", v);
    if (take("output", "grains_csv", &v)) cfg.out.grains_csv = to_bool("output.grains_csv", v);

    if (take("probes", "x", &v)) {
        cfg.probes.clear();
        std::istringstream ps(v);
        std::string tok;
        while (std::getline(ps, tok, ',')) cfg.probes.push_back(to_double("probes.x", trim(tok)));
    }

    // anything left over is unknown
    for (const auto& [sec, keys] : kv) {
        if (sec == "geometry") continue;  // already checked against the allowed set
        for (const auto& [key, val] : keys) {
            if (sec == "scenario" && key == "name") continue;
            invalid(sec + "." + key, "unknown key");
        }
    }

    if (cfg.scale != 1.0) {
        double f = cfg.scale;
        cfg.scale = 1.0;
        apply_scale(cfg, f);
    }
    validate_config(cfg);
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

void apply_scale(ScenarioConfig& cfg, double f) {
    if (f <= 0.0) invalid("scale", "must be > 0");
    if (f == 1.0) return;
    const double sf = std::sqrt(f);
    cfg.scale *= f;
    for (double* len : {&cfg.width, &cfg.height, &cfg.container_length, &cfg.container_height,
                        &cfg.column_width, &cfg.column_height, &cfg.water_depth, &cfg.water_length,
                        &cfg.grain_column_width, &cfg.grain_column_height, &cfg.slide_length,
                        &cfg.slide_thickness, &cfg.slide_height_above_water, &cfg.num.h_min,
                        &cfg.num.h_max, &cfg.num.transition})
        *len *= f;
    cfg.gate_speed *= sf;
    cfg.slide_initial_speed *= sf;
    cfg.end_time *= sf;
    cfg.num.dt *= sf;
    cfg.grains.settle_time *= sf;
    // grain radii keep their physical size: the count follows the area
    cfg.grains.count = static_cast<int>(std::lround(cfg.grains.count * f * f));
    for (double& p : cfg.probes) p *= f;
    cfg.notes.push_back("scaled by " + std::to_string(f));
}

void validate_config(const ScenarioConfig& cfg) {
    auto pos = [&](double x, const std::string& key) {
        if (!(x > 0.0)) invalid(key, "must be > 0");
    };
    auto nonneg = [&](double x, const std::string& key) {
        if (!(x >= 0.0)) invalid(key, "must be >= 0");
    };
    if (std::find(scenario_names().begin(), scenario_names().end(), cfg.name) ==
        scenario_names().end())
        invalid("scenario.name", "unknown scenario '" + cfg.name + "'");
    pos(cfg.end_time, "scenario.end_time");
    pos(cfg.fluid.density, "fluid.density");
    pos(cfg.fluid.viscosity, "fluid.viscosity");
    nonneg(cfg.fluid.surface_tension, "fluid.surface_tension");
    pos(-cfg.fluid.gravity.y, "fluid.g");
    pos(cfg.num.dt, "numerics.dt");
    pos(cfg.num.h_min, "numerics.h_min");
    if (cfg.num.h_max < cfg.num.h_min) invalid("numerics.h_max", "must be >= h_min");
    pos(cfg.num.transition, "numerics.transition");
    if (cfg.num.alpha < 1.0) invalid("numerics.alpha", "must be >= 1");
    pos(cfg.num.wall_tol_factor, "numerics.wall_tol_factor");
    if (cfg.out.cadence < 1) invalid("output.cadence", "must be >= 1");
    if (cfg.grains.count < 0) invalid("grains.count", "must be >= 0");
    pos(cfg.grains.radius, "grains.radius");
    if (cfg.grains.polydispersity < 1.0) invalid("grains.polydispersity", "must be >= 1");
    pos(cfg.grains.density, "grains.density");
    nonneg(cfg.grains.friction, "grains.friction");
    nonneg(cfg.grains.wall_friction, "grains.wall_friction");

    if (cfg.name == "hydrostatic") {
        pos(cfg.width, "geometry.width");
        pos(cfg.height, "geometry.height");
    } else if (cfg.name == "dam_break") {
        pos(cfg.container_length, "geometry.container_length");
        pos(cfg.container_height, "geometry.container_height");
        pos(cfg.column_width, "geometry.column_width");
        pos(cfg.column_height, "geometry.column_height");
        nonneg(cfg.gate_speed, "geometry.gate_speed");
        if (cfg.column_width >= cfg.container_length)
            invalid("geometry.column_width", "must be smaller than container_length");
    } else if (cfg.name == "granular_collapse") {
        pos(cfg.container_length, "geometry.container_length");
        pos(cfg.container_height, "geometry.container_height");
        pos(cfg.grain_column_width, "geometry.grain_column_width");
        pos(cfg.grain_column_height, "geometry.grain_column_height");
        pos(cfg.water_depth, "geometry.water_depth");
        nonneg(cfg.gate_speed, "geometry.gate_speed");
        if (cfg.grain_column_width >= cfg.container_length)
            invalid("geometry.grain_column_width", "must be smaller than container_length");
    } else if (cfg.name == "lituya") {
        pos(cfg.water_depth, "geometry.water_depth");
        pos(cfg.water_length, "geometry.water_length");
        if (cfg.shore_angle_deg <= 0.0 || cfg.shore_angle_deg >= 90.0)
            invalid("geometry.shore_angle_deg", "must be in (0, 90)");
        pos(cfg.slide_length, "geometry.slide_length");
        pos(cfg.slide_thickness, "geometry.slide_thickness");
        nonneg(cfg.slide_height_above_water, "geometry.slide_height_above_water");
        nonneg(cfg.slide_initial_speed, "geometry.slide_initial_speed");
    }
}

std::string config_to_string(const ScenarioConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "[scenario]\nname = " << c.name << "\nend_time = " << c.end_time
       << "\nseed = " << c.seed << "\nscale = " << c.scale << "\n\n[geometry]\n";
    if (c.name == "hydrostatic") {
        os << "width = " << c.width << "\nheight = " << c.height << "\n";
    } else if (c.name == "dam_break") {
        os << "container_length = " << c.container_length
           << "\ncontainer_height = " << c.container_height << "\ncolumn_width = " << c.column_width
           << "\ncolumn_height = " << c.column_height << "\ngate_speed = " << c.gate_speed << "\n";
    } else if (c.name == "granular_collapse") {
        os << "container_length = " << c.container_length
           << "\ncontainer_height = " << c.container_height
           << "\ngrain_column_width = " << c.grain_column_width
           << "\ngrain_column_height = " << c.grain_column_height
           << "\nwater_depth = " << c.water_depth << "\ngate_speed = " << c.gate_speed << "\n";
    } else if (c.name == "lituya") {
        os << "water_depth = " << c.water_depth << "\nwater_length = " << c.water_length
           << "\nshore_angle_deg = " << c.shore_angle_deg << "\nslide_length = " << c.slide_length
           << "\nslide_thickness = " << c.slide_thickness
           << "\nslide_height_above_water = " << c.slide_height_above_water
           << "\nslide_initial_speed = " << c.slide_initial_speed << "\n";
    }
    os << "\n[fluid]\ndensity = " << c.fluid.density << "\nviscosity = " << c.fluid.viscosity
       << "\nsurface_tension = " << c.fluid.surface_tension
       << "\natmospheric_pressure = " << c.fluid.p0 << "\ng = " << -c.fluid.gravity.y << "\n";
    os << "\n[grains]\ncount = " << c.grains.count << "\nradius = " << c.grains.radius
       << "\npolydispersity = " << c.grains.polydispersity << "\ndensity = " << c.grains.density
       << "\nfriction = " << c.grains.friction << "\nwall_friction = " << c.grains.wall_friction
       << "\nsettle_time = " << c.grains.settle_time << "\n";
    os << "\n[numerics]\ndt = " << c.num.dt << "\nh_min = " << c.num.h_min
       << "\nh_max = " << c.num.h_max << "\ntransition = " << c.num.transition
       << "\nalpha = " << c.num.alpha << "\nwall_tol_factor = " << c.num.wall_tol_factor
       << "\ndroplet_filter = " << (c.num.droplet_filter ? "true" : "false") << "\n";
    os << "\n[output]\ndirectory = " << c.out.directory << "\ncadence = " << c.out.cadence
       << "\nvtk = " << (c.out.vtk ? "true" : "false")
       << "\ngrains_csv = " << (c.out.grains_csv ? "true" : "false") << "\n";
    if (!c.probes.empty()) {
        os << "\n[probes]\nx = ";
        for (std::size_t i = 0; i < c.probes.size(); ++i)
            os << (i ? "," : "") << c.probes[i];
        os << "\n";
    }
    return os.str();
}

}  // namespace gf
