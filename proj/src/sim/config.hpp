#pragma once

#include <string>
#include <vector>

#include "coupling/coupling.hpp"

namespace gf {

struct ScenarioConfig {
    std::string name;  // hydrostatic | dam_break | granular_collapse | lituya
    double end_time = 1.0;
    std::uint64_t seed = 1;
    double scale = 1.0;

    // geometry (scenario-dependent subset)
    double width = 0.2, height = 0.2;                       // hydrostatic column
    double container_length = 0.4, container_height = 0.3;  // dam break / collapse
    double column_width = 0.1, column_height = 0.1;         // dam-break water column
    double gate_speed = 0.68;
    double water_depth = 0.1, water_length = 0.0;
    double grain_column_width = 0.1, grain_column_height = 0.15;
    double shore_angle_deg = 45.0;
    double slide_length = 970.0, slide_thickness = 92.0;
    double slide_height_above_water = 230.0;
    double slide_initial_speed = 0.0;

    FluidMaterial fluid;

    struct Grains {
        int count = 0;
        double radius = 1.35e-3;  // average
        double polydispersity = 1.0;
        double density = 2500.0;
        double friction = 0.2;
        double wall_friction = 0.0;
        double settle_time = 1.0;  // pre-run cap [s]
    } grains;

    struct Numerics {
        double dt = 2.5e-4;
        double h_min = 2e-3;
        double h_max = 6e-3;
        double transition = 1.2e-2;
        double alpha = 1.25;
        double wall_tol_factor = 0.25;
        bool droplet_filter = true;
    } num;

    struct Output {
        std::string directory = "out";
        int cadence = 40;  // steps between file outputs
        bool vtk = true;
        bool grains_csv = true;
    } out;

    std::vector<double> probes;  // probe x positions

    std::vector<std::string> notes;  // defaults filled in, logged to the manifest
};

const std::vector<std::string>& scenario_names();

// Paper-setup defaults for each named scenario.
ScenarioConfig default_config(const std::string& scenario);

// Strict INI parse: unknown sections/keys are ConfigInvalid; missing keys
// fall back to the scenario defaults (recorded in notes).
ScenarioConfig parse_config_file(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Froude-consistent geometric rescale: lengths scale by f, times by sqrt(f),
// speeds by sqrt(f); grain radii are unchanged so the count scales by f^2.
void apply_scale(ScenarioConfig& cfg, double f);

void validate_config(const ScenarioConfig& cfg);

std::string config_to_string(const ScenarioConfig& cfg);

}  // namespace gf
