#include "granuflow/granuflow.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include <json.hpp>
#include <string>

#include "core/error.hpp"
#include "io/writers.hpp"
#include "sim/config.hpp"
#include "sim/diagnostics.hpp"
#include "sim/simulation.hpp"

using namespace gf;

namespace {

thread_local std::string t_last_error;

void set_error(const std::string& msg) { t_last_error = msg; }

gf_status status_of(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ConfigInvalid: return GF_ERR_CONFIG;
        case ErrorCode::FactorizationFailure:
        case ErrorCode::NoConvergence: return GF_ERR_SOLVER;
        case ErrorCode::IoFailure: return GF_ERR_IO;
        default: return GF_ERR_RUNTIME;
    }
}

template <typename F>
gf_status guarded(F&& f) {
    try {
        f();
        t_last_error.clear();
        return GF_OK;
    } catch (const Error& e) {
        set_error(std::string(error_code_name(e.code())) + ": " + e.what());
        return status_of(e);
    } catch (const std::exception& e) {
        set_error(e.what());
        return GF_ERR_RUNTIME;
    }
}

}  // namespace

struct gf_config {
    ScenarioConfig cfg;
    std::string rendered;
};

struct gf_sim {
    Simulation sim;
    explicit gf_sim(const ScenarioConfig& c) : sim(c) {}
};

extern "C" {

const char* gf_version(void) { return "granuflow 1.0.0"; }

const char* gf_last_error(void) { return t_last_error.c_str(); }

gf_config* gf_config_load(const char* path) {
    if (!path) {
        set_error("gf_config_load: path is NULL");
        return nullptr;
    }
    gf_config* out = nullptr;
    guarded([&] { out = new gf_config{parse_config_file(path), {}}; });
    return out;
}

gf_config* gf_config_default(const char* scenario) {
    if (!scenario) {
        set_error("gf_config_default: scenario is NULL");
        return nullptr;
    }
    gf_config* out = nullptr;
    guarded([&] { out = new gf_config{default_config(scenario), {}}; });
    return out;
}

gf_status gf_config_set(gf_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) {
        set_error("gf_config_set: NULL argument");
        return GF_ERR_INVALID_ARG;
    }
    return guarded([&] {
        std::string k(key), v(value);
        auto dot = k.find('.');
        if (dot == std::string::npos)
            throw Error(ErrorCode::ConfigInvalid, k + ": expected section.key");
        std::string section = k.substr(0, dot), name = k.substr(dot + 1);
        // re-parse the rendered config with the key replaced; reuses the
        // parser's validation and unknown-key rejection
        std::string text = config_to_string(cfg->cfg);
        std::string patched;
        bool replaced = false;
        std::string cur_section;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            std::string trimmed = line;
            if (!trimmed.empty() && trimmed.front() == '[')
                cur_section = trimmed.substr(1, trimmed.find(']') - 1);
            auto eq = line.find('=');
            if (!replaced && eq != std::string::npos && cur_section == section) {
                std::string lk = line.substr(0, eq);
                lk.erase(lk.find_last_not_of(" \t") + 1);
                if (lk == name) {
                    line = name + " = " + v;
                    replaced = true;
                }
            }
            patched += line + "\n";
        }
        if (!replaced) patched += "\n[" + section + "]\n" + name + " = " + v + "\n";
        cfg->cfg = parse_config_text(patched, "gf_config_set");
    });
}

gf_status gf_config_scale(gf_config* cfg, double factor) {
    if (!cfg) {
        set_error("gf_config_scale: NULL config");
        return GF_ERR_INVALID_ARG;
    }
    return guarded([&] { apply_scale(cfg->cfg, factor); });
}

gf_status gf_config_validate(const gf_config* cfg) {
    if (!cfg) {
        set_error("gf_config_validate: NULL config");
        return GF_ERR_INVALID_ARG;
    }
    return guarded([&] { validate_config(cfg->cfg); });
}

const char* gf_config_to_string(gf_config* cfg) {
    if (!cfg) {
        set_error("gf_config_to_string: NULL config");
        return "";
    }
    cfg->rendered = config_to_string(cfg->cfg);
    return cfg->rendered.c_str();
}

void gf_config_destroy(gf_config* cfg) { delete cfg; }

const char* gf_scenario_names(void) {
    static std::string names = [] {
        std::string s;
        for (const auto& n : scenario_names()) s += n + "\n";
        return s;
    }();
    return names.c_str();
}

gf_sim* gf_sim_create(const gf_config* cfg) {
    if (!cfg) {
        set_error("gf_sim_create: NULL config");
        return nullptr;
    }
    gf_sim* out = nullptr;
    guarded([&] { out = new gf_sim(cfg->cfg); });
    return out;
}

void gf_sim_destroy(gf_sim* sim) { delete sim; }

gf_status gf_sim_step(gf_sim* sim) {
    if (!sim) {
        set_error("gf_sim_step: NULL sim");
        return GF_ERR_INVALID_ARG;
    }
    return guarded([&] { sim->sim.step(); });
}

gf_status gf_sim_run(gf_sim* sim, const char* output_dir) {
    if (!sim) {
        set_error("gf_sim_run: NULL sim");
        return GF_ERR_INVALID_ARG;
    }
    std::string dir = output_dir ? output_dir : sim->sim.config().out.directory;
    RunWriter* writer = nullptr;
    gf_status st = guarded([&] { writer = new RunWriter(dir, sim->sim.config()); });
    if (st != GF_OK) return st;
    st = guarded([&] {
        while (!sim->sim.finished()) {
            sim->sim.step();
            writer->on_step(sim->sim);
        }
        writer->finalize(sim->sim, summarize_run(sim->sim, *writer));
    });
    if (st != GF_OK) {
        // keep partial outputs and a failed manifest
        try {
            nlohmann::json j{{"failed", true}, {"error", t_last_error}};
            writer->finalize(sim->sim, j.dump());
        } catch (...) {
        }
    }
    delete writer;
    return st;
}

double gf_sim_time(const gf_sim* sim) { return sim ? sim->sim.time() : 0.0; }
int gf_sim_step_index(const gf_sim* sim) { return sim ? sim->sim.step_index() : -1; }
size_t gf_sim_node_count(const gf_sim* sim) { return sim ? sim->sim.points().size() : 0; }
size_t gf_sim_grain_count(const gf_sim* sim) { return sim ? sim->sim.grains().size() : 0; }

double gf_sim_fluid_volume(const gf_sim* sim) { return sim ? sim->sim.mesh().area : 0.0; }

double gf_sim_fluid_front(const gf_sim* sim) {
    return sim ? track_fronts(sim->sim).fluid : std::nan("");
}

double gf_sim_grain_front(const gf_sim* sim) {
    return sim ? track_fronts(sim->sim).granular : std::nan("");
}

double gf_sim_wave_probe(const gf_sim* sim, double x_probe) {
    return sim ? wave_probe(sim->sim, x_probe).amplitude : 0.0;
}

double gf_sim_max_velocity(const gf_sim* sim) {
    if (!sim) return 0.0;
    double m = 0.0;
    for (const auto& u : sim->sim.velocities()) m = std::max(m, u.norm());
    return m;
}

int gf_classify_regime(double fr_f) { return static_cast<int>(classify_regime(fr_f)); }

}  // extern "C"
