/* granuflow: 2D coupled free-surface / granular flow solver.
 *
 * C interface to the shared library. Handles are opaque; every function
 * returns a gf_status (or a handle) and the last error message is kept in
 * thread-local storage, retrievable via gf_last_error().
 */
#ifndef GRANUFLOW_H
#define GRANUFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gf_status {
    GF_OK = 0,
    GF_ERR_INVALID_ARG = 1,
    GF_ERR_CONFIG = 2,
    GF_ERR_SOLVER = 3,
    GF_ERR_IO = 4,
    GF_ERR_RUNTIME = 5
} gf_status;

typedef struct gf_config gf_config;
typedef struct gf_sim gf_sim;

const char* gf_version(void);

/* Last error message for the calling thread; empty string if none. */
const char* gf_last_error(void);

/* ---- configuration ---------------------------------------------------- */

/* Parse an INI scenario file. NULL on failure (see gf_last_error). */
gf_config* gf_config_load(const char* path);

/* Built-in defaults for a named scenario. */
gf_config* gf_config_default(const char* scenario);

/* Override one value, e.g. gf_config_set(c, "scenario.end_time", "0.05").
 * Geometry/scale overrides behave exactly like the config file keys. */
gf_status gf_config_set(gf_config* cfg, const char* key, const char* value);

/* Froude-consistent geometric rescale (lengths x f, times/speeds x sqrt f). */
gf_status gf_config_scale(gf_config* cfg, double factor);

gf_status gf_config_validate(const gf_config* cfg);

/* Resolved config as INI text. The buffer is owned by the config handle and
 * is valid until the next call on it. */
const char* gf_config_to_string(gf_config* cfg);

void gf_config_destroy(gf_config* cfg);

/* Newline-separated list of scenario names (static storage). */
const char* gf_scenario_names(void);

/* ---- simulation -------------------------------------------------------- */

gf_sim* gf_sim_create(const gf_config* cfg);
void gf_sim_destroy(gf_sim* sim);

gf_status gf_sim_step(gf_sim* sim);

/* Runs the time loop to end_time, writing outputs into output_dir (falls
 * back to the config's output.directory when NULL). Exit conditions map to
 * GF_OK or GF_ERR_SOLVER; partial outputs are preserved on failure. */
gf_status gf_sim_run(gf_sim* sim, const char* output_dir);

double gf_sim_time(const gf_sim* sim);
int gf_sim_step_index(const gf_sim* sim);
size_t gf_sim_node_count(const gf_sim* sim);
size_t gf_sim_grain_count(const gf_sim* sim);

/* Diagnostics of the current state. */
double gf_sim_fluid_volume(const gf_sim* sim);
double gf_sim_fluid_front(const gf_sim* sim);
double gf_sim_grain_front(const gf_sim* sim);
double gf_sim_wave_probe(const gf_sim* sim, double x_probe);
double gf_sim_max_velocity(const gf_sim* sim);

/* Wave-regime classification by front Froude number:
 * 0 nonlinear transition, 1 solitary non-breaking, 2 transient bore. */
int gf_classify_regime(double fr_f);

#ifdef __cplusplus
}
#endif

#endif /* GRANUFLOW_H */
