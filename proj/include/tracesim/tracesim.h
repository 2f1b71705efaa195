#ifndef TRACESIM_H
#define TRACESIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ts_status {
    TS_OK = 0,
    TS_ERR_PARAMETER = 1,
    TS_ERR_FORMAT = 2,
    TS_ERR_IO = 3,
    TS_ERR_BUFFER_TOO_SMALL = 4,
    TS_ERR_CELLS_FAILED = 5,
    TS_ERR_INTERNAL = 6
} ts_status;

/* Message of the last failed call on this thread; never NULL. */
const char* ts_last_error(void);
const char* ts_version(void);

typedef struct ts_network ts_network;

/* kind: "superspreading", "erdos_renyi" or "gamma_infectiousness" (or ss/er/gamma).
   k is ignored for erdos_renyi. */
ts_status ts_network_generate(const char* kind, double k, double r0, double beta, double gamma,
                              uint64_t n, uint64_t seed, ts_network** out);
ts_status ts_network_read(const char* path, ts_network** out);
ts_status ts_network_write(const ts_network* net, const char* path);
uint64_t ts_network_node_count(const ts_network* net);
uint64_t ts_network_edge_count(const ts_network* net);
void ts_network_free(ts_network* net);

typedef struct ts_experiment ts_experiment;

/* profile: "paper" (N=100000, 15x30) or "desk" (N=10000, 5x6). */
ts_status ts_experiment_create(const char* profile, ts_experiment** out);
/* Applies the keys of a key=value config file on top of the current spec. */
ts_status ts_experiment_load_config(ts_experiment* exp, const char* path);
ts_status ts_experiment_set(ts_experiment* exp, const char* key, const char* value);
ts_status ts_experiment_apply_preset(ts_experiment* exp, const char* name);
/* Writes the canonical config text, NUL-terminated. `needed` receives the
   required size including the terminator. */
ts_status ts_experiment_dump(const ts_experiment* exp, char* buffer, size_t capacity, size_t* needed);
/* Runs the sweep. Returns TS_ERR_CELLS_FAILED when some cells failed; their
   messages are in <output_dir>/failures.csv. */
ts_status ts_experiment_run(ts_experiment* exp, size_t* cells_ok, size_t* cells_failed);
void ts_experiment_free(ts_experiment* exp);

/* NB dispersion estimate over the secondary-infection counts of the first
   `first_m` infected nodes stored in an infections or trajectory CSV.
   k is +inf when the sample shows no overdispersion. */
ts_status ts_estimate_k_from_file(const char* path, uint64_t first_m, double* k, double* mean,
                                  uint64_t* sample_size);

#ifdef __cplusplus
}
#endif

#endif
