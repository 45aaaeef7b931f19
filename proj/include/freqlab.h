/* freqlab C API: train small sigmoid MLPs with classical optimizers and track
 * per-frequency convergence. The core lives behind this stable extern-C
 * surface; handles are opaque and every entry point reports through status
 * codes plus freqlab_last_error(). */
#ifndef FREQLAB_H
#define FREQLAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum freqlab_status {
  FREQLAB_OK = 0,
  FREQLAB_ERR_CONFIG = 1,  /* bad configuration or input files */
  FREQLAB_ERR_RUNTIME = 2, /* failure while running */
  FREQLAB_ERR_VERIFY = 3   /* invariant battery reported failures */
} freqlab_status;

const char* freqlab_version(void);

/* Thread budget for parallel objective evaluation; n < 1 resets to the
 * hardware default. */
void freqlab_set_threads(int n);

/* Message for the most recent failure on this thread. */
const char* freqlab_last_error(void);

/* ---- experiments ------------------------------------------------------- */

typedef struct freqlab_experiment freqlab_experiment;

/* Builds an experiment from a JSON config document (see README for the
 * schema). Returns NULL on error. */
freqlab_experiment* freqlab_experiment_new_json(const char* json_text);
freqlab_experiment* freqlab_experiment_new_file(const char* path);
void freqlab_experiment_free(freqlab_experiment* exp);

freqlab_status freqlab_experiment_run(freqlab_experiment* exp);

/* Artifact locations, valid after a successful run; owned by the handle. */
const char* freqlab_experiment_trace_path(const freqlab_experiment* exp);
const char* freqlab_experiment_summary_path(const freqlab_experiment* exp);
const char* freqlab_experiment_heatmap_path(const freqlab_experiment* exp);
uint64_t freqlab_experiment_fingerprint(const freqlab_experiment* exp);

/* ---- sweeps, plots, verification --------------------------------------- */

/* Runs the config under n_seeds consecutive seeds starting at base_seed and
 * returns the aggregated ordering statistics as a JSON document in
 * *summary_json_out (free with freqlab_string_free). */
freqlab_status freqlab_sweep_json(const char* json_text, int n_seeds, uint64_t base_seed,
                                  char** summary_json_out);

/* Regenerates the heatmap SVG from an emitted trace CSV. */
freqlab_status freqlab_plot_csv(const char* csv_path, const char* svg_path);

/* Runs the invariant battery on synthetic objectives. *report_out (optional)
 * receives a human-readable report; free with freqlab_string_free. */
freqlab_status freqlab_verify(char** report_out);

void freqlab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FREQLAB_H */
