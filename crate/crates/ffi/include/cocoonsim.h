#ifndef COCOONSIM_H
#define COCOONSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_PARAMETER = 2,
  CS_STATUS_PARSE_ERROR = 3,
  CS_STATUS_DATA_ERROR = 4,
  CS_STATUS_IO_ERROR = 5,
  CS_STATUS_GRAPH_ERROR = 6,
  CS_STATUS_INVALID_UTF8 = 7,
  CS_STATUS_OUT_OF_RANGE = 8,
  CS_STATUS_PANIC = 9,
} CsStatus;

typedef enum CsTopology {
  CS_TOPOLOGY_BARABASI_ALBERT = 0,
  CS_TOPOLOGY_WATTS_STROGATZ = 1,
} CsTopology;

typedef enum CsLayer {
  CS_LAYER_RELATIONSHIP = 0,
  CS_LAYER_COMMENT = 1,
} CsLayer;

// Experiment configuration.
typedef struct CsConfig CsConfig;

// Aggregated ensemble statistics.
typedef struct CsEnsemble CsEnsemble;

// Social graph with both layers.
typedef struct CsGraph CsGraph;

// Finished single run: trajectory plus evolved graph.
typedef struct CsRun CsRun;

// One trajectory row. `delta_m` is NaN at t = 0.
typedef struct CsStepRecord {
  size_t t;
  double i;
  double mean_m;
  double delta_m;
  size_t new_comments;
  size_t rewired;
} CsStepRecord;

typedef struct CsEmotionRange {
  double initial;
  double minimum;
  double maximum;
  double difference;
} CsEmotionRange;

// Comment layer after removing silent nodes.
typedef struct CsCommentSummary {
  size_t node_count;
  size_t edge_count;
  double mean_degree;
  size_t max_degree;
} CsCommentSummary;

typedef struct CsEnsembleStep {
  size_t t;
  double mean_i;
  double std_i;
  double mean_m;
  double std_m;
} CsEnsembleStep;

typedef struct CsSweepRow {
  double ra;
  double initial_m;
  double mean_difference;
  double min_m;
  double max_m;
} CsSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *cs_last_error(void);

// Library version as a static NUL-terminated string.
const char *cs_version(void);

// `i0 e^{rt} / (1 - i0 + i0 e^{rt})`.
double cs_logistic_density(double t, double i0, double rate);

// Default configuration. `ra` is unset until [`cs_config_set_ra`].
//
// # Safety
// `out` must be a valid pointer to writable storage.
enum CsStatus cs_config_new(struct CsConfig **out);

// Parse a `key = value` document.
//
// # Safety
// `document` must be NUL-terminated; `out` must be writable.
enum CsStatus cs_config_parse(const char *document, struct CsConfig **out);

// # Safety
// `config` must come from this library and not be used afterwards.
void cs_config_free(struct CsConfig *config);

// Set the recommendation accuracy. The config is unchanged on error.
//
// # Safety
// `config` must be a live handle.
enum CsStatus cs_config_set_ra(struct CsConfig *config, double ra);

// # Safety
// `config` must be a live handle.
enum CsStatus cs_config_set_seed(struct CsConfig *config, uint64_t seed);

// # Safety
// `config` must be a live handle.
enum CsStatus cs_config_set_runs(struct CsConfig *config, size_t runs);

// # Safety
// `config` must be a live handle.
enum CsStatus cs_config_set_nodes(struct CsConfig *config, size_t n);

// # Safety
// `config` must be a live handle.
enum CsStatus cs_config_set_horizon(struct CsConfig *config, size_t horizon);

// # Safety
// `config` must be a live handle.
enum CsStatus cs_config_set_topology(struct CsConfig *config,
                                     enum CsTopology topology,
                                     double mean_degree);

// Generate the initial graph the config describes.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum CsStatus cs_graph_generate(const struct CsConfig *config, uint64_t seed, struct CsGraph **out);

// Read `nodes.csv` and `edges.csv` from a directory.
//
// # Safety
// `dir` must be NUL-terminated; `out` must be writable.
enum CsStatus cs_graph_import(const char *dir, struct CsGraph **out);

// Write `nodes.csv` and `edges.csv` into a directory.
//
// # Safety
// `graph` must be a live handle; `dir` NUL-terminated.
enum CsStatus cs_graph_export(const struct CsGraph *graph, const char *dir);

// Node count, or 0 for NULL.
//
// # Safety
// `graph` must be NULL or a live handle.
size_t cs_graph_node_count(const struct CsGraph *graph);

// Edge count of one layer, or 0 for NULL.
//
// # Safety
// `graph` must be NULL or a live handle.
size_t cs_graph_edge_count(const struct CsGraph *graph, enum CsLayer layer);

// # Safety
// `graph` must come from this library and not be used afterwards.
void cs_graph_free(struct CsGraph *graph);

// Generate a graph from `seed` and simulate it. `ra` must be set.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum CsStatus cs_run(const struct CsConfig *config, uint64_t seed, struct CsRun **out);

// Simulate a copy of an existing graph; the input graph is not modified.
//
// # Safety
// `config` and `graph` must be live handles; `out` must be writable.
enum CsStatus cs_run_on_graph(const struct CsConfig *config,
                              const struct CsGraph *graph,
                              uint64_t seed,
                              struct CsRun **out);

// Number of recorded steps including t = 0, or 0 for NULL.
//
// # Safety
// `run` must be NULL or a live handle.
size_t cs_run_step_count(const struct CsRun *run);

// # Safety
// `run` must be a live handle; `out` must be writable.
enum CsStatus cs_run_step(const struct CsRun *run, size_t index, struct CsStepRecord *out);

// # Safety
// `run` must be a live handle; `out` must be writable.
enum CsStatus cs_run_emotion_range(const struct CsRun *run, struct CsEmotionRange *out);

// # Safety
// `run` must be a live handle; `out` must be writable.
enum CsStatus cs_run_comment_summary(const struct CsRun *run, struct CsCommentSummary *out);

// Copy of the evolved graph as a new handle.
//
// # Safety
// `run` must be a live handle; `out` must be writable.
enum CsStatus cs_run_graph(const struct CsRun *run, struct CsGraph **out);

// # Safety
// `run` must come from this library and not be used afterwards.
void cs_run_free(struct CsRun *run);

// Run `runs` members in parallel with seeds `seed + i`.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum CsStatus cs_ensemble(const struct CsConfig *config, struct CsEnsemble **out);

// # Safety
// `ensemble` must be NULL or a live handle.
size_t cs_ensemble_step_count(const struct CsEnsemble *ensemble);

// # Safety
// `ensemble` must be a live handle; `out` must be writable.
enum CsStatus cs_ensemble_step(const struct CsEnsemble *ensemble,
                               size_t index,
                               struct CsEnsembleStep *out);

// Mean over members of the population-emotion range.
//
// # Safety
// `ensemble` must be a live handle; `out` must be writable.
enum CsStatus cs_ensemble_mean_difference(const struct CsEnsemble *ensemble, double *out);

// # Safety
// `ensemble` must come from this library and not be used afterwards.
void cs_ensemble_free(struct CsEnsemble *ensemble);

// Sweep `count` RA values over shared initial graphs. `rows` must hold
// `count` entries and is filled in input order.
//
// # Safety
// `ra_values` and `rows` must point to `count` readable/writable elements.
enum CsStatus cs_ra_sweep(const struct CsConfig *config,
                          const double *ra_values,
                          size_t count,
                          struct CsSweepRow *rows);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COCOONSIM_H */
