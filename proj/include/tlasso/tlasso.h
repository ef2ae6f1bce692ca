#ifndef TLASSO_TLASSO_H
#define TLASSO_TLASSO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TLASSO_BUILDING_LIBRARY)
#    define TLASSO_API __declspec(dllexport)
#  else
#    define TLASSO_API __declspec(dllimport)
#  endif
#else
#  define TLASSO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tlasso_status {
  TLASSO_OK = 0,
  TLASSO_ERR_INVALID_ARGUMENT = 1,
  TLASSO_ERR_EMPTY_MATRIX = 2,
  TLASSO_ERR_DIMENSION_MISMATCH = 3,
  TLASSO_ERR_INSUFFICIENT_TIMEPOINTS = 4,
  TLASSO_ERR_INSUFFICIENT_ROWS = 5,
  TLASSO_ERR_INVALID_QUANTILE = 6,
  TLASSO_ERR_TOO_MANY_EDGES = 7,
  TLASSO_ERR_LEVEL_MISMATCH = 8,
  TLASSO_ERR_EMPTY_TRUTH = 9,
  TLASSO_ERR_NO_TRUE_POSITIVES = 10,
  TLASSO_ERR_MISSING_CELL = 11,
  TLASSO_ERR_NON_RECTANGULAR = 12,
  TLASSO_ERR_PARSE = 13,
  TLASSO_ERR_IO = 14,
  TLASSO_ERR_OUT_OF_MEMORY = 15,
  TLASSO_ERR_INTERNAL = 16
} tlasso_status;

typedef enum tlasso_level { TLASSO_LAG_RESOLVED = 0, TLASSO_CUMULATIVE = 1 } tlasso_level;

typedef struct tlasso_dataset tlasso_dataset;
typedef struct tlasso_config tlasso_config;
typedef struct tlasso_estimate tlasso_estimate;
typedef struct tlasso_sim_spec tlasso_sim_spec;
typedef struct tlasso_network tlasso_network;
typedef struct tlasso_metrics tlasso_metrics;
typedef struct tlasso_benchmark tlasso_benchmark;

TLASSO_API const char* tlasso_version(void);
TLASSO_API const char* tlasso_status_string(tlasso_status status);
/* Message of the last failed call on this thread; empty after a success. */
TLASSO_API const char* tlasso_last_error(void);
/* TLASSO_THREADS, or 1. */
TLASSO_API unsigned tlasso_default_threads(void);

/* Datasets. values are laid out [replicate][time][variable]; names may be NULL. */
TLASSO_API tlasso_status tlasso_dataset_create(size_t n, size_t T, size_t p, const double* values,
                                               const char* const* names, tlasso_dataset** out);
TLASSO_API tlasso_status tlasso_dataset_load_csv(const char* path, tlasso_dataset** out);
TLASSO_API tlasso_status tlasso_dataset_write_csv(const tlasso_dataset* data, const char* path, int long_format);
TLASSO_API tlasso_status tlasso_dataset_dims(const tlasso_dataset* data, size_t* n, size_t* T, size_t* p);
TLASSO_API tlasso_status tlasso_dataset_value(const tlasso_dataset* data, size_t r, size_t t, size_t i, double* out);
TLASSO_API const char* tlasso_dataset_name(const tlasso_dataset* data, size_t i);
TLASSO_API void tlasso_dataset_free(tlasso_dataset* data);

/* Estimation settings. Names: lasso, adaptive_lasso, truncating_lasso,
   truncating_adaptive_lasso (or alasso, tlasso, talasso); last_timepoint,
   rolling_window. d_max 0 restores the default T - 1, lambda <= 0 restores the
   formula, multiplier <= 0 restores hard zeroing of truncated lags. */
TLASSO_API tlasso_status tlasso_config_create(tlasso_config** out);
TLASSO_API tlasso_status tlasso_config_set_penalty(tlasso_config* config, const char* name);
TLASSO_API tlasso_status tlasso_config_set_alpha(tlasso_config* config, double alpha);
TLASSO_API tlasso_status tlasso_config_set_beta(tlasso_config* config, double beta);
TLASSO_API tlasso_status tlasso_config_set_dmax(tlasso_config* config, size_t d_max);
TLASSO_API tlasso_status tlasso_config_set_lambda(tlasso_config* config, double lambda);
TLASSO_API tlasso_status tlasso_config_set_truncation_multiplier(tlasso_config* config, double multiplier);
TLASSO_API tlasso_status tlasso_config_set_response_mode(tlasso_config* config, const char* name);
TLASSO_API tlasso_status tlasso_config_set_solver(tlasso_config* config, double tol, int max_iter);
TLASSO_API tlasso_status tlasso_config_set_sweeps(tlasso_config* config, double tol, int max_sweeps);
TLASSO_API tlasso_status tlasso_config_set_threads(tlasso_config* config, unsigned threads);
TLASSO_API void tlasso_config_free(tlasso_config* config);

TLASSO_API tlasso_status tlasso_fit(const tlasso_dataset* data, const tlasso_config* config, tlasso_estimate** out);
TLASSO_API tlasso_status tlasso_estimate_dims(const tlasso_estimate* est, size_t* lags, size_t* p);
TLASSO_API tlasso_status tlasso_estimate_order(const tlasso_estimate* est, size_t* order);
TLASSO_API tlasso_status tlasso_estimate_lambda(const tlasso_estimate* est, double* lambda);
TLASSO_API tlasso_status tlasso_estimate_sweeps(const tlasso_estimate* est, int* sweeps, int* converged);
/* Zero-based target and source, one-based lag, in data units. */
TLASSO_API tlasso_status tlasso_estimate_coefficient(const tlasso_estimate* est, size_t lag, size_t target,
                                                     size_t source, double* out);
TLASSO_API tlasso_status tlasso_estimate_nonzeros(const tlasso_estimate* est, size_t lag, size_t* out);
/* Objective after each sweep; *count receives the length, values may be NULL. */
TLASSO_API tlasso_status tlasso_estimate_objective_trace(const tlasso_estimate* est, double* values, size_t* count);
/* edges.tsv, network.tsv and summary.json in an existing directory. */
TLASSO_API tlasso_status tlasso_estimate_write(const tlasso_estimate* est, const tlasso_dataset* data, const char* dir);
TLASSO_API void tlasso_estimate_free(tlasso_estimate* est);

/* Simulation. Modes: all_positive, random_sign; process, measurement. */
TLASSO_API tlasso_status tlasso_sim_spec_create(tlasso_sim_spec** out);
TLASSO_API tlasso_status tlasso_sim_spec_set_dims(tlasso_sim_spec* spec, size_t p, size_t T, size_t n, size_t d);
TLASSO_API tlasso_status tlasso_sim_spec_set_signal(tlasso_sim_spec* spec, double rho, double sigma, size_t edges);
TLASSO_API tlasso_status tlasso_sim_spec_set_seed(tlasso_sim_spec* spec, uint64_t seed);
TLASSO_API tlasso_status tlasso_sim_spec_set_sign_mode(tlasso_sim_spec* spec, const char* name);
TLASSO_API tlasso_status tlasso_sim_spec_set_noise_mode(tlasso_sim_spec* spec, const char* name);
TLASSO_API tlasso_status tlasso_sim_spec_set_burn_in(tlasso_sim_spec* spec, size_t burn_in);
TLASSO_API void tlasso_sim_spec_free(tlasso_sim_spec* spec);

TLASSO_API tlasso_status tlasso_network_generate(const tlasso_sim_spec* spec, tlasso_network** out);
/* Tab-separated target, source, lag[, weight] using the dataset's variable names. */
TLASSO_API tlasso_status tlasso_network_read(const char* path, const tlasso_dataset* names_from, tlasso_network** out);
TLASSO_API tlasso_status tlasso_network_write(const tlasso_network* net, const tlasso_dataset* names_from, const char* path);
TLASSO_API tlasso_status tlasso_network_edge_count(const tlasso_network* net, size_t* count);
TLASSO_API tlasso_status tlasso_network_spectral_radius(const tlasso_network* net, double* radius);
TLASSO_API void tlasso_network_free(tlasso_network* net);

TLASSO_API tlasso_status tlasso_simulate(const tlasso_sim_spec* spec, const tlasso_network* net, unsigned threads,
                                         tlasso_dataset** out);

/* Metrics at both levels. */
TLASSO_API tlasso_status tlasso_evaluate(const tlasso_estimate* est, const tlasso_network* truth, tlasso_metrics** out);
/* Fields: shd, precision, recall, f1, false_positive_rate, sign_accuracy (NaN when undefined). */
TLASSO_API tlasso_status tlasso_metrics_value(const tlasso_metrics* metrics, tlasso_level level, const char* field,
                                              double* out);
/* metrics.tsv and metrics.json in an existing directory. */
TLASSO_API tlasso_status tlasso_metrics_write(const tlasso_metrics* metrics, const char* dir);
TLASSO_API void tlasso_metrics_free(tlasso_metrics* metrics);

/* Benchmark over replicates; the spec's seed is the master seed. d_max 0
   means T - 1. methods is a comma-separated list of penalty names, NULL for
   all four. */
TLASSO_API tlasso_status tlasso_benchmark_run(const tlasso_sim_spec* spec, size_t replicates, const double* alphas,
                                              size_t alpha_count, double beta, size_t d_max, const char* methods,
                                              unsigned threads, tlasso_benchmark** out);
TLASSO_API tlasso_status tlasso_benchmark_failures(const tlasso_benchmark* bench, size_t* failed, int* too_many);
/* bench.tsv, bench_summary.tsv, roc.tsv and manifest.json in an existing directory. */
TLASSO_API tlasso_status tlasso_benchmark_write(const tlasso_benchmark* bench, const char* dir);
TLASSO_API void tlasso_benchmark_free(tlasso_benchmark* bench);

#ifdef __cplusplus
}
#endif

#endif
