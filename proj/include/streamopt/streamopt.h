// Copyright 2026 The streamopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the stream optimizer. All objects are opaque handles
 * created by so_*_create/load functions and released with the matching
 * so_*_free. Functions return an so_status; on failure so_last_error()
 * describes the problem for the calling thread.
 */
#ifndef STREAMOPT_STREAMOPT_H
#define STREAMOPT_STREAMOPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(STREAMOPT_BUILDING)
#    define STREAMOPT_API __declspec(dllexport)
#  else
#    define STREAMOPT_API __declspec(dllimport)
#  endif
#else
#  define STREAMOPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Nonzero values double as CLI exit codes. */
typedef enum so_status {
  SO_OK = 0,
  SO_ERR_USAGE = 1,
  SO_ERR_DATA = 2,
  SO_ERR_INFEASIBLE = 3,
  SO_ERR_IO = 4,
  SO_ERR_INTERNAL = 5
} so_status;

typedef struct so_instance so_instance;
typedef struct so_scheme so_scheme;
typedef struct so_evaluation so_evaluation;
typedef struct so_result so_result;
typedef struct so_measurements so_measurements;
typedef struct so_calibration so_calibration;

STREAMOPT_API const char* so_last_error(void);
STREAMOPT_API const char* so_version(void);

/* ---- size model ------------------------------------------------------- */

typedef struct so_size_model {
  double base_kb;
  double shared_kb;
} so_size_model;

STREAMOPT_API void so_size_model_default(so_size_model* sizes);

/* ---- instances -------------------------------------------------------- */

typedef struct so_synthetic_params {
  size_t n_events;
  size_t n_modules;
  size_t lines_per_module_min;
  size_t lines_per_module_max;
  size_t n_clusters;
  double intra_cluster_pass_rate;
  double cross_cluster_pass_rate;
  double prescaled_fraction;
  double prescale_min;
  double turbo_fraction;
  double persist_reco_fraction;
  uint64_t seed;
} so_synthetic_params;

STREAMOPT_API void so_synthetic_params_default(so_synthetic_params* params);

STREAMOPT_API so_status so_instance_load(const char* path, so_instance** out);
/* Generates a planted-cluster instance; planted (optional) receives the
 * grouping of modules by latent cluster. */
STREAMOPT_API so_status so_instance_generate(const so_synthetic_params* params,
                                             so_instance** out, so_scheme** planted);
STREAMOPT_API so_status so_instance_write(const so_instance* inst, const char* path);
STREAMOPT_API void so_instance_free(so_instance* inst);

STREAMOPT_API size_t so_instance_n_events(const so_instance* inst);
STREAMOPT_API size_t so_instance_n_lines(const so_instance* inst);
STREAMOPT_API size_t so_instance_n_modules(const so_instance* inst);
STREAMOPT_API size_t so_instance_n_dropped_events(const so_instance* inst);
STREAMOPT_API const char* so_instance_module_name(const so_instance* inst, size_t module);

/* ---- schemes ---------------------------------------------------------- */

STREAMOPT_API so_status so_scheme_load(const so_instance* inst, const char* path,
                                       so_scheme** out);
STREAMOPT_API so_status so_scheme_write(const so_instance* inst, const so_scheme* scheme,
                                        const char* path);
STREAMOPT_API so_status so_scheme_single_stream(const so_instance* inst, so_scheme** out);
STREAMOPT_API so_status so_scheme_per_unit(const so_instance* inst, so_scheme** out);
STREAMOPT_API so_status so_scheme_random_balanced(const so_instance* inst, size_t n_streams,
                                                  uint64_t seed, so_scheme** out);
STREAMOPT_API void so_scheme_free(so_scheme* scheme);

STREAMOPT_API size_t so_scheme_n_streams(const so_scheme* scheme);
STREAMOPT_API size_t so_scheme_n_units(const so_scheme* scheme);
STREAMOPT_API size_t so_scheme_n_empty_streams(const so_scheme* scheme);
STREAMOPT_API so_status so_scheme_stream_of(const so_scheme* scheme, size_t unit,
                                            size_t* stream);

/* ---- discrete cost ---------------------------------------------------- */

typedef struct so_stream_stats {
  size_t n_units;
  size_t n_lines;
  double expected_events;
  double cost_contribution;
  double size_kb;
} so_stream_stats;

/* sizes may be NULL for the default size model. */
STREAMOPT_API so_status so_evaluate(const so_instance* inst, const so_scheme* scheme,
                                    const so_size_model* sizes, so_evaluation** out);
STREAMOPT_API double so_evaluation_cost_total(const so_evaluation* ev);
STREAMOPT_API double so_evaluation_size_total(const so_evaluation* ev);
STREAMOPT_API size_t so_evaluation_n_streams(const so_evaluation* ev);
STREAMOPT_API so_status so_evaluation_stream(const so_evaluation* ev, size_t stream,
                                             so_stream_stats* out);
STREAMOPT_API void so_evaluation_free(so_evaluation* ev);

/* ---- optimization ----------------------------------------------------- */

typedef struct so_optimizer_config {
  size_t n_streams;
  size_t n_restarts;
  size_t max_iters;
  double step_size;
  double beta1;
  double beta2;
  double epsilon;
  double plateau_tol;
  size_t plateau_window;
  double init_scale;
  uint64_t seed;
  size_t n_threads; /* 0: hardware concurrency */
} so_optimizer_config;

typedef struct so_restart_stats {
  int finite;
  double relaxed_loss;
  double discrete_cost;
  size_t iterations;
  double max_row_entropy;
  size_t n_empty_streams;
} so_restart_stats;

STREAMOPT_API void so_optimizer_config_default(so_optimizer_config* config);

STREAMOPT_API so_status so_optimize(const so_instance* inst, const so_optimizer_config* config,
                                    so_result** out);
STREAMOPT_API so_status so_result_scheme(const so_result* result, so_scheme** out);
STREAMOPT_API double so_result_relaxed_loss(const so_result* result);
STREAMOPT_API double so_result_cost_total(const so_result* result);
STREAMOPT_API size_t so_result_best_restart(const so_result* result);
STREAMOPT_API size_t so_result_n_restarts(const so_result* result);
STREAMOPT_API so_status so_result_restart(const so_result* result, size_t restart,
                                          so_restart_stats* out);
/* JSON diagnostics: config, per-restart stats, best scheme summary. */
STREAMOPT_API so_status so_result_write_diagnostics(const so_instance* inst,
                                                    const so_result* result,
                                                    const char* path);
STREAMOPT_API void so_result_free(so_result* result);

/* ---- exhaustive oracle ------------------------------------------------ */

typedef enum so_objective_kind {
  SO_OBJECTIVE_T = 0,
  SO_OBJECTIVE_S = 1,
  SO_OBJECTIVE_WEIGHTED = 2
} so_objective_kind;

typedef struct so_objective {
  so_objective_kind kind;
  double weight; /* for SO_OBJECTIVE_WEIGHTED: T + weight * S */
} so_objective;

/* Parses "T", "S" or "weighted:<w>". */
STREAMOPT_API so_status so_objective_parse(const char* text, so_objective* out);

STREAMOPT_API so_status so_oracle(const so_instance* inst, size_t n_streams,
                                  const so_objective* objective, const so_size_model* sizes,
                                  so_scheme** best, double* best_cost,
                                  uint64_t* n_evaluated);

/* ---- calibration ------------------------------------------------------ */

typedef struct so_fit {
  double slope;
  double intercept;
  double r_squared;
  size_t n_points;
} so_fit;

typedef struct so_measurement {
  const char* scheme_id;
  const char* stream_id;
  size_t n_lines;
  double measured_time_s;
  double measured_size_kb;
} so_measurement;

typedef struct so_calibration_group {
  const char* label; /* scheme id, or "*" when pooled */
  size_t n_records;
  so_fit time_fit;
  so_fit size_fit;
  double t_real;
} so_calibration_group;

STREAMOPT_API so_status so_fit_linear(const double* x, const double* y, size_t n,
                                      so_fit* out);

STREAMOPT_API so_status so_measurements_load(const char* path, so_measurements** out);
STREAMOPT_API size_t so_measurements_count(const so_measurements* ms);
/* String pointers stay valid until the handle is freed. */
STREAMOPT_API so_status so_measurements_get(const so_measurements* ms, size_t i,
                                            so_measurement* out);
/* scheme_id NULL sums every record. */
STREAMOPT_API so_status so_t_real(const so_measurements* ms, const char* scheme_id,
                                  double t_initial, double* out);
STREAMOPT_API void so_measurements_free(so_measurements* ms);

/* Links measurements to the model terms of the given schemes and fits
 * measured against model values, pooled or per scheme. */
STREAMOPT_API so_status so_calibrate(const so_instance* inst, const so_measurements* ms,
                                     const char* const* scheme_ids,
                                     const so_scheme* const* schemes, size_t n_schemes,
                                     const so_size_model* sizes, int pool_schemes,
                                     double t_initial, so_calibration** out);
STREAMOPT_API size_t so_calibration_n_groups(const so_calibration* cal);
STREAMOPT_API so_status so_calibration_group_get(const so_calibration* cal, size_t i,
                                                 so_calibration_group* out);
/* Relative run-to-run time fluctuation annotated on reports. */
STREAMOPT_API double so_calibration_time_uncertainty(const so_calibration* cal);
STREAMOPT_API void so_calibration_free(so_calibration* cal);

#ifdef __cplusplus
}
#endif

#endif /* STREAMOPT_STREAMOPT_H */
