#ifndef THERMOFORCE_H
#define THERMOFORCE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TfStatus {
  TF_STATUS_OK = 0,
  /**
   * Null pointer, bad UTF-8, buffer too small or out-of-range argument.
   */
  TF_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed or inconsistent input data.
   */
  TF_STATUS_INPUT = 2,
  /**
   * Singular system or undefined objective.
   */
  TF_STATUS_NUMERICAL = 3,
  TF_STATUS_IO = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  TF_STATUS_INTERNAL = 5,
} TfStatus;

/**
 * Measured series keyed by node; assembled into a rectangular series
 * when used.
 */
typedef struct TfMeasurements TfMeasurements;

typedef struct TfModel TfModel;

typedef struct TfReport TfReport;

typedef struct TfTrajectory TfTrajectory;

typedef struct TfWeather TfWeather;

/**
 * GA and objective settings for [`tf_diagnose`] and [`tf_verify_default`].
 */
typedef struct TfGaParams {
  size_t population_size;
  double crossover_probability;
  double mutation_probability;
  size_t max_generations;
  size_t stagnation_generations;
  uint64_t seed;
  bool elitism;
  bool parallel;
  bool exhaustive;
  size_t skip_steps;
} TfGaParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the calling thread's last failure; empty if none. Never null.
 */
const char *tf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tf_version(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TfStatus tf_model_from_file(const char *path, struct TfModel **out);

/**
 * Parses building description text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TfStatus tf_model_from_str(const char *text, struct TfModel **out);

/**
 * The bundled 23-node test cell.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TfStatus tf_model_test_cell(struct TfModel **out);

/**
 * # Safety
 * `model` must come from a `tf_model_*` constructor, or be null.
 */
void tf_model_free(struct TfModel *model);

/**
 * Number of nodes; 0 for a null handle.
 *
 * # Safety
 * `model` must be a live handle or null.
 */
size_t tf_model_node_count(const struct TfModel *model);

/**
 * Node number of the indoor air node; 0 for a null handle.
 *
 * # Safety
 * `model` must be a live handle or null.
 */
size_t tf_model_air_node(const struct TfModel *model);

/**
 * Looks up a node by label, e.g. `door:inside`.
 *
 * # Safety
 * `model` must be a live handle, `label` a NUL-terminated string and
 * `node` a valid pointer.
 */
enum TfStatus tf_model_find_node(const struct TfModel *model, const char *label, size_t *node);

/**
 * Copies the label of `node` into `buf`.
 *
 * # Safety
 * `model` must be a live handle; `buf` must hold `len` bytes; `needed`
 * may be null.
 */
enum TfStatus tf_model_node_label(const struct TfModel *model,
                                  size_t node,
                                  char *buf,
                                  size_t len,
                                  size_t *needed);

/**
 * Writes the model back in the building file format.
 *
 * # Safety
 * As for [`tf_model_node_label`].
 */
enum TfStatus tf_model_to_str(const struct TfModel *model, char *buf, size_t len, size_t *needed);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TfStatus tf_weather_from_file(const char *path, struct TfWeather **out);

/**
 * The bundled five-day quarter-hour weather sequence.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TfStatus tf_weather_synthetic(struct TfWeather **out);

/**
 * # Safety
 * `weather` must come from a `tf_weather_*` constructor, or be null.
 */
void tf_weather_free(struct TfWeather *weather);

/**
 * # Safety
 * `weather` must be a live handle or null.
 */
size_t tf_weather_len(const struct TfWeather *weather);

/**
 * Time step in seconds; 0 for a null handle.
 *
 * # Safety
 * `weather` must be a live handle or null.
 */
double tf_weather_dt(const struct TfWeather *weather);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TfStatus tf_measurements_from_file(const char *path, struct TfMeasurements **out);

/**
 * An empty measurement set with step `dt` seconds, to be filled with
 * [`tf_measurements_set`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TfStatus tf_measurements_new(double dt, struct TfMeasurements **out);

/**
 * Sets (or replaces) the series of `node`.
 *
 * # Safety
 * `meas` must be a live handle and `values` must point to `len` doubles.
 */
enum TfStatus tf_measurements_set(struct TfMeasurements *meas,
                                  size_t node,
                                  const double *values,
                                  size_t len);

/**
 * # Safety
 * `meas` must come from a `tf_measurements_*` constructor, or be null.
 */
void tf_measurements_free(struct TfMeasurements *meas);

/**
 * Simulates from the forcing-consistent steady start, forcing the
 * `n_forced` nodes in `forced` to their measured values. `meas` may be
 * null when nothing is forced.
 *
 * # Safety
 * Handles must be live (or `meas` null); `forced` must point to
 * `n_forced` values; `out` must be a valid pointer.
 */
enum TfStatus tf_simulate(const struct TfModel *model,
                          const struct TfWeather *weather,
                          const struct TfMeasurements *meas,
                          const size_t *forced,
                          size_t n_forced,
                          struct TfTrajectory **out);

/**
 * # Safety
 * `traj` must come from [`tf_simulate`], or be null.
 */
void tf_trajectory_free(struct TfTrajectory *traj);

/**
 * # Safety
 * `traj` must be a live handle or null.
 */
size_t tf_trajectory_steps(const struct TfTrajectory *traj);

/**
 * Copies the temperatures of `node` (one per step) into `buf`, which must
 * hold at least `tf_trajectory_steps` values.
 *
 * # Safety
 * `traj` must be a live handle and `buf` must hold `len` doubles.
 */
enum TfStatus tf_trajectory_node(const struct TfTrajectory *traj,
                                 size_t node,
                                 double *buf,
                                 size_t len);

/**
 * Fills `params` with the default settings.
 *
 * # Safety
 * `params` must be a valid pointer or null.
 */
void tf_ga_params_default(struct TfGaParams *params);

/**
 * Searches for the forcing set that best explains the measured air
 * temperature. `meas` must contain the air node series.
 *
 * # Safety
 * Handles and `params` must be live; `out` must be a valid pointer.
 */
enum TfStatus tf_diagnose(const struct TfModel *model,
                          const struct TfWeather *weather,
                          const struct TfMeasurements *meas,
                          const struct TfGaParams *params,
                          struct TfReport **out);

/**
 * # Safety
 * `report` must come from [`tf_diagnose`], or be null.
 */
void tf_report_free(struct TfReport *report);

/**
 * Best objective J (°C²); NaN for a null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
double tf_report_best_objective(const struct TfReport *report);

/**
 * Objective J without forcing (°C²); NaN for a null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
double tf_report_unforced_objective(const struct TfReport *report);

/**
 * Number of nodes in the best forcing set.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
size_t tf_report_forced_count(const struct TfReport *report);

/**
 * Copies the best forcing set, ascending, into `buf`.
 *
 * # Safety
 * `report` must be a live handle and `buf` must hold `len` values.
 */
enum TfStatus tf_report_forced_nodes(const struct TfReport *report, size_t *buf, size_t len);

/**
 * The report as `key = value` lines, valid while the handle lives.
 *
 * # Safety
 * `report` must be a live handle or null (returns null).
 */
const char *tf_report_kv(const struct TfReport *report);

/**
 * The human-readable report, valid while the handle lives.
 *
 * # Safety
 * `report` must be a live handle or null (returns null).
 */
const char *tf_report_text(const struct TfReport *report);

/**
 * Runs the bundled verification cases and the control on the test cell.
 * `passed` and `total` receive the case counts.
 *
 * # Safety
 * `params` must be live; `passed` and `total` must be valid pointers.
 */
enum TfStatus tf_verify_default(const struct TfGaParams *params, size_t *passed, size_t *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THERMOFORCE_H */
