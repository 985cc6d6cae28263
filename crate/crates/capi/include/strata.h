#ifndef STRATA_H
#define STRATA_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum StrataStatus {
  STRATA_STATUS_STRATA_OK = 0,
  /**
   * Bad input (file, CSV, parameter).
   */
  STRATA_STATUS_STRATA_INPUT_ERROR = 1,
  /**
   * Internal invariant violation.
   */
  STRATA_STATUS_STRATA_INVARIANT_ERROR = 2,
  /**
   * A required pointer argument was null.
   */
  STRATA_STATUS_STRATA_NULL_POINTER = 3,
  /**
   * A string argument was not valid UTF-8.
   */
  STRATA_STATUS_STRATA_UTF8_ERROR = 4,
} StrataStatus;

/**
 * An immutable point cloud.
 */
typedef struct StrataCloud StrataCloud;

/**
 * Pipeline configuration; create with `strata_config_new`, adjust with the
 * setters, pass to `strata_run_pipeline`.
 */
typedef struct StrataConfig StrataConfig;

/**
 * Results of one pipeline run: scaffolding and spine graph documents
 * (JSON) and a human-readable summary.
 */
typedef struct StrataOutput StrataOutput;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread. The pointer is
 * owned by the library and valid until the next failing call.
 */
const char *strata_last_error(void);

/**
 * Load a point cloud from a CSV file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be valid.
 */
enum StrataStatus strata_cloud_from_csv_file(const char *path,
                                             bool has_header,
                                             struct StrataCloud **out);

/**
 * Build a cloud from a dense row-major array of `len` points with `dim`
 * coordinates each.
 *
 * # Safety
 * `data` must point to `len * dim` readable doubles; `out` must be valid.
 */
enum StrataStatus strata_cloud_from_rows(const double *data,
                                         uintptr_t len,
                                         uintptr_t dim,
                                         struct StrataCloud **out);

/**
 * Generate one of the built-in synthetic shapes (see the CLI for names).
 *
 * # Safety
 * `shape` must be a valid NUL-terminated string; `out` must be valid.
 */
enum StrataStatus strata_cloud_synth(const char *shape,
                                     uint64_t seed,
                                     double noise_sigma,
                                     struct StrataCloud **out);

/**
 * Number of points, or 0 for a null handle.
 */
uintptr_t strata_cloud_len(const struct StrataCloud *cloud);

/**
 * Ambient dimension, or 0 for a null handle.
 */
uintptr_t strata_cloud_dim(const struct StrataCloud *cloud);

/**
 * Release a cloud handle; null is a no-op.
 */
void strata_cloud_free(struct StrataCloud *cloud);

/**
 * New configuration with the default parameters.
 */
struct StrataConfig *strata_config_new(void);

/**
 * Release a configuration; null is a no-op.
 */
void strata_config_free(struct StrataConfig *config);

/**
 * Edge rule: 0 joins nodes by center distance, 1 by minimum cluster
 * distance.
 */
enum StrataStatus strata_config_set_edge_rule(struct StrataConfig *config, int32_t rule);

/**
 * Run the full pipeline. On success `out` receives an output handle.
 *
 * # Safety
 * All pointers must be valid handles from this library.
 */
enum StrataStatus strata_run_pipeline(const struct StrataCloud *cloud,
                                      const struct StrataConfig *config,
                                      struct StrataOutput **out);

/**
 * Scaffolding graph document as JSON (caller frees with
 * `strata_string_free`).
 */
char *strata_output_scaffolding_json(const struct StrataOutput *out);

/**
 * Spine graph document as JSON (caller frees with `strata_string_free`).
 */
char *strata_output_spine_json(const struct StrataOutput *out);

/**
 * Human-readable run summary (caller frees with `strata_string_free`).
 */
char *strata_output_summary(const struct StrataOutput *out);

/**
 * Release an output handle; null is a no-op.
 */
void strata_output_free(struct StrataOutput *out);

/**
 * Release a string returned by this library; null is a no-op.
 */
void strata_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRATA_H */
