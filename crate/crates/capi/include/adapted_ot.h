#ifndef ADAPTED_OT_H
#define ADAPTED_OT_H

/* Generated by cbindgen from adapted-ot-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum {
  AOT_STATUS_OK = 0,
  AOT_STATUS_INVALID_ARGUMENT = 1,
  AOT_STATUS_PRECONDITION = 2,
  AOT_STATUS_IO = 3,
  AOT_STATUS_PARSE = 4,
  AOT_STATUS_UNSUPPORTED_PREFIX = 5,
  AOT_STATUS_STATE_SPACE_TOO_LARGE = 6,
  AOT_STATUS_REDUCIBLE_CHAIN = 7,
  AOT_STATUS_SHAPE_MISMATCH = 8,
  AOT_STATUS_NULL_POINTER = 9,
  AOT_STATUS_INTERNAL = 10,
} AotStatus;

/**
 * A finitely supported path measure (opaque).
 */
typedef struct AotPathMeasure AotPathMeasure;

/**
 * An observed sample of paths (opaque).
 */
typedef struct AotPathSample AotPathSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the underlying library as a static NUL-terminated string.
 */
const char *aot_version(void);

/**
 * Copies the last error message of the current thread into `buffer`
 * (truncating) and returns the full message length in bytes, excluding the
 * terminator. A zero `capacity` only queries the length.
 *
 * # Safety
 * `buffer` must point to at least `capacity` writable bytes, unless
 * `capacity` is zero.
 */
uintptr_t aot_last_error_message(char *buffer, uintptr_t capacity);

/**
 * Reads a path sample from a CSV file (`path_id,t,x_1,...,x_d`).
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be a valid pointer slot.
 */
AotStatus aot_path_sample_read_csv(const char *path, AotPathSample **out);

/**
 * Releases a path sample handle. Null is ignored.
 *
 * # Safety
 * `sample` must have been produced by this library and not freed before.
 */
void aot_path_sample_free(AotPathSample *sample);

/**
 * Number of paths in the sample; zero on a null handle.
 *
 * # Safety
 * `sample` must be a live handle or null.
 */
uintptr_t aot_path_sample_len(const AotPathSample *sample);

/**
 * Reads a path measure from a CSV file (`path_id,t,x_1,...,x_d[,weight]`).
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be a valid pointer slot.
 */
AotStatus aot_measure_read_csv(const char *path, AotPathMeasure **out);

/**
 * Writes a path measure to a CSV file.
 *
 * # Safety
 * `measure` must be a live handle; `path` must be NUL-terminated.
 */
AotStatus aot_measure_write_csv(const AotPathMeasure *measure, const char *path);

/**
 * Releases a measure handle. Null is ignored.
 *
 * # Safety
 * `measure` must have been produced by this library and not freed before.
 */
void aot_measure_free(AotPathMeasure *measure);

/**
 * Number of support paths of a measure; zero on a null handle.
 *
 * # Safety
 * `measure` must be a live handle or null.
 */
uintptr_t aot_measure_len(const AotPathMeasure *measure);

/**
 * Empirical measure of a sample (atoms at distinct observed paths).
 *
 * # Safety
 * `sample` must be a live handle; `out` must be a valid pointer slot.
 */
AotStatus aot_empirical_measure(const AotPathSample *sample, AotPathMeasure **out);

/**
 * Adapted empirical measure of a sample (grid-quantized paths).
 *
 * # Safety
 * `sample` must be a live handle; `out` must be a valid pointer slot.
 */
AotStatus aot_adapted_empirical_measure(const AotPathSample *sample, AotPathMeasure **out);

/**
 * Adapted Wasserstein distance between two measures.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must point to a writable f64.
 */
AotStatus aot_aw_distance(const AotPathMeasure *a, const AotPathMeasure *b, double *out);

/**
 * Adapted distance between a reference measure and the adapted empirical
 * measure built from the sample.
 *
 * # Safety
 * `sample` and `reference` must be live handles; `out` must be writable.
 */
AotStatus aot_estimate_aw(const AotPathSample *sample,
                          const AotPathMeasure *reference,
                          double *out);

/**
 * Grid edge length for the adapted empirical measure.
 *
 * # Safety
 * `out` must point to a writable f64.
 */
AotStatus aot_grid_resolution(uintptr_t n_samples, uintptr_t dim, uintptr_t horizon, double *out);

/**
 * Smoothing bandwidth used by the smoothed estimator.
 *
 * # Safety
 * `out` must point to a writable f64.
 */
AotStatus aot_smoothing_sigma(uintptr_t n_samples, uintptr_t dim, uintptr_t horizon, double *out);

/**
 * Uniform convergence rate for compact laws.
 *
 * # Safety
 * `out` must point to a writable f64.
 */
AotStatus aot_rate_inf(uintptr_t n, uintptr_t dim, uintptr_t horizon, double *out);

/**
 * Closed-form mixing bound for memory-chain observations.
 *
 * # Safety
 * `out` must point to a writable f64.
 */
AotStatus aot_eta_bound_memory_chain(double rho, uintptr_t lag, uintptr_t s, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADAPTED_OT_H */
