#ifndef DP_FFI_H
#define DP_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DpStatus {
  DP_STATUS_OK = 0,
  DP_STATUS_NULL_POINTER = 1,
  DP_STATUS_INVALID_ARGUMENT = 2,
  DP_STATUS_PARSE = 3,
  DP_STATUS_IO = 4,
  DP_STATUS_NUMERICAL = 5,
  /**
   * No grid point satisfies the breaking criterion.
   */
  DP_STATUS_NO_HIT = 6,
  DP_STATUS_PANIC = 7,
} DpStatus;

typedef enum DpClassification {
  DP_CLASSIFICATION_COMPLETED = 0,
  DP_CLASSIFICATION_WAVE_BREAKING = 1,
  DP_CLASSIFICATION_INDETERMINATE = 2,
} DpClassification;

typedef enum DpLiouville {
  DP_LIOUVILLE_IDENTICALLY_FLAT = 0,
  DP_LIOUVILLE_SEPARATED = 1,
  DP_LIOUVILLE_TOUCHING = 2,
} DpLiouville;

/**
 * Opaque periodic field on a uniform grid.
 */
typedef struct DpField DpField;

/**
 * Opaque parsed scenario.
 */
typedef struct DpScenario DpScenario;

typedef struct DpBlowupBound {
  double a_star;
  double h0_max;
  double t_bound;
} DpBlowupBound;

/**
 * Absent values are NaN; `riccati_passed` is -1 when no audit ran.
 */
typedef struct DpRunSummary {
  enum DpClassification classification;
  int32_t exit_code;
  double t_detect;
  double x_detect;
  double t_final;
  double a_star;
  double t_bound;
  double min_slope;
  double mean_drift;
  double flow_invariant_error;
  double min_momentum;
  enum DpLiouville liouville;
  bool contradiction;
  int32_t riccati_passed;
} DpRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *dp_last_error_message(void);

/**
 * Copies `n` samples into a new field. `n` must be even and at least 8.
 *
 * # Safety
 * `values` must point to `n` readable doubles; `out` must be writable.
 */
enum DpStatus dp_field_new(const double *values, size_t n, struct DpField **out);

/**
 * # Safety
 * `field` must come from this library and not have been freed; null is
 * ignored.
 */
void dp_field_free(struct DpField *field);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t dp_field_len(const struct DpField *field);

/**
 * # Safety
 * `field` must be a live handle and `out` must have room for `len` doubles.
 */
enum DpStatus dp_field_copy_values(const struct DpField *field, double *out, size_t len);

double dp_kernel_p(double x);

/**
 * `min (p - |beta| |p_x|)` over `samples` points of a period (at least 64).
 *
 * # Safety
 * `out` must be writable.
 */
enum DpStatus dp_kernel_positivity_margin(double beta, size_t samples, double *out);

/**
 * `(1 - ∂²)⁻¹ field`, i.e. convolution with the kernel.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable. The result is a
 * new handle owned by the caller.
 */
enum DpStatus dp_helmholtz_inverse(const struct DpField *field, struct DpField **out);

/**
 * # Safety
 * As for [`dp_helmholtz_inverse`].
 */
enum DpStatus dp_ddx(const struct DpField *field, struct DpField **out);

/**
 * `u - u_xx`.
 *
 * # Safety
 * As for [`dp_helmholtz_inverse`].
 */
enum DpStatus dp_momentum(const struct DpField *field, struct DpField **out);

/**
 * Time derivative of the field under the equation with dispersion `kappa`.
 *
 * # Safety
 * As for [`dp_helmholtz_inverse`].
 */
enum DpStatus dp_rhs(const struct DpField *field, double kappa, bool dealias, struct DpField **out);

/**
 * Trigonometric interpolant of the field at any `x`.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum DpStatus dp_interp_eval(const struct DpField *field, double x, double *out);

/**
 * Lifespan bound from the best admissible grid point; `DP_STATUS_NO_HIT`
 * when there is none.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum DpStatus dp_blowup_bound(const struct DpField *field, double kappa, struct DpBlowupBound *out);

/**
 * Parses scenario text in the `key = value` format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum DpStatus dp_scenario_parse(const char *text, struct DpScenario **out);

/**
 * # Safety
 * `scenario` must come from [`dp_scenario_parse`]; null is ignored.
 */
void dp_scenario_free(struct DpScenario *scenario);

/**
 * Sets the directory the CSV files are written to.
 *
 * # Safety
 * `scenario` must be a live handle and `dir` a NUL-terminated string.
 */
enum DpStatus dp_scenario_set_output_dir(struct DpScenario *scenario, const char *dir);

/**
 * Runs the scenario. With `write_files`, `fields.csv`, `trace.csv` and
 * `summary.csv` are written to its output directory.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum DpStatus dp_scenario_run(const struct DpScenario *scenario,
                              bool write_files,
                              struct DpRunSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DP_FFI_H */
