#ifndef INLS_H
#define INLS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  INLS_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  INLS_STATUS_NULL_POINTER = 1,
  /**
   * Parameters, grid or configuration rejected.
   */
  INLS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation failed numerically.
   */
  INLS_STATUS_NUMERICAL = 3,
  /**
   * File system error.
   */
  INLS_STATUS_IO = 4,
  /**
   * Malformed snapshot.
   */
  INLS_STATUS_FORMAT = 5,
  /**
   * Output buffer too small.
   */
  INLS_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * A verification check failed.
   */
  INLS_STATUS_CHECK_FAILED = 7,
  /**
   * Internal panic caught at the boundary.
   */
  INLS_STATUS_PANIC = 8,
} InlsStatus;

/**
 * Outcome of an evolution run.
 */
typedef enum {
  INLS_TERMINATION_REACHED_T_END = 0,
  INLS_TERMINATION_BLOWUP_DETECTED = 1,
  INLS_TERMINATION_BOUNDARY_CONTAMINATED = 2,
  INLS_TERMINATION_NUMERICAL_FAILURE = 3,
} InlsTermination;

/**
 * Opaque field on a Cartesian grid, with the `b` it belongs to.
 */
typedef struct InlsField InlsField;

/**
 * Opaque ground state.
 */
typedef struct InlsGroundState InlsGroundState;

/**
 * Scalars describing a ground state.
 */
typedef struct {
  uint32_t dim;
  double b;
  double p;
  double psi0;
  double mass_sq;
  double grad_sq;
  double potential_term;
  double j_min;
  double residual;
} InlsGroundStateSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *inls_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t inls_last_error(char *buf, size_t len);

/**
 * Ground state for dimension `dim` and exponent `b` (`b = 0` is the
 * classic equation).
 *
 * # Safety
 * `out` must be valid for a write.
 */
InlsStatus inls_ground_state_new(uint32_t dim, double b, InlsGroundState **out);

/**
 * # Safety
 * `gs` must be null or a handle from [`inls_ground_state_new`] not yet freed.
 */
void inls_ground_state_free(InlsGroundState *gs);

/**
 * # Safety
 * `gs` must be a live handle and `out` valid for a write.
 */
InlsStatus inls_ground_state_summary(const InlsGroundState *gs, InlsGroundStateSummary *out);

/**
 * `psi(r)`.
 *
 * # Safety
 * `gs` must be a live handle and `out` valid for a write.
 */
InlsStatus inls_ground_state_eval(const InlsGroundState *gs, double r, double *out);

/**
 * Closed-form S-family member at time `t` on the cell-centered grid
 * `[-L, L)^N` with `M` points per axis.
 *
 * # Safety
 * `gs` must be a live handle and `out` valid for a write.
 */
InlsStatus inls_field_s_family(const InlsGroundState *gs,
                               double t_blowup,
                               double lambda0,
                               double gamma0,
                               double t,
                               uint32_t points,
                               double extent,
                               InlsField **out);

/**
 * `amplitude exp(-|x|^2 / (2 width^2))` at time 0.
 *
 * # Safety
 * `out` must be valid for a write.
 */
InlsStatus inls_field_gaussian(uint32_t dim,
                               double b,
                               uint32_t points,
                               double extent,
                               double amplitude,
                               double width,
                               InlsField **out);

/**
 * Reads a snapshot file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for a write.
 */
InlsStatus inls_field_load(const char *path, InlsField **out);

/**
 * Writes a snapshot file.
 *
 * # Safety
 * `field` must be a live handle and `path` a NUL-terminated string.
 */
InlsStatus inls_field_save(const InlsField *field, const char *path);

/**
 * # Safety
 * `field` must be null or a live handle.
 */
void inls_field_free(InlsField *field);

/**
 * Number of complex samples, `M^N`; 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t inls_field_len(const InlsField *field);

/**
 * Time stamp of the field; NaN for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
double inls_field_time(const InlsField *field);

/**
 * Copies the samples as interleaved `(re, im)` pairs; `len` counts
 * doubles and must be at least `2 * inls_field_len(field)`.
 *
 * # Safety
 * `field` must be a live handle and `buf` valid for `len` doubles.
 */
InlsStatus inls_field_values(const InlsField *field, double *buf, size_t len);

/**
 * Mass, kinetic and potential parts of the energy. Any output pointer
 * may be null.
 *
 * # Safety
 * `field` must be a live handle; non-null outputs must be valid for writes.
 */
InlsStatus inls_field_functionals(const InlsField *field,
                                  double *mass,
                                  double *kinetic,
                                  double *potential);

/**
 * Evolves `field` to `t_end` with base step `dt0`. A non-positive
 * `grad_threshold` disables blow-up detection. The final state is a new
 * handle in `out`.
 *
 * # Safety
 * `field` must be a live handle; `out` and `termination` valid for writes.
 */
InlsStatus inls_evolve(const InlsField *field,
                       double dt0,
                       double t_end,
                       double grad_threshold,
                       bool adapt,
                       InlsField **out,
                       InlsTermination *termination);

/**
 * Runs the verification suite (`0` quick, `1` default, `2` full) for
 * `N = 1` and the given `b`. Writes the number of checks and failures;
 * returns [`InlsStatus::CheckFailed`] if any check failed.
 *
 * # Safety
 * `total` and `failed` must be valid for writes.
 */
InlsStatus inls_verify(uint32_t suite, double b, size_t *total, size_t *failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INLS_H */
