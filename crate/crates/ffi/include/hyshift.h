#ifndef HYSHIFT_H
#define HYSHIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HyStatus {
  HY_STATUS_OK = 0,
  HY_STATUS_NULL_POINTER = 1,
  HY_STATUS_INVALID_UTF8 = 2,
  HY_STATUS_PARSE = 3,
  HY_STATUS_DOMAIN = 4,
  HY_STATUS_INVALID_CERTIFICATE = 5,
  HY_STATUS_OVERFLOW = 6,
  HY_STATUS_IO = 7,
  HY_STATUS_PANIC = 8,
} HyStatus;

typedef enum HyOutcome {
  HY_OUTCOME_HAS_SUBSPACE = 0,
  HY_OUTCOME_NO_SUBSPACE = 1,
  HY_OUTCOME_NOT_HYPERCYCLIC = 2,
  HY_OUTCOME_UNKNOWN_AT_HORIZON = 3,
  HY_OUTCOME_BOUNDARY = 4,
} HyOutcome;

/**
 * Opaque sequence space.
 */
typedef struct HySpace HySpace;

/**
 * Opaque weight sequence.
 */
typedef struct HyWeights HyWeights;

/**
 * Horizons for `hy_analyze`; zero fields take the defaults.
 */
typedef struct HyHorizons {
  size_t j_max;
  size_t m_max;
  size_t n_max;
  int64_t k_horizon;
} HyHorizons;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *hy_last_error(void);

/**
 * Parses a weight spec such as `const:2` or `periodic:[1,3]`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HyStatus hy_weights_parse(const char *spec, struct HyWeights **out);

/**
 * # Safety
 * `w` must come from `hy_weights_parse` and not be freed twice; null is ignored.
 */
void hy_weights_free(struct HyWeights *w);

/**
 * Parses a space spec such as `lp:2` or `entire`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HyStatus hy_space_parse(const char *spec, struct HySpace **out);

/**
 * # Safety
 * `s` must come from `hy_space_parse` and not be freed twice; null is ignored.
 */
void hy_space_free(struct HySpace *s);

/**
 * `ln prod_{v=1..n} |w_{k+v}|`.
 *
 * # Safety
 * `w` must be a live handle and `out` a valid pointer.
 */
enum HyStatus hy_window_log(const struct HyWeights *w, size_t n, int64_t k, double *out);

/**
 * Runs the subspace verdict. `outcome` receives the verdict; when `json` is not
 * null it receives the full JSON report, to be released with `hy_string_free`.
 * `horizons` may be null for the defaults.
 *
 * # Safety
 * `w` and `s` must be live handles; `outcome` must be valid; `json` and
 * `horizons` may be null.
 */
enum HyStatus hy_analyze(const struct HyWeights *w,
                         const struct HySpace *s,
                         const struct HyHorizons *horizons,
                         enum HyOutcome *outcome,
                         char **json);

/**
 * # Safety
 * `s` must come from this library and not be freed twice; null is ignored.
 */
void hy_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYSHIFT_H */
