#ifndef THETA_ENTROPY_H
#define THETA_ENTROPY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum TeStatus {
  TeStatus_Ok = 0,
  TeStatus_NullPointer = 1,
  TeStatus_InvalidArgument = 2,
  TeStatus_ResourceCap = 3,
  TeStatus_Infeasible = 4,
  TeStatus_BufferTooSmall = 5,
  TeStatus_Panic = 6,
} TeStatus;

typedef struct TeMetric TeMetric;

typedef struct TeSystem TeSystem;

typedef struct TeTarget TeTarget;

typedef struct TeBracket {
  double lo;
  double hi;
  bool exact;
} TeBracket;

typedef struct TeRootRow {
  uintptr_t n;
  double alpha_lo;
  double alpha_hi;
  bool exact;
} TeRootRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
uintptr_t te_last_error(char *buf, uintptr_t len);

/**
 * Shift-power system: `preperiod` steps followed by a repeating `period`.
 *
 * # Safety
 * Arrays must be valid for their lengths; `out` must be writable.
 */
enum TeStatus te_system_shifts(uintptr_t alphabet,
                               const uint32_t *preperiod,
                               uintptr_t preperiod_len,
                               const uint32_t *period,
                               uintptr_t period_len,
                               struct TeSystem **out);

/**
 * # Safety
 * `system` must come from this library and not be used afterwards.
 */
void te_system_free(struct TeSystem *system);

/**
 * # Safety
 * `out` must be writable.
 */
enum TeStatus te_target_whole(struct TeTarget **out);

/**
 * Points equal to `tail` outside `(-k_max, k_max)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TeStatus te_target_family(uint16_t tail, int64_t k_max, struct TeTarget **out);

/**
 * A single point: `left` before `start`, `core` from `start`, `right` after.
 *
 * # Safety
 * `core` must be valid for `core_len` symbols; `out` must be writable.
 */
enum TeStatus te_target_point(uint16_t left,
                              uint16_t right,
                              const uint16_t *core,
                              uintptr_t core_len,
                              int64_t start,
                              struct TeTarget **out);

/**
 * # Safety
 * `target` must come from this library and not be used afterwards.
 */
void te_target_free(struct TeTarget *target);

/**
 * Finite metric system with one map; `dist` is row-major `points × points`.
 *
 * # Safety
 * `dist` must hold `points²` values and `map` `points` indices.
 */
enum TeStatus te_metric_new(uintptr_t points,
                            const double *dist,
                            const uintptr_t *map,
                            struct TeMetric **out);

/**
 * # Safety
 * `metric` must come from this library and not be used afterwards.
 */
void te_metric_free(struct TeMetric *metric);

/**
 * Writes the cumulative shift offsets `k_0 .. k_{j_max}` into `out`.
 *
 * # Safety
 * `out` must be valid for `out_len` values.
 */
enum TeStatus te_cumulative_offsets(const struct TeSystem *system,
                                    uintptr_t j_max,
                                    int64_t *out,
                                    uintptr_t out_len);

/**
 * Cover cost `M` at `alpha` for the window of `n` and `θ = numer/denom`;
 * `length_cap = 0` means no cap (required nonzero when `θ = 0`).
 *
 * # Safety
 * Handles must be valid; `out` must be writable.
 */
enum TeStatus te_m_value(const struct TeSystem *system,
                         const struct TeTarget *target,
                         uint32_t radius,
                         double alpha,
                         uintptr_t n,
                         uint64_t theta_numer,
                         uint64_t theta_denom,
                         uintptr_t length_cap,
                         struct TeBracket *out);

/**
 * Interval containing the `α` with `M = 1` for one window.
 *
 * # Safety
 * Handles must be valid; `out` must be writable.
 */
enum TeStatus te_alpha_root(const struct TeSystem *system,
                            const struct TeTarget *target,
                            uint32_t radius,
                            uintptr_t n,
                            uint64_t theta_numer,
                            uint64_t theta_denom,
                            uintptr_t length_cap,
                            struct TeBracket *out);

/**
 * As [`te_alpha_root`] for a subset of a finite metric system at scale `eps`.
 *
 * # Safety
 * `subset` must be valid for `subset_len` indices; `out` must be writable.
 */
enum TeStatus te_metric_alpha_root(const struct TeMetric *metric,
                                   const uintptr_t *subset,
                                   uintptr_t subset_len,
                                   double eps,
                                   uintptr_t n,
                                   uint64_t theta_numer,
                                   uint64_t theta_denom,
                                   uintptr_t length_cap,
                                   struct TeBracket *out);

/**
 * Per-`N` roots for `N = n_min ..= n_max` into `rows` (which must hold
 * `n_max - n_min + 1` entries) and the tail statistics.
 *
 * # Safety
 * Handles must be valid; `rows` valid for `rows_len`; tails writable.
 */
enum TeStatus te_estimate(const struct TeSystem *system,
                          const struct TeTarget *target,
                          uint32_t radius,
                          uint64_t theta_numer,
                          uint64_t theta_denom,
                          uintptr_t n_min,
                          uintptr_t n_max,
                          struct TeRootRow *rows,
                          uintptr_t rows_len,
                          double *tail_lo,
                          double *tail_hi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THETA_ENTROPY_H */
