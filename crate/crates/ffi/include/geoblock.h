/* C interface to the geoblock library. All strings are UTF-8 and NUL-terminated. */

#ifndef GEOBLOCK_H
#define GEOBLOCK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  GB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GB_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  GB_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed number, vector or matrix.
   */
  GB_STATUS_PARSE = 3,
  /**
   * Well-formed but unusable input (dimensions, singular data, ...).
   */
  GB_STATUS_INVALID_INPUT = 4,
  /**
   * The optimizer exceeded its node budget.
   */
  GB_STATUS_BUDGET_EXHAUSTED = 5,
  /**
   * An eigenvalue gap fell in the guard band around the clustering threshold.
   */
  GB_STATUS_ILL_CONDITIONED = 6,
  GB_STATUS_PANIC = 7,
} GbStatus;

typedef enum {
  GB_SPACE_SPHERE = 0,
  GB_SPACE_REAL_PROJECTIVE = 1,
  GB_SPACE_COMPLEX_PROJECTIVE = 2,
  GB_SPACE_QUATERNIONIC_PROJECTIVE = 3,
  GB_SPACE_CAYLEY_PLANE = 4,
} GbSpace;

typedef enum {
  GB_SECURITY_SECURE = 0,
  GB_SECURITY_INSECURE = 1,
  GB_SECURITY_UNDETERMINED = 2,
} GbSecurity;

/**
 * A finite set of torus points.
 */
typedef struct GbBlockingSet GbBlockingSet;

/**
 * A configuration `{x, y}` on a flat torus, with exact rational data.
 */
typedef struct GbTorusConfig GbTorusConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *gb_last_error(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gb_string_free(char *s);

/**
 * Parses `x:y` (coordinates `p/q` separated by commas). `basis` (rows
 * separated by `;`, the lattice is generated by its columns) and `gram`
 * may be null for the standard lattice and inner product.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
GbStatus gb_torus_config_parse(const char *config,
                               const char *basis,
                               const char *gram,
                               GbTorusConfig **out);

/**
 * # Safety
 * `cfg` must be null or a live handle from [`gb_torus_config_parse`].
 */
void gb_torus_config_free(GbTorusConfig *cfg);

/**
 * Torus dimension, or 0 for a null handle.
 *
 * # Safety
 * `cfg` must be null or a live handle.
 */
size_t gb_torus_config_dim(const GbTorusConfig *cfg);

/**
 * The canonical midpoint blocking set (`2^n` points, `2^n - 1` for `{x, x}`).
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
GbStatus gb_midpoint_set(const GbTorusConfig *cfg, GbBlockingSet **out);

/**
 * Parses points separated by `;` on the torus of `cfg`.
 *
 * # Safety
 * `cfg` must be a live handle, `points` NUL-terminated, `out` writable.
 */
GbStatus gb_blocking_set_parse(const GbTorusConfig *cfg, const char *points, GbBlockingSet **out);

/**
 * # Safety
 * `set` must be null or a live handle.
 */
void gb_blocking_set_free(GbBlockingSet *set);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t gb_blocking_set_len(const GbBlockingSet *set);

/**
 * Point `index` as `p/q` coordinates separated by commas; free the result
 * with [`gb_string_free`].
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
GbStatus gb_blocking_set_point(const GbBlockingSet *set, size_t index, char **out);

/**
 * Checks `set` against every connecting geodesic of `cfg`, of any length.
 *
 * # Safety
 * Handles must be live; `blocked` must be writable.
 */
GbStatus gb_verify_universal(const GbTorusConfig *cfg, const GbBlockingSet *set, bool *blocked);

/**
 * Checks `set` against the connecting geodesics of length at most `length`
 * (a rational such as `"7/2"`).
 *
 * # Safety
 * Handles must be live, `length` NUL-terminated, `blocked` writable.
 */
GbStatus gb_verify_bounded(const GbTorusConfig *cfg,
                           const GbBlockingSet *set,
                           const char *length,
                           bool *blocked);

/**
 * Certified minimum blocking set for geodesics up to `length`. A
 * `node_budget` of 0 selects the default. `witness` may be null.
 *
 * # Safety
 * `cfg` must be live, `length` NUL-terminated, `optimum` writable, and
 * `witness` null or writable.
 */
GbStatus gb_min_block(const GbTorusConfig *cfg,
                      const char *length,
                      uint64_t node_budget,
                      size_t *optimum,
                      GbBlockingSet **witness);

/**
 * Classifies `{x, y}` on a compact rank-one space. Points are unit vectors
 * of length `len` in the sphere model (for projective spaces a
 * representative); `n` is the dimension parameter, and for spheres and
 * real projective spaces must equal `len - 1`.
 *
 * # Safety
 * `x` and `y` must point to `len` doubles; `status` must be writable.
 */
GbStatus gb_sphere_classify(GbSpace space,
                            size_t n,
                            const double *x,
                            const double *y,
                            size_t len,
                            GbSecurity *status);

/**
 * Classifies `{k1, k2}` in SU(n). Matrices use the CLI syntax: `I`, `-I`,
 * `scalar(θ)`, `diag(θ_1,…,θ_n)` or rows of complex entries. `defect_out`
 * may be null.
 *
 * # Safety
 * Strings must be NUL-terminated; `status` writable; `defect_out` null or
 * writable.
 */
GbStatus gb_group_classify(size_t n,
                           const char *k1,
                           const char *k2,
                           GbSecurity *status,
                           size_t *defect_out);

/**
 * Runs the command line `argv[0..argc]` (without a program name) and
 * returns its exit code; the JSON report is written to `report` unless it
 * is null. Returns 2 and sets the last error when the arguments are unusable,
 * and -1 after an internal panic.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings; `report` null or writable.
 */
int32_t gb_run(const char *const *argv, size_t argc, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOBLOCK_H */
