#ifndef LGT_H
#define LGT_H

/* Generated by cbindgen from the lgt-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every FFI entry point.
 */
typedef enum LgtStatus {
  LGT_STATUS_OK = 0,
  LGT_STATUS_NULL_ARGUMENT = 1,
  LGT_STATUS_INVALID_ARGUMENT = 2,
  LGT_STATUS_NUMERICAL_FAILURE = 3,
} LgtStatus;

/**
 * Opaque lattice handle.
 */
typedef struct LgtLattice LgtLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the box `{0,…,n-1}^d` with its edge and plaquette enumerations.
 *
 * # Safety
 * `out` must be a valid pointer; the handle must be released with
 * `lgt_lattice_free`.
 */
enum LgtStatus lgt_lattice_new(size_t dimension, size_t side, struct LgtLattice **out);

/**
 * Releases a lattice handle. Passing null is a no-op.
 *
 * # Safety
 * `lat` must come from `lgt_lattice_new` and not have been freed before.
 */
void lgt_lattice_free(struct LgtLattice *lat);

/**
 * Closed-form edge counts `|E_n|`, `|E_n^0|`, `|E_n^1|`.
 *
 * # Safety
 * All pointers must be valid or null (null outputs are skipped).
 */
enum LgtStatus lgt_edge_counts(size_t dimension,
                               size_t side,
                               uint64_t *total,
                               uint64_t *axial,
                               uint64_t *free);

/**
 * `K_{n,d} = -log det M_n^0 / (2 n^d)` for the handle's box.
 *
 * # Safety
 * `lat` must be a live handle and `out` a valid pointer.
 */
enum LgtStatus lgt_knd(const struct LgtLattice *lat, double *out);

/**
 * Maxwell free energy per site `F_M(B_n)`.
 *
 * # Safety
 * `lat` must be a live handle and `out` a valid pointer.
 */
enum LgtStatus lgt_maxwell_free_energy(const struct LgtLattice *lat, double *out);

/**
 * Small-ball limit constant of U(N) near the identity.
 *
 * # Safety
 * `out` must be a valid pointer; `lie_constant` may be null.
 */
enum LgtStatus lgt_small_ball_constant(size_t order, double *out, double *lie_constant);

/**
 * Monte Carlo estimate of `σ(‖I-U‖ ≤ δ)` on U(N) with its standard error.
 *
 * # Safety
 * `p_hat` and `stderr` must be valid pointers.
 */
enum LgtStatus lgt_small_ball_estimate(size_t order,
                                       double delta,
                                       uint64_t samples,
                                       uint64_t seed,
                                       double *p_hat,
                                       double *stderr);

/**
 * Exact two-dimensional U(1) free energy per site,
 * `(n-1)²/n² · log(e^{-β} I₀(β))`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum LgtStatus lgt_exact_2d_free_energy(size_t side, double beta, double *out);

/**
 * Leading-term constant `(d-1) log(∏ j!/(2π)^{N/2}) + N² K_d`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum LgtStatus lgt_theorem1_prediction(size_t dimension, size_t order, double kd, double *out);

/**
 * Library version as a NUL-terminated string; free with
 * `lgt_string_free`.
 */
char *lgt_version(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed before.
 */
void lgt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LGT_H */
