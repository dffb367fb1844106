#ifndef QUKIT_H
#define QUKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QkStatus {
  QK_STATUS_OK = 0,
  QK_STATUS_NULL_POINTER = 1,
  QK_STATUS_INDEX = 2,
  QK_STATUS_SHAPE = 3,
  QK_STATUS_DEGENERATE_INPUT = 4,
  QK_STATUS_SIZE = 5,
  QK_STATUS_CHART_SINGULARITY = 6,
  QK_STATUS_WITNESS_FAILURE = 7,
  QK_STATUS_INVALID_PARAM = 8,
  QK_STATUS_FORMAT = 9,
  QK_STATUS_IO = 10,
  QK_STATUS_PANIC = 11,
} QkStatus;

/**
 * Full-space state handle.
 */
typedef struct QkState QkState;

/**
 * Compressed symmetric state handle.
 */
typedef struct QkSymState QkSymState;

typedef struct QkComplex {
  double re;
  double im;
} QkComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *qk_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from a `qk_*_to_json` call, or be NULL.
 */
void qk_string_free(char *s);

/**
 * Builds a state from `len = K^N` amplitudes in basis-index order.
 *
 * # Safety
 * `amps` must point to `len` readable values; `out` must be writable.
 */
enum QkStatus qk_state_new(size_t n_sites,
                           size_t local_dim,
                           const struct QkComplex *amps,
                           size_t len,
                           struct QkState **out);

/**
 * # Safety
 * `state` must come from this library and not be used afterwards, or be NULL.
 */
void qk_state_free(struct QkState *state);

/**
 * Number of sites, or 0 for NULL.
 *
 * # Safety
 * `state` must be a live handle or NULL.
 */
size_t qk_state_n_sites(const struct QkState *state);

/**
 * Local dimension, or 0 for NULL.
 *
 * # Safety
 * `state` must be a live handle or NULL.
 */
size_t qk_state_local_dim(const struct QkState *state);

/**
 * Number of amplitudes K^N, or 0 for NULL.
 *
 * # Safety
 * `state` must be a live handle or NULL.
 */
size_t qk_state_dim(const struct QkState *state);

/**
 * Copies the amplitudes into `out`, which must hold exactly `qk_state_dim` entries.
 *
 * # Safety
 * `state` must be a live handle; `out` must point to `len` writable values.
 */
enum QkStatus qk_state_amps(const struct QkState *state, struct QkComplex *out, size_t len);

/**
 * Normalized Dicke state for `local_dim` occupation counts.
 *
 * # Safety
 * `counts` must point to `local_dim` readable values; `out` must be writable.
 */
enum QkStatus qk_dicke(const size_t *counts, size_t local_dim, struct QkState **out);

/**
 * Coherent state as the N-fold product of the site state built from
 * `tau_2..tau_K` (`tau_len = K - 1`).
 *
 * # Safety
 * `tau` must point to `tau_len` readable values; `out` must be writable.
 */
enum QkStatus qk_coherent_product(size_t n_sites,
                                  size_t local_dim,
                                  const struct QkComplex *tau,
                                  size_t tau_len,
                                  struct QkState **out);

/**
 * Coherent state from the displacement exponential with `eta_2..eta_K`.
 *
 * # Safety
 * `eta` must point to `eta_len` readable values; `out` must be writable.
 */
enum QkStatus qk_coherent_displace(size_t n_sites,
                                   size_t local_dim,
                                   const struct QkComplex *eta,
                                   size_t eta_len,
                                   struct QkState **out);

/**
 * Product-state test. `out_defect` may be NULL.
 *
 * # Safety
 * `state` must be a live handle; `out_product` must be writable.
 */
enum QkStatus qk_is_product(const struct QkState *state,
                            double tol,
                            bool *out_product,
                            double *out_defect);

/**
 * Singular-value product test, limited to K^N <= 4096.
 *
 * # Safety
 * `state` must be a live handle; `out_product` must be writable.
 */
enum QkStatus qk_brute_force_is_product(const struct QkState *state, double tol, bool *out_product);

/**
 * Parses a full-space or compressed state file. Exactly one of `out_state`
 * and `out_sym` is set to a new handle; the other is set to NULL.
 *
 * # Safety
 * `json` must be a NUL-terminated string; both outputs must be writable.
 */
enum QkStatus qk_parse_json(const char *json,
                            struct QkState **out_state,
                            struct QkSymState **out_sym);

/**
 * Serializes a state; release the result with `qk_string_free`.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_state_to_json(const struct QkState *state, char **out);

/**
 * Orthogonal projection onto the symmetric subspace. `out_residual`
 * (distance to the subspace) may be NULL.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_project_symmetric(const struct QkState *state,
                                   struct QkSymState **out,
                                   double *out_residual);

/**
 * Builds a compressed state from unnormalized Dicke coefficients in
 * canonical occupation order (`len = dim S`).
 *
 * # Safety
 * `coeffs` must point to `len` readable values; `out` must be writable.
 */
enum QkStatus qk_sym_new(size_t n_sites,
                         size_t local_dim,
                         const struct QkComplex *coeffs,
                         size_t len,
                         struct QkSymState **out);

/**
 * # Safety
 * `sym` must come from this library and not be used afterwards, or be NULL.
 */
void qk_sym_free(struct QkSymState *sym);

/**
 * Number of coefficients dim S, or 0 for NULL.
 *
 * # Safety
 * `sym` must be a live handle or NULL.
 */
size_t qk_sym_dim(const struct QkSymState *sym);

/**
 * Copies the unnormalized coefficients into `out` (`len = dim S`).
 *
 * # Safety
 * `sym` must be a live handle; `out` must point to `len` writable values.
 */
enum QkStatus qk_sym_coeffs(const struct QkSymState *sym, struct QkComplex *out, size_t len);

/**
 * Expands to the full space, subject to the K^N size guard.
 *
 * # Safety
 * `sym` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_sym_expand(const struct QkSymState *sym, struct QkState **out);

/**
 * Serializes a compressed state; release the result with `qk_string_free`.
 *
 * # Safety
 * `sym` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_sym_to_json(const struct QkSymState *sym, char **out);

/**
 * Coherent-or-entangled test on compressed coefficients. `out_defect` may be NULL.
 *
 * # Safety
 * `sym` must be a live handle; `out_coherent` must be writable.
 */
enum QkStatus qk_classify_symmetric(const struct QkSymState *sym,
                                    double tol,
                                    bool *out_coherent,
                                    double *out_defect);

/**
 * Finds a Dicke state overlapping the product of `n_sites` factors, each of
 * `local_dim` entries stored site after site. Writes the occupation to
 * `out_counts` (`local_dim` entries) and the overlap to `out_overlap`.
 *
 * # Safety
 * `factors` must point to `n_sites * local_dim` readable values; outputs must be writable.
 */
enum QkStatus qk_symmetric_witness(const struct QkComplex *factors,
                                   size_t n_sites,
                                   size_t local_dim,
                                   double tol,
                                   size_t *out_counts,
                                   struct QkComplex *out_overlap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUKIT_H */
