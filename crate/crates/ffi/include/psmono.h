/* Generated by cbindgen; do not edit. */

#ifndef PSMONO_H
#define PSMONO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsmStatus {
  PSM_STATUS_OK = 0,
  PSM_STATUS_NULL_POINTER = 1,
  PSM_STATUS_INVALID_UTF8 = 2,
  PSM_STATUS_DIMENSION = 3,
  PSM_STATUS_SINGULARITY = 4,
  PSM_STATUS_DOMAIN = 5,
  PSM_STATUS_INDEX_OUT_OF_RANGE = 6,
  PSM_STATUS_PARSE = 7,
  PSM_STATUS_KIND_MISMATCH = 8,
  PSM_STATUS_NOT_MONOGENIC = 9,
  PSM_STATUS_DEGREE_CAP = 10,
  PSM_STATUS_UNSUPPORTED = 11,
  PSM_STATUS_POLE = 12,
  PSM_STATUS_CONDITIONING = 13,
  PSM_STATUS_REFUSED = 14,
  PSM_STATUS_JSON = 15,
  PSM_STATUS_IO = 16,
  PSM_STATUS_PANIC = 99,
} PsmStatus;

/**
 * Clifford algebra element.
 */
typedef struct PsmMultivector PsmMultivector;

/**
 * Polynomial with Clifford coefficients.
 */
typedef struct PsmPolynomial PsmPolynomial;

/**
 * Vahlen matrix together with its provenance.
 */
typedef struct PsmVahlen PsmVahlen;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *psm_last_error(void);

void psm_clear_error(void);

/**
 * # Safety
 * `s` must come from this library or be NULL.
 */
void psm_string_free(char *s);

/**
 * Build an element of R_n from 2^n coefficients indexed by blade bitmask.
 *
 * # Safety
 * `coeffs` must point to `len` doubles; `out` must be writable.
 */
enum PsmStatus psm_mv_new(size_t n, const double *coeffs, size_t len, struct PsmMultivector **out);

/**
 * Parse text such as `2 + 6*e2 - 3*e12` in R_n.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PsmStatus psm_mv_parse(size_t n, const char *text, struct PsmMultivector **out);

/**
 * # Safety
 * `mv` must come from this library or be NULL.
 */
void psm_mv_free(struct PsmMultivector *mv);

/**
 * Number of generators n; 0 for NULL.
 *
 * # Safety
 * `mv` must be a live handle or NULL.
 */
size_t psm_mv_dim(const struct PsmMultivector *mv);

/**
 * Copy the 2^n coefficients into `out`, which holds `len` doubles.
 *
 * # Safety
 * `mv` must be a live handle; `out` must hold `len` doubles.
 */
enum PsmStatus psm_mv_coeffs(const struct PsmMultivector *mv, double *out, size_t len);

/**
 * Geometric product a b.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum PsmStatus psm_mv_mul(const struct PsmMultivector *a,
                          const struct PsmMultivector *b,
                          struct PsmMultivector **out);

/**
 * Text form; release with `psm_string_free`.
 *
 * # Safety
 * `mv` must be a live handle; `out` must be writable.
 */
enum PsmStatus psm_mv_to_string(const struct PsmMultivector *mv, char **out);

/**
 * Slice Fueter polynomial P_k for slice unit `eta` (q components).
 *
 * # Safety
 * `k` holds `p + 1` entries, `eta` holds `q`; `out` must be writable.
 */
enum PsmStatus psm_fueter_polynomial(size_t p,
                                     size_t q,
                                     const uint32_t *k,
                                     const double *eta,
                                     bool right,
                                     struct PsmPolynomial **out);

/**
 * # Safety
 * `poly` must come from this library or be NULL.
 */
void psm_poly_free(struct PsmPolynomial *poly);

/**
 * Evaluate at `len` coordinates (slice or full, matching the polynomial).
 *
 * # Safety
 * `poly` must be a live handle, `x` must hold `len` doubles.
 */
enum PsmStatus psm_poly_evaluate(const struct PsmPolynomial *poly,
                                 const double *x,
                                 size_t len,
                                 struct PsmMultivector **out);

/**
 * JSON form; release with `psm_string_free`.
 *
 * # Safety
 * `poly` must be a live handle; `out` must be writable.
 */
enum PsmStatus psm_poly_to_json(const struct PsmPolynomial *poly, char **out);

/**
 * Fueter polynomial in full variables, P_k evaluated at x (p + q + 1 coordinates).
 *
 * # Safety
 * `k` holds `p + 1` entries, `x` holds `p + q + 1`; `out` must be writable.
 */
enum PsmStatus psm_fueter_eval_full(size_t p,
                                    size_t q,
                                    const uint32_t *k,
                                    const double *x,
                                    bool right,
                                    struct PsmMultivector **out);

/**
 * Cauchy kernel E at x (p + q + 1 coordinates).
 *
 * # Safety
 * `x` holds `p + q + 1` doubles; `out` must be writable.
 */
enum PsmStatus psm_kernel_e(size_t p, size_t q, const double *x, struct PsmMultivector **out);

/**
 * Slice Cauchy kernel S(y, x); `y` and `x` hold p + q + 1 doubles each.
 *
 * # Safety
 * Pointers as documented; `out` must be writable.
 */
enum PsmStatus psm_slice_cauchy_kernel(size_t p,
                                       size_t q,
                                       const double *y,
                                       const double *x,
                                       bool right,
                                       struct PsmMultivector **out);

/**
 * Generator matrix from text: `translation:1,0`, `rotation:e2`, `inversion`, `dilation:2`.
 *
 * # Safety
 * `generator` must be NUL-terminated; `out` must be writable.
 */
enum PsmStatus psm_mobius_generator(size_t p,
                                    size_t q,
                                    const char *generator,
                                    struct PsmVahlen **out);

/**
 * Matrix product a b.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum PsmStatus psm_mobius_mul(const struct PsmVahlen *a,
                              const struct PsmVahlen *b,
                              struct PsmVahlen **out);

/**
 * # Safety
 * `m` must come from this library or be NULL.
 */
void psm_vahlen_free(struct PsmVahlen *m);

/**
 * Image of the paravector x; `x` and `out` hold `len` = n + 1 doubles.
 *
 * # Safety
 * `m` must be a live handle; `x`, `out` hold `len` doubles.
 */
enum PsmStatus psm_mobius_apply(const struct PsmVahlen *m,
                                const double *x,
                                double *out,
                                size_t len);

/**
 * Conformal weight J(M, x) for dimension parameter p.
 *
 * # Safety
 * `m` must be a live handle; `x` holds `len` doubles; `out` must be writable.
 */
enum PsmStatus psm_mobius_jacobian(const struct PsmVahlen *m,
                                   const double *x,
                                   size_t len,
                                   size_t p,
                                   struct PsmMultivector **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSMONO_H */
