#ifndef AVLP_RANGE_H
#define AVLP_RANGE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum AvlpStatus {
  AVLP_STATUS_OK = 0,
  AVLP_STATUS_NULL_POINTER = 1,
  AVLP_STATUS_INVALID_INPUT = 2,
  AVLP_STATUS_NUMERICAL = 3,
  AVLP_STATUS_SIZE_CAP = 4,
  // A certificate the computation depends on could not be established.
  AVLP_STATUS_INCONCLUSIVE = 5,
  AVLP_STATUS_PANIC = 6,
} AvlpStatus;

typedef enum AvlpStability {
  AVLP_STABILITY_VERIFIED_NONDEGENERATE = 0,
  AVLP_STABILITY_VERIFIED = 1,
  AVLP_STABILITY_UNKNOWN = 2,
} AvlpStability;

// Opaque interval AVLP.
typedef struct AvlpProblem AvlpProblem;

typedef struct AvlpOptions {
  double tol;
  size_t orthant_cap;
  size_t max_iters;
} AvlpOptions;

typedef struct AvlpRange {
  double best;
  double worst_lower;
  double worst_upper;
  // The worst-case value when it is known exactly, otherwise NaN.
  double worst;
  // Nonzero when the lower bound passed the tightness test.
  int32_t lower_tight;
} AvlpRange;

typedef struct AvlpCertificate {
  enum AvlpStability status;
  // NaN when the check was not reached.
  double primal_margin;
  double dual_margin;
} AvlpCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Default tolerance `1e-9`, orthant cap 16, 50 upper-bound iterations.
struct AvlpOptions avlp_options_default(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next call into the library from this thread.
const char *avlp_last_error_message(void);

const char *avlp_version(void);

// Builds a problem from endpoint arrays: `A` and `D` are `m x n` row-major,
// `b` has length `m`, `c` length `n`.
enum AvlpStatus avlp_problem_new(size_t m,
                                 size_t n,
                                 const double *a_inf,
                                 const double *a_sup,
                                 const double *b_inf,
                                 const double *b_sup,
                                 const double *c_inf,
                                 const double *c_sup,
                                 const double *d_inf,
                                 const double *d_sup,
                                 struct AvlpProblem **out_problem);

// Parses a problem document (the CLI's JSON format).
enum AvlpStatus avlp_problem_from_json(const char *json, struct AvlpProblem **out_problem);

// Releases a problem. NULL is ignored.
void avlp_problem_free(struct AvlpProblem *problem);

enum AvlpStatus avlp_problem_dims(const struct AvlpProblem *problem, size_t *m, size_t *n);

// Best-case optimal value. `x` (length n, may be NULL) receives the
// optimizer, or the start of the ray when the value is `+inf`.
enum AvlpStatus avlp_best_case(const struct AvlpProblem *problem,
                               const struct AvlpOptions *opts,
                               double *value,
                               double *x);

enum AvlpStatus avlp_worst_lower_bound(const struct AvlpProblem *problem,
                                       const struct AvlpOptions *opts,
                                       double *value);

// Iterative upper bound; `iterations` (may be NULL) receives the number of
// realizations solved.
enum AvlpStatus avlp_worst_upper_bound(const struct AvlpProblem *problem,
                                       const struct AvlpOptions *opts,
                                       double *value,
                                       size_t *iterations);

// All range quantities. On a partial failure the missing fields are NaN and
// the status of the first failure is returned.
enum AvlpStatus avlp_range(const struct AvlpProblem *problem,
                           const struct AvlpOptions *opts,
                           struct AvlpRange *result);

// Stability certificate of the basis given by `len` 1-based row indices.
// An unverified basis is reported through `result->status`, not as an error.
enum AvlpStatus avlp_stability(const struct AvlpProblem *problem,
                               const size_t *basis_rows,
                               size_t len,
                               double tol,
                               struct AvlpCertificate *result);

// Best case under stability. Returns `Inconclusive` unless the basis is
// certified.
enum AvlpStatus avlp_best_case_bstable(const struct AvlpProblem *problem,
                                       const size_t *basis_rows,
                                       size_t len,
                                       double tol,
                                       double *value);

// Worst case under nondegenerate stability. `x` (length n, may be NULL)
// receives the solution of the basic absolute value system.
enum AvlpStatus avlp_worst_case_bstable(const struct AvlpProblem *problem,
                                        const size_t *basis_rows,
                                        size_t len,
                                        const struct AvlpOptions *opts,
                                        double *value,
                                        double *x);

// Solves `M x + F |x| = g` with `M`, `F` row-major `n x n`. `unique` (may be
// NULL) is set to 1 when uniqueness was verified.
enum AvlpStatus avlp_solve_gave(size_t n,
                                const double *m,
                                const double *f,
                                const double *g,
                                size_t orthant_cap,
                                double *x,
                                int32_t *unique);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AVLP_RANGE_H */
