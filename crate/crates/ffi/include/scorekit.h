#ifndef SCOREKIT_H
#define SCOREKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScorekitStatus {
  SCOREKIT_STATUS_OK = 0,
  SCOREKIT_STATUS_NULL_POINTER = 1,
  SCOREKIT_STATUS_INVALID_UTF8 = 2,
  // Malformed input: unknown family, bad parameter, parse error.
  SCOREKIT_STATUS_INVALID_INPUT = 3,
  // Valid input that violates a precondition of the operation.
  SCOREKIT_STATUS_PRECONDITION_FAILED = 4,
  // A numerical procedure failed on valid input.
  SCOREKIT_STATUS_NUMERICAL_FAILURE = 5,
  SCOREKIT_STATUS_PANIC = 6,
} ScorekitStatus;

// Opaque density handle.
typedef struct ScorekitDensity ScorekitDensity;

// Opaque skew-symmetric model handle.
typedef struct ScorekitSkewModel ScorekitSkewModel;

// Variance of g(X) and the three upper bounds; unavailable bounds are NaN.
typedef struct ScorekitVarianceBounds {
  double variance;
  double chernoff;
  double cacoullos;
  double sharp;
} ScorekitVarianceBounds;

// Fisher information at delta = 0, row-major over (mu, sigma, delta).
typedef struct ScorekitFisherInfo {
  double matrix[9];
  // Ascending.
  double eigenvalues[3];
  double min_rel_eigenvalue;
  uint32_t rank;
  // 1 when the collinearity fit below was computed.
  uint8_t has_collinearity;
  double collinearity_c1;
  double collinearity_c2;
  double collinearity_max_residual;
} ScorekitFisherInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *scorekit_version(void);

// Message for the last failed call on this thread, or NULL. Valid until
// the next call into the library on this thread.
const char *scorekit_last_error_message(void);

// Built-in family with `n_params` named parameters (may be 0).
//
// # Safety
// `name` and the parameter names must be NUL-terminated strings; the two
// parameter arrays must hold `n_params` entries; `out` must be writable.
enum ScorekitStatus scorekit_density_builtin(const char *name,
                                             const char *const *param_names,
                                             const double *param_values,
                                             size_t n_params,
                                             struct ScorekitDensity **out);

// Density from a TOML table (see the README for the format).
//
// # Safety
// `toml` must be a NUL-terminated string and `out` writable.
enum ScorekitStatus scorekit_density_from_toml(const char *toml, struct ScorekitDensity **out);

// Normalized `p^c`.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum ScorekitStatus scorekit_density_power(const struct ScorekitDensity *d,
                                           double c,
                                           struct ScorekitDensity **out);

// Normalized `|x|^(c1+c2-1) p(x)^c1` for symmetric `p`.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum ScorekitStatus scorekit_density_scale_pair(const struct ScorekitDensity *d,
                                                double c1,
                                                double c2,
                                                struct ScorekitDensity **out);

// # Safety
// `d` must be NULL or a handle not yet freed.
void scorekit_density_free(struct ScorekitDensity *d);

// `log p(x)`; `-inf` outside the support.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum ScorekitStatus scorekit_log_pdf(const struct ScorekitDensity *d, double x, double *out);

// Location score `phi(x)`.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum ScorekitStatus scorekit_location_score(const struct ScorekitDensity *d, double x, double *out);

// Scale score `psi(x) = 1 + x phi(x)`.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum ScorekitStatus scorekit_scale_score(const struct ScorekitDensity *d, double x, double *out);

// Variance of `g(X)` and its bounds. `g` is an expression in `x`, or
// `"score"` for the location score of `d`.
//
// # Safety
// `d` must be a live handle, `g` a NUL-terminated string, `out` writable.
enum ScorekitStatus scorekit_variance_bounds(const struct ScorekitDensity *d,
                                             const char *g,
                                             struct ScorekitVarianceBounds *out);

// `E[(A f)(X)]` for the operator `kind` (`location`, `exp_unit`,
// `exp_scale`) and test function `f` given as an expression in `x`.
//
// # Safety
// `d` must be a live handle, strings NUL-terminated, `out` writable.
enum ScorekitStatus scorekit_stein_expected(const struct ScorekitDensity *d,
                                            const char *kind,
                                            const char *f,
                                            double *out);

// Sample mean of `(A f)(x_i)`.
//
// # Safety
// `d` must be a live handle, strings NUL-terminated, `sample` must hold
// `n` values and `out` be writable.
enum ScorekitStatus scorekit_stein_empirical(const struct ScorekitDensity *d,
                                             const char *kind,
                                             const char *f,
                                             const double *sample,
                                             size_t n,
                                             double *out);

// Model from a preset name (`skew-normal`, `skew-t`) or a TOML table.
//
// # Safety
// `src` must be a NUL-terminated string and `out` writable.
enum ScorekitStatus scorekit_skew_model_new(const char *src, struct ScorekitSkewModel **out);

// # Safety
// `m` must be NULL or a handle not yet freed.
void scorekit_skew_model_free(struct ScorekitSkewModel *m);

// Density of the model at `x`.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum ScorekitStatus scorekit_skew_density(const struct ScorekitSkewModel *m, double x, double *out);

// Fisher information at delta = 0 with the default rank tolerance.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum ScorekitStatus scorekit_fisher_info(const struct ScorekitSkewModel *m,
                                         struct ScorekitFisherInfo *out);

// Root of the location score equation.
//
// # Safety
// `d` must be a live handle, `sample` must hold `n` values, `out` writable.
enum ScorekitStatus scorekit_solve_location_mle(const struct ScorekitDensity *d,
                                                const double *sample,
                                                size_t n,
                                                double *out);

// Root of the scale score equation on `s > 0`.
//
// # Safety
// `d` must be a live handle, `sample` must hold `n` values, `out` writable.
enum ScorekitStatus scorekit_solve_scale_mle(const struct ScorekitDensity *d,
                                             const double *sample,
                                             size_t n,
                                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCOREKIT_H */
