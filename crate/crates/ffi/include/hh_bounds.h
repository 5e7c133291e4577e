#ifndef HH_BOUNDS_H
#define HH_BOUNDS_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define HH_OK 0

#define HH_ERR_PARAM 1

#define HH_ERR_DOMAIN 2

#define HH_ERR_NONFINITE 3

#define HH_ERR_BUDGET 4

#define HH_ERR_GATE 5

#define HH_ERR_UNKNOWN 6

#define HH_ERR_NULL 7

#define HH_ERR_PANIC 8

#define HH_THEOREM_DA 0

#define HH_THEOREM_SSO 1

#define HH_THEOREM_BOP_M 2

#define HH_THEOREM_BOP_AM 3

#define HH_THEOREM_THM11 4

#define HH_THEOREM_THM211 5

#define HH_THEOREM_THM22 6

#define HH_MEAN_WEIGHTED_ARITHMETIC 0

#define HH_MEAN_ARITHMETIC 1

#define HH_MEAN_WEIGHTED_HARMONIC 2

#define HH_MEAN_HARMONIC 3

#define HH_MEAN_LOGARITHMIC 4

#define HH_MEAN_P_LOGARITHMIC 5

// A test function and its derivative.
typedef struct HhFunction HhFunction;

typedef struct HhSettings {
  double quad_tol;
  double holds_tol;
  uint32_t grid_n;
} HhSettings;

// `double f(double x, void *user_data)`.
typedef double (*HhScalarFn)(double x, void *user_data);

typedef struct HhParams {
  double alpha;
  double m;
  double lambda;
  double mu;
  double q;
} HhParams;

// Absent optional values are NaN.
typedef struct HhBoundReport {
  int32_t theorem;
  bool holds;
  double lhs;
  double rhs;
  double slack;
  double quad_error;
  double branch1;
  double branch2;
  double loose_rhs;
} HhBoundReport;

typedef struct HhGateVerdict {
  bool holds;
  double worst_violation;
  double witness_x;
  double witness_y;
  double witness_t;
  uint64_t samples;
} HhGateVerdict;

typedef struct HhQuadResult {
  double value;
  double error_estimate;
  uint64_t evaluations;
  bool converged;
} HhQuadResult;

// `factor_residual` is NaN except for proposition 6.
typedef struct HhPropositionResult {
  double mean_lhs;
  double mean_rhs;
  double corollary_rhs;
  double residual;
  bool holds;
  bool display_holds;
  double factor_residual;
} HhPropositionResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hh_version(void);

// Message for the last failure on this thread. Valid until the next call
// into the library from the same thread.
const char *hh_last_error_message(void);

struct HhSettings hh_settings_default(void);

// Look up a built-in function by id (`pow2`, `exp`, `recip`, ...).
//
// # Safety
// `id` must be a NUL-terminated string and `out` a valid pointer.
int32_t hh_function_builtin(const char *id, struct HhFunction **out);

// Wrap user callbacks for `f` and `f'`, defined on `[domain_min, domain_max]`
// (`domain_max` may be `INFINITY`).
//
// # Safety
// Both callbacks must be safe to call concurrently from several threads
// with `user_data`, which must outlive the returned handle.
int32_t hh_function_from_callbacks(HhScalarFn f,
                                   HhScalarFn df,
                                   void *user_data,
                                   double domain_min,
                                   double domain_max,
                                   struct HhFunction **out);

// Release a handle. Null is ignored.
//
// # Safety
// `func` must come from this library and not be used afterwards.
void hh_function_free(struct HhFunction *func);

// Evaluate `f` and `f'` at `x`. Either out-pointer may be null.
//
// # Safety
// `func` must be a live handle.
int32_t hh_function_eval(const struct HhFunction *func, double x, double *value, double *deriv);

// Validate, screen the hypothesis, and evaluate a bound.
//
// On `HH_ERR_GATE` the verdict (if requested) carries the witness and the
// report is left untouched. `settings` may be null for defaults.
//
// # Safety
// Pointers must be valid; `gate` may be null.
int32_t hh_verify(const struct HhFunction *func,
                  double a,
                  double b,
                  const struct HhParams *params,
                  int32_t theorem,
                  const struct HhSettings *settings,
                  struct HhBoundReport *report,
                  struct HhGateVerdict *gate);

// Evaluate a bound without the hypothesis screen.
//
// # Safety
// Pointers must be valid; `settings` may be null.
int32_t hh_evaluate(const struct HhFunction *func,
                    double a,
                    double b,
                    const struct HhParams *params,
                    int32_t theorem,
                    const struct HhSettings *settings,
                    struct HhBoundReport *report);

// `gamma1..gamma4` into `out[0..4]`.
//
// # Safety
// `out` must hold four doubles.
int32_t hh_gamma_coeffs(double alpha, double lambda, double mu, double *out);

// `nu1`, `nu2` into `out[0..2]`.
//
// # Safety
// `out` must hold two doubles.
int32_t hh_nu_coeffs(double alpha, double *out);

// Adaptive quadrature of a callback over `[lo, hi]`. An unconverged result
// is still written and reported as `HH_ERR_BUDGET`.
//
// # Safety
// `f` must be callable with `user_data`; `out` must be valid.
int32_t hh_integrate(HhScalarFn f,
                     void *user_data,
                     double lo,
                     double hi,
                     double tol,
                     struct HhQuadResult *out);

// One of the special means. `weight` is read by the weighted kinds and `p`
// by the p-logarithmic mean.
//
// # Safety
// `out` must be valid.
int32_t hh_mean(int32_t kind, double a, double b, double weight, int32_t p, double *out);

// Evaluate proposition `index` (1..=6); `n` is read for 1..=3.
//
// # Safety
// `out` must be valid.
int32_t hh_proposition_check(uint8_t index,
                             int32_t n,
                             double a,
                             double b,
                             double lambda,
                             double mu,
                             double q,
                             struct HhPropositionResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HH_BOUNDS_H */
