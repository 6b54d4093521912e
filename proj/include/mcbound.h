/* C interface for the convergence-bound library. All entry points return an
 * mcb_status; on failure mcb_last_error() describes the problem for the
 * calling thread. Objects returned through ** parameters are owned by the
 * caller and released with the matching *_free function. */

#ifndef MCBOUND_H
#define MCBOUND_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcb_status {
  MCB_OK = 0,
  MCB_ERR_INVALID_ARGUMENT = 1,
  MCB_ERR_DOMAIN = 2,
  MCB_ERR_STATE_ESCAPE = 3,
  MCB_ERR_NUMERIC = 4,
  MCB_ERR_INFEASIBLE = 5,
  MCB_ERR_UNKNOWN = 6
} mcb_status;

/* Thread-local message for the most recent failure; never NULL. */
const char* mcb_last_error(void);

typedef struct mcb_gibbs_model mcb_gibbs_model;
typedef struct mcb_system mcb_system;

/* --- models ------------------------------------------------------------ */

mcb_status mcb_gibbs_model_create(int J, double alpha, double beta, int K,
                                  double y_bar, double sigma0,
                                  mcb_gibbs_model** out);
/* which is 'A', 'B' or 'C'. */
mcb_status mcb_gibbs_model_builtin(char which, int K, mcb_gibbs_model** out);
/* Standardizes raw observations (shift by xi, scale by sqrt of the prior
 * precision) so the stored model has xi = 0 and K in {0,1}. */
mcb_status mcb_gibbs_model_from_data(const double* y, size_t n, double alpha,
                                     double beta, double prior_precision,
                                     double xi, mcb_gibbs_model** out);
void mcb_gibbs_model_free(mcb_gibbs_model* model);

/* --- analytic constants and bound curves -------------------------------- */

typedef struct mcb_gibbs_constants {
  double r1, A, r1_eps;
  double r2;
  double r3, A_hat, r3_eps;
  double q, B, eps0, w, C_tilde;
  /* Domain flags; a constant is meaningful only when its flag is nonzero. */
  int has_r1, has_r2, has_r3, has_c1, has_tv0;
} mcb_gibbs_constants;

mcb_status mcb_compute_constants(const mcb_gibbs_model* model, double epsilon,
                                 mcb_gibbs_constants* out);

/* bound(n) = coefficient * base^(exponent_scale * n), n >= start_index. */
typedef struct mcb_bound_curve {
  double coefficient;
  double base;
  double exponent_scale;
  int start_index;
} mcb_bound_curve;

/* variant 1, 2 or 3; epsilon is the truncation level for variants 1 and 3. */
mcb_status mcb_wasserstein_bound(const mcb_gibbs_model* model, int variant,
                                 double epsilon, double x, mcb_bound_curve* out);
mcb_status mcb_tv_bound(const mcb_gibbs_model* model,
                        const mcb_bound_curve* wasserstein, mcb_bound_curve* out);
mcb_status mcb_bound_eval(const mcb_bound_curve* curve, int n, double* out);
/* Smallest n with bound(n) < target. */
mcb_status mcb_first_n_below(const mcb_bound_curve* curve, double target,
                             int* out);
/* Same after rounding coefficient and effective base up to 3 significant
 * figures (the precision used when curves are quoted). */
mcb_status mcb_first_n_below_printed(const mcb_bound_curve* curve, double target,
                                     int* out);

typedef struct mcb_logistic_constants {
  double q, B, eps0, C_tilde_a, K_a, K_tilde_a;
} mcb_logistic_constants;

mcb_status mcb_compute_logistic_constants(double a, mcb_logistic_constants* out);

/* --- simulation ---------------------------------------------------------- */

mcb_status mcb_gibbs_system_create(const mcb_gibbs_model* model,
                                   mcb_system** out);
mcb_status mcb_logistic_system_create(double a, mcb_system** out);
void mcb_system_free(mcb_system* sys);

/* states must hold n+1 doubles; states[0] = x0. */
mcb_status mcb_forward_iterate(const mcb_system* sys, double x0, int n,
                               uint64_t seed, uint64_t stream, double* states);
mcb_status mcb_backward_iterate(const mcb_system* sys, double x0, int n,
                                uint64_t seed, uint64_t stream, double* out);
/* count i.i.d. draws from the exact stationary law; out holds count doubles.
 * Results are identical for every worker count. */
mcb_status mcb_sample_stationary_exact(const mcb_system* sys, size_t count,
                                       uint64_t seed, uint64_t stream,
                                       int workers, double* out);

/* --- reports -------------------------------------------------------------- */

/* config is a JSON object: {"command": "gibbs-table" | "gibbs-bounds" |
 * "gibbs-certify" | "logistic-certify" | "drift-verify" | "metrics-selftest",
 * "model", "K", "a", "epsilons", "x0", "n_range", "replicas", "seed",
 * "format", "table", ...}. Missing keys take their defaults. The result is a
 * JSON report envelope {"schema":"mcbound/1", config, content_hash, all_pass,
 * payload}; *out is released with mcb_string_free. */
mcb_status mcb_run_report_json(const char* config, int workers, char** out);
/* Flattens the report's payload rows to CSV. */
mcb_status mcb_report_to_csv(const char* report, char** out);
void mcb_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* MCBOUND_H */
