/* emtest — penalized EM-test for homogeneity in a two-component
 * heteroscedastic contaminated normal mixture.
 *
 * The model is (1-alpha) N(0, sigma1^2) + alpha N(mu, sigma2^2); the test
 * decides between a single normal component and genuine contamination.
 * All functions are thread-safe as long as each handle is used from one
 * thread at a time.
 */
#ifndef EMTEST_H
#define EMTEST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define EMTEST_VERSION_STRING "1.0.0"

typedef enum emtest_status {
    EMTEST_OK = 0,
    EMTEST_ERROR_INVALID_ARGUMENT = 1, /* bad pointer, size, or configuration value */
    EMTEST_ERROR_DOMAIN = 2,           /* scalar argument outside a function's domain */
    EMTEST_ERROR_DEGENERATE_DATA = 3,  /* data unusable: n too small, all zero, non-finite */
    EMTEST_ERROR_PARSE = 4,            /* malformed numeric input */
    EMTEST_ERROR_NOMEM = 5
} emtest_status;

const char *emtest_version(void);
const char *emtest_status_message(emtest_status status);

/* ------------------------------------------------------------------ */
/* Scalar distribution helpers                                         */
/* ------------------------------------------------------------------ */

/* Standard normal CDF (total-precision lower tail). */
double emtest_normal_cdf(double x);

/* Standard normal quantile; p must lie strictly in (0,1). */
emtest_status emtest_normal_quantile(double p, double *out);

/* Student-t CDF with df >= 1. */
emtest_status emtest_student_t_cdf(double t, int df, double *out);

/* Chi-square survival function, df in {1,2}; s <= 0 yields 1. */
emtest_status emtest_chisq_survival(double s, int df, double *out);

/* Map a t statistic to the standard normal quantile of its CDF value.
 * *clamped is set to 1 when the tail underflows and the result was pinned
 * to the largest representable quantile (pass NULL if not interested). */
emtest_status emtest_t_to_z(double t, int df, double *out, int *clamped);

/* Two-sided normal p-value 2*(1 - Phi(|z|)), computed tail-accurately. */
double emtest_z_to_p(double z);

/* Default penalty level a_n = exp(1.747 - 843.681/n) + 1.4 (n >= 1). */
emtest_status emtest_a_n_default(size_t n, double *out);

/* Asymptotic null p-value for the EM statistic: the statistic less `shift`
 * (= 2*max_j log alpha_j) referred to the 1/2 chisq_1 + 1/2 chisq_2 limit. */
double emtest_limiting_pvalue(double statistic, double shift);

/* ------------------------------------------------------------------ */
/* Test configuration                                                  */
/* ------------------------------------------------------------------ */

typedef struct emtest_config emtest_config;

/* Defaults: alpha grid {0.05, 0.15, 0.25}; K = 3 iterations; a_n from
 * emtest_a_n_default; step-1 tolerance 1e-8, max 2000 iterations;
 * multistart mu at the 0.10/0.25/0.50/0.75/0.90 sample quantiles plus 0. */
emtest_config *emtest_config_new(void);
void emtest_config_free(emtest_config *cfg);

/* Grid values must be strictly inside (0,1) and count >= 1. */
emtest_status emtest_config_set_alpha_grid(emtest_config *cfg,
                                           const double *values, size_t count);
emtest_status emtest_config_set_iterations(emtest_config *cfg, unsigned k);
emtest_status emtest_config_set_a_n(emtest_config *cfg, double a_n);
emtest_status emtest_config_set_step1_tolerance(emtest_config *cfg, double tol);
emtest_status emtest_config_set_step1_max_iter(emtest_config *cfg, unsigned max_iter);

/* ------------------------------------------------------------------ */
/* Running the test                                                    */
/* ------------------------------------------------------------------ */

typedef struct emtest_result emtest_result;

typedef struct emtest_fit {
    double alpha;
    double mu;
    double sigma1; /* standard deviations, not variances */
    double sigma2;
} emtest_fit;

typedef struct emtest_trace_step {
    double alpha;
    double mu;
    double sigma1;
    double sigma2;
    double pl;        /* penalized log-likelihood after this iteration */
    double statistic; /* 2*(pl - null pl) after this iteration */
} emtest_trace_step;

/* Run the EM-test on `data` (n >= 10 finite values, not all zero).
 * `cfg` may be NULL for defaults. On success *out owns the result. */
emtest_status emtest_run(const double *data, size_t n,
                         const emtest_config *cfg, emtest_result **out);
void emtest_result_free(emtest_result *res);

size_t emtest_result_n(const emtest_result *res);
double emtest_result_statistic(const emtest_result *res);
double emtest_result_shift(const emtest_result *res);
double emtest_result_p_value(const emtest_result *res);
double emtest_result_a_n(const emtest_result *res);
double emtest_result_sigma0_sq(const emtest_result *res);
unsigned emtest_result_iterations(const emtest_result *res);
emtest_fit emtest_result_fit(const emtest_result *res);

/* One trace per alpha-grid entry, each with `emtest_result_iterations`
 * steps. `tied` reports whether that trace attains the final maximum. */
size_t emtest_result_trace_count(const emtest_result *res);
emtest_status emtest_result_trace_alpha(const emtest_result *res,
                                        size_t trace, double *out);
emtest_status emtest_result_trace_tied(const emtest_result *res,
                                       size_t trace, int *out);
emtest_status emtest_result_trace_step(const emtest_result *res, size_t trace,
                                       size_t step, emtest_trace_step *out);

/* ------------------------------------------------------------------ */
/* Simulation and calibration                                          */
/* ------------------------------------------------------------------ */

typedef struct emtest_sim_spec {
    int mixture;       /* 0: pure N(0, null_sigma^2); 1: two-component model */
    double null_sigma; /* used when mixture == 0 */
    double alpha;      /* used when mixture == 1 */
    double mu;
    double sigma1;
    double sigma2;
} emtest_sim_spec;

typedef struct emtest_sim_result {
    uint64_t rejections;
    uint64_t reps;
    double rate;
    double mc_stderr; /* binomial Monte Carlo standard error of `rate` */
    uint64_t seed;
    double elapsed_seconds;
} emtest_sim_result;

/* Deterministic in (spec, n, reps, level, cfg, seed); replications run in
 * parallel (worker count from EMTEST_THREADS, default hardware). */
emtest_status emtest_simulate(const emtest_sim_spec *spec, size_t n,
                              uint64_t reps, double level,
                              const emtest_config *cfg, uint64_t seed,
                              emtest_sim_result *out);

/* Draw one sample of size n from the spec into out[0..n). `stream`
 * selects the replication substream used by emtest_simulate. */
emtest_status emtest_generate_sample(const emtest_sim_spec *spec, size_t n,
                                     uint64_t seed, uint64_t stream,
                                     double *out);

typedef struct emtest_calibration emtest_calibration;

typedef struct emtest_calibration_cell {
    double a_n;
    uint32_t n;
    double rate; /* simulated null rejection rate at the nominal level */
    double y;    /* logit(rate) - logit(level) */
} emtest_calibration_cell;

typedef struct emtest_regression {
    double b0, b1, b2;  /* y ~ b0 + b1/n + b2*log(a_n - 1.4) */
    double adjusted_r2;
    double formula_c0;  /* solving y = 0: a_n = exp(c0 + c1/n) + 1.4 */
    double formula_c1;
} emtest_regression;

/* Simulate every (a_n, n) cell at the given level and fit the penalty
 * calibration regression. */
emtest_status emtest_calibrate(const double *a_grid, size_t a_count,
                               const uint32_t *n_grid, size_t n_count,
                               uint64_t reps, double level, uint64_t seed,
                               emtest_calibration **out);

/* The bundled 13x3 reference study (a_n 1.6..4.0 by 0.2; n 500/1000/1500)
 * with its regression; cells carry the recorded discrepancies. */
emtest_status emtest_calibration_reference(emtest_calibration **out);

void emtest_calibration_free(emtest_calibration *cal);
size_t emtest_calibration_cell_count(const emtest_calibration *cal);
emtest_status emtest_calibration_cell_at(const emtest_calibration *cal, size_t idx,
                                      emtest_calibration_cell *out);
emtest_status emtest_calibration_regression(const emtest_calibration *cal,
                                            emtest_regression *out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EMTEST_H */
