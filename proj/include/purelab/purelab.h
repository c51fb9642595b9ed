/*
 * purelab C API: analytic diffusion purification, randomized-smoothing
 * certification and transport analysis behind opaque handles.
 *
 * Conventions:
 *   - every fallible call returns pl_status; PL_OK is 0
 *   - on failure, pl_last_error() returns a thread-local message
 *   - points are double arrays of the owning object's dimension
 *   - seeds are explicit; identical seeds reproduce identical results for
 *     any worker count
 */
#ifndef PURELAB_H
#define PURELAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pl_status {
    PL_OK = 0,
    PL_ERR_INVALID_ARGUMENT = 1,
    PL_ERR_DOMAIN = 2,
    PL_ERR_UNSUPPORTED = 3,
    PL_ERR_NUMERIC = 4,
    PL_ERR_TRAINING = 5,
    PL_ERR_IO = 6,
    PL_ERR_CONTRACT = 7,
} pl_status;

const char* pl_version(void);
const char* pl_last_error(void);

typedef struct pl_dist pl_dist;
typedef struct pl_grid pl_grid;
typedef struct pl_net pl_net;
typedef struct pl_purifier pl_purifier;
typedef struct pl_classifier pl_classifier;

/* ---------- mixture distributions ---------- */

/* centers: n_components x dim row-major; scale 0 marks a Dirac component */
pl_status pl_dist_create(const double* centers, const double* scales, const double* weights,
                         const int32_t* labels, int32_t n_components, int32_t dim, pl_dist** out);
void pl_dist_free(pl_dist* d);
int32_t pl_dist_dim(const pl_dist* d);
int32_t pl_dist_num_components(const pl_dist* d);
pl_status pl_dist_component(const pl_dist* d, int32_t index, double* center_out, double* scale_out,
                            double* weight_out, int32_t* label_out);
/* points_out: n x dim; labels_out may be NULL */
pl_status pl_dist_sample(const pl_dist* d, uint64_t seed, int64_t n, double* points_out,
                         int32_t* labels_out);
pl_status pl_dist_log_density(const pl_dist* d, const double* x, double t, double* out);
pl_status pl_dist_score(const pl_dist* d, const double* x, double t, double* out);
pl_status pl_dist_posterior_mean(const pl_dist* d, const double* x, double t, double* out);
/* requires a pure Dirac mixture; ties keep the lowest component index */
pl_status pl_dist_nearest(const pl_dist* d, const double* x, double* point_out,
                          int32_t* label_out);

/* ---------- time grid ---------- */

pl_status pl_grid_create(double eps, double t_max, double rho, int32_t n, pl_grid** out);
void pl_grid_free(pl_grid* g);
int32_t pl_grid_size(const pl_grid* g);
pl_status pl_grid_points(const pl_grid* g, double* out);
pl_status pl_grid_select_timestep(const pl_grid* g, double sigma, double* out);

/* ---------- diffusion with exact mixture scores ---------- */

/* method: 0 = euler, 1 = heun */
pl_status pl_solve_pf_ode(const pl_dist* d, const double* x, double t_start, double t_end,
                          int32_t method, int32_t steps, double* out);
/* records the full trajectory: ts_out[steps+1], xs_out[(steps+1)*dim] */
pl_status pl_pf_ode_trajectory(const pl_dist* d, const double* x, double t_start, double t_end,
                               int32_t method, int32_t steps, double* ts_out, double* xs_out);
pl_status pl_solve_reverse_sde(const pl_dist* d, const double* x, double t_start, double t_end,
                               int32_t steps, uint64_t seed, double* out);
pl_status pl_perturb(const double* x, int32_t dim, double t, uint64_t seed, double* out);

/* ---------- consistency net ---------- */

/* activation: 0 = tanh, 1 = relu */
pl_status pl_net_create(int32_t data_dim, int32_t hidden_layers, int32_t hidden_units,
                        int32_t activation, double sigma_data, double t_min, uint64_t seed,
                        pl_net** out);
pl_status pl_net_load(const char* path, pl_net** out);
pl_status pl_net_save(const pl_net* net, const char* path);
void pl_net_free(pl_net* net);
int32_t pl_net_data_dim(const pl_net* net);
uint64_t pl_net_param_hash(const pl_net* net);
pl_status pl_net_forward(const pl_net* net, const double* x, double t, double* out);

/* ---------- purifiers ---------- */

typedef enum pl_purifier_kind {
    PL_PURIFIER_ONESTEP = 0,           /* exact posterior mean at t* */
    PL_PURIFIER_PF_ODE = 1,            /* multi-step probability-flow ODE */
    PL_PURIFIER_REVERSE_SDE = 2,       /* Euler-Maruyama reverse SDE */
    PL_PURIFIER_CONSISTENCY_ORACLE = 3,/* high-accuracy PF-ODE solve */
    PL_PURIFIER_CONSISTENCY_NET = 4,   /* one net evaluation */
    PL_PURIFIER_DEBUG_SHIFT = 5,       /* diagnostic: noisy input + offset */
} pl_purifier_kind;

typedef struct pl_purifier_options {
    int32_t ode_method; /* 0 euler, 1 heun */
    int32_t ode_steps;
    int32_t sde_steps;
    double debug_shift;
} pl_purifier_options;
void pl_purifier_options_default(pl_purifier_options* opts);

/* dist is required for score-based kinds, net for the net kind; opts may be NULL */
pl_status pl_purifier_create(pl_purifier_kind kind, const pl_dist* dist, const pl_net* net,
                             const pl_purifier_options* opts, pl_purifier** out);
void pl_purifier_free(pl_purifier* p);
pl_status pl_purify(const pl_purifier* p, const pl_grid* g, const double* x_noisy, int32_t dim,
                    double sigma, uint64_t seed, double* out);

/* variance-preserving equivalence: sigma^2 = (1 - alpha_bar) / alpha_bar */
pl_status pl_vp_sigma_from_alpha_bar(double alpha_bar, double* out);
pl_status pl_vp_alpha_bar_from_sigma(double sigma, double* out);

/* ---------- classifiers ---------- */

pl_status pl_classifier_nearest_centroid(const double* centers, const int32_t* labels, int32_t n,
                                         int32_t dim, pl_classifier** out);
pl_status pl_classifier_logistic(const double* weights, int32_t dim, double bias,
                                 int32_t label_neg, int32_t label_pos, pl_classifier** out);
void pl_classifier_free(pl_classifier* c);
pl_status pl_classify(const pl_classifier* c, const double* x, int32_t dim, int32_t* label_out);

/* ---------- statistics ---------- */

pl_status pl_inverse_normal_cdf(double p, double* out);
pl_status pl_clopper_pearson_lower(int64_t k, int64_t n, double alpha, double* out);
pl_status pl_binom_test_two_sided(int64_t k, int64_t n, double* out);

/* ---------- randomized smoothing ---------- */

#define PL_ABSTAIN (-1)

typedef struct pl_certify_result {
    int32_t prediction; /* class label, or PL_ABSTAIN */
    double radius;
    double p_a_lower;
    double sigma;
} pl_certify_result;

pl_status pl_predict(const pl_purifier* p, const pl_classifier* c, const pl_grid* g,
                     const double* x, int32_t dim, double sigma, int64_t n, double alpha,
                     uint64_t seed, int32_t workers, int32_t* label_out);
/* counts0_out/counts_out may be NULL; otherwise indexed by label, which must
 * then lie in [0, counts_len) */
pl_status pl_certify(const pl_purifier* p, const pl_classifier* c, const pl_grid* g,
                     const double* x, int32_t dim, double sigma, int64_t n0, int64_t n_cert,
                     double alpha, uint64_t seed, int32_t workers, pl_certify_result* out,
                     int64_t* counts0_out, int64_t* counts_out, int32_t counts_len);
pl_status pl_certified_radius(double sigma, double p_a_lower, double* out);
/* predictions use PL_ABSTAIN for abstentions; acc_out has n_eps entries */
pl_status pl_certified_accuracy_curve(const int32_t* predictions, const double* radii,
                                      const int32_t* true_labels, int64_t n,
                                      const double* eps_grid, int32_t n_eps, double* acc_out);

/* ---------- transport ---------- */

typedef struct pl_transport_result {
    double sigma;
    int64_t n;
    double mean_dist;
    double std_err;
} pl_transport_result;

pl_status pl_estimate_transport(const pl_dist* d, const pl_purifier* p, const pl_grid* g,
                                double sigma, int64_t n, const double* r_grid, int32_t n_r,
                                uint64_t seed, uint64_t purifier_seed, int32_t workers,
                                pl_transport_result* out, double* exceedance_out);
/* bound_out[i] = mean_dist / r_i; pass_out[i] is 1 when the exceedance stays
 * within the bound plus 3 combined standard errors */
pl_status pl_markov_report(const pl_transport_result* est, const double* r_grid,
                           const double* exceedance, int32_t n_r, double* bound_out,
                           double* slack_out, int32_t* pass_out);

/* ---------- training ---------- */

typedef struct pl_distill_config {
    int64_t iters;
    int32_t batch;
    double ema_decay;
    double lr;
    int32_t loss; /* 0 l1, 1 l2, 2 feature */
    uint64_t seed;
    int64_t log_interval;
    int64_t eval_n; /* 0 disables transport evaluation in log records */
    const double* eval_sigmas;
    int32_t n_eval_sigmas;
} pl_distill_config;
void pl_distill_config_default(pl_distill_config* cfg);

typedef struct pl_finetune_config {
    const double* sigmas;
    int32_t n_sigmas;
    int32_t continuous; /* nonzero: sigma ~ U[cont_lo, cont_hi] */
    double cont_lo;
    double cont_hi;
    int64_t iters;
    int32_t batch;
    double lr;
    int32_t loss;
    uint64_t seed;
    int64_t log_interval;
    int64_t eval_n;
} pl_finetune_config;
void pl_finetune_config_default(pl_finetune_config* cfg);

typedef void (*pl_train_log_fn)(void* user, int64_t iter, double loss, const double* transport,
                                int32_t n_transport);

pl_status pl_distill(const pl_dist* d, pl_net* net, const pl_grid* g,
                     const pl_distill_config* cfg, pl_train_log_fn log, void* user);
/* sigma_draw_counts_out may be NULL; otherwise one entry per configured sigma */
pl_status pl_finetune(const pl_dist* d, pl_net* net, const pl_grid* g,
                      const pl_finetune_config* cfg, pl_train_log_fn log, void* user,
                      int64_t* sigma_draw_counts_out);

#ifdef __cplusplus
}
#endif

#endif /* PURELAB_H */
