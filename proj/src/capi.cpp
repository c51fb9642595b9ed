#include "purelab/purelab.h"

#include <cstring>
#include <memory>
#include <string>

#include "classifier.hpp"
#include "consistency_net.hpp"
#include "edm.hpp"
#include "error.hpp"
#include "loss.hpp"
#include "mixture.hpp"
#include "mlp.hpp"
#include "purifier.hpp"
#include "smoothing.hpp"
#include "stats.hpp"
#include "time_grid.hpp"
#include "train.hpp"
#include "transport.hpp"
#include "version.hpp"

using namespace purelab;

struct pl_dist {
    std::shared_ptr<const MixtureDistribution> impl;
};
struct pl_grid {
    KarrasGrid impl;
};
struct pl_net {
    std::shared_ptr<ConsistencyNet> impl;
};
struct pl_purifier {
    Purifier impl;
};
struct pl_classifier {
    Classifier impl;
};

namespace {

thread_local std::string g_last_error;

pl_status to_status(const Error& e) {
    switch (e.code()) {
        case Errc::invalid_argument: return PL_ERR_INVALID_ARGUMENT;
        case Errc::domain: return PL_ERR_DOMAIN;
        case Errc::unsupported: return PL_ERR_UNSUPPORTED;
        case Errc::numeric: return PL_ERR_NUMERIC;
        case Errc::training: return PL_ERR_TRAINING;
        case Errc::io: return PL_ERR_IO;
        case Errc::contract: return PL_ERR_CONTRACT;
    }
    return PL_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
pl_status guarded(Fn&& fn) {
    try {
        fn();
        return PL_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PL_ERR_INVALID_ARGUMENT;
    } catch (...) {
        g_last_error = "unknown error";
        return PL_ERR_INVALID_ARGUMENT;
    }
}

pl_status fail_null(const char* what) {
    g_last_error = std::string("null argument: ") + what;
    return PL_ERR_INVALID_ARGUMENT;
}

Activation to_activation(int32_t a) {
    if (a == 0) return Activation::Tanh;
    if (a == 1) return Activation::Relu;
    throw_invalid("activation must be 0 (tanh) or 1 (relu)");
}

LossKind to_loss(int32_t k) {
    switch (k) {
        case 0: return LossKind::L1;
        case 1: return LossKind::L2;
        case 2: return LossKind::Feature;
    }
    throw_invalid("loss must be 0 (l1), 1 (l2) or 2 (feature)");
}

OdeMethod to_method(int32_t m) {
    if (m == 0) return OdeMethod::Euler;
    if (m == 1) return OdeMethod::Heun;
    throw_invalid("ode method must be 0 (euler) or 1 (heun)");
}

void counts_to_array(const std::map<int, std::int64_t>& counts, int64_t* out, int32_t len) {
    for (int32_t i = 0; i < len; ++i) out[i] = 0;
    for (const auto& [label, n] : counts) {
        if (label < 0 || label >= len)
            throw_invalid("vote label " + std::to_string(label) +
                          " does not fit the provided counts buffer");
        out[label] = n;
    }
}

}  // namespace

extern "C" {

const char* pl_version(void) { return kVersion; }

const char* pl_last_error(void) { return g_last_error.c_str(); }

/* ---------- distributions ---------- */

pl_status pl_dist_create(const double* centers, const double* scales, const double* weights,
                         const int32_t* labels, int32_t n_components, int32_t dim, pl_dist** out) {
    if (!centers || !scales || !weights || !labels || !out) return fail_null("pl_dist_create");
    return guarded([&] {
        std::vector<MixtureComponent> comps(static_cast<std::size_t>(n_components));
        for (int32_t k = 0; k < n_components; ++k) {
            comps[k].center.assign(centers + static_cast<std::size_t>(k) * dim,
                                   centers + static_cast<std::size_t>(k + 1) * dim);
            comps[k].scale = scales[k];
            comps[k].weight = weights[k];
            comps[k].label = labels[k];
        }
        auto dist = std::make_shared<const MixtureDistribution>(std::move(comps), dim);
        *out = new pl_dist{std::move(dist)};
    });
}

void pl_dist_free(pl_dist* d) { delete d; }

int32_t pl_dist_dim(const pl_dist* d) { return d ? d->impl->dim() : 0; }

int32_t pl_dist_num_components(const pl_dist* d) {
    return d ? static_cast<int32_t>(d->impl->components().size()) : 0;
}

pl_status pl_dist_component(const pl_dist* d, int32_t index, double* center_out, double* scale_out,
                            double* weight_out, int32_t* label_out) {
    if (!d) return fail_null("pl_dist_component");
    return guarded([&] {
        const auto& comps = d->impl->components();
        if (index < 0 || static_cast<std::size_t>(index) >= comps.size())
            throw_invalid("component index out of range");
        const auto& c = comps[static_cast<std::size_t>(index)];
        if (center_out) std::memcpy(center_out, c.center.data(), sizeof(double) * c.center.size());
        if (scale_out) *scale_out = c.scale;
        if (weight_out) *weight_out = c.weight;
        if (label_out) *label_out = c.label;
    });
}

pl_status pl_dist_sample(const pl_dist* d, uint64_t seed, int64_t n, double* points_out,
                         int32_t* labels_out) {
    if (!d || !points_out) return fail_null("pl_dist_sample");
    return guarded([&] {
        Rng rng(seed);
        const auto draws = d->impl->sample(n, rng);
        const int dim = d->impl->dim();
        for (std::size_t i = 0; i < draws.size(); ++i) {
            std::memcpy(points_out + i * dim, draws[i].point.data(), sizeof(double) * dim);
            if (labels_out) labels_out[i] = draws[i].label;
        }
    });
}

pl_status pl_dist_log_density(const pl_dist* d, const double* x, double t, double* out) {
    if (!d || !x || !out) return fail_null("pl_dist_log_density");
    return guarded([&] {
        *out = d->impl->diffused_log_density({x, static_cast<std::size_t>(d->impl->dim())}, t);
    });
}

pl_status pl_dist_score(const pl_dist* d, const double* x, double t, double* out) {
    if (!d || !x || !out) return fail_null("pl_dist_score");
    return guarded(
        [&] { d->impl->score_into({x, static_cast<std::size_t>(d->impl->dim())}, t, out); });
}

pl_status pl_dist_posterior_mean(const pl_dist* d, const double* x, double t, double* out) {
    if (!d || !x || !out) return fail_null("pl_dist_posterior_mean");
    return guarded([&] {
        const Vec pm = d->impl->posterior_mean({x, static_cast<std::size_t>(d->impl->dim())}, t);
        std::memcpy(out, pm.data(), sizeof(double) * pm.size());
    });
}

pl_status pl_dist_nearest(const pl_dist* d, const double* x, double* point_out,
                          int32_t* label_out) {
    if (!d || !x) return fail_null("pl_dist_nearest");
    return guarded([&] {
        const auto [point, label] =
            d->impl->nearest_data_point({x, static_cast<std::size_t>(d->impl->dim())});
        if (point_out) std::memcpy(point_out, point.data(), sizeof(double) * point.size());
        if (label_out) *label_out = label;
    });
}

/* ---------- time grid ---------- */

pl_status pl_grid_create(double eps, double t_max, double rho, int32_t n, pl_grid** out) {
    if (!out) return fail_null("pl_grid_create");
    return guarded([&] { *out = new pl_grid{build_grid(eps, t_max, rho, n)}; });
}

void pl_grid_free(pl_grid* g) { delete g; }

int32_t pl_grid_size(const pl_grid* g) { return g ? g->impl.n : 0; }

pl_status pl_grid_points(const pl_grid* g, double* out) {
    if (!g || !out) return fail_null("pl_grid_points");
    return guarded([&] {
        std::memcpy(out, g->impl.points.data(), sizeof(double) * g->impl.points.size());
    });
}

pl_status pl_grid_select_timestep(const pl_grid* g, double sigma, double* out) {
    if (!g || !out) return fail_null("pl_grid_select_timestep");
    return guarded([&] { *out = select_timestep(g->impl, sigma); });
}

/* ---------- diffusion ---------- */

namespace {

ScoreFn dist_score_fn(const pl_dist* d) {
    const MixtureDistribution& dist = *d->impl;
    return [&dist](std::span<const double> x, double t, std::span<double> out) {
        dist.score_into(x, t, out.data());
    };
}

}  // namespace

pl_status pl_solve_pf_ode(const pl_dist* d, const double* x, double t_start, double t_end,
                          int32_t method, int32_t steps, double* out) {
    if (!d || !x || !out) return fail_null("pl_solve_pf_ode");
    return guarded([&] {
        OdeSolverConfig cfg;
        cfg.method = to_method(method);
        cfg.steps = steps;
        cfg.t_end = t_end;
        const Vec end = solve_pf_ode(dist_score_fn(d),
                                     {x, static_cast<std::size_t>(d->impl->dim())}, t_start, cfg);
        std::memcpy(out, end.data(), sizeof(double) * end.size());
    });
}

pl_status pl_pf_ode_trajectory(const pl_dist* d, const double* x, double t_start, double t_end,
                               int32_t method, int32_t steps, double* ts_out, double* xs_out) {
    if (!d || !x || !ts_out || !xs_out) return fail_null("pl_pf_ode_trajectory");
    return guarded([&] {
        OdeSolverConfig cfg;
        cfg.method = to_method(method);
        cfg.steps = steps;
        cfg.t_end = t_end;
        std::vector<std::pair<double, Vec>> traj;
        solve_pf_ode(dist_score_fn(d), {x, static_cast<std::size_t>(d->impl->dim())}, t_start, cfg,
                     &traj);
        const int dim = d->impl->dim();
        for (std::size_t k = 0; k < traj.size(); ++k) {
            ts_out[k] = traj[k].first;
            std::memcpy(xs_out + k * dim, traj[k].second.data(), sizeof(double) * dim);
        }
    });
}

pl_status pl_solve_reverse_sde(const pl_dist* d, const double* x, double t_start, double t_end,
                               int32_t steps, uint64_t seed, double* out) {
    if (!d || !x || !out) return fail_null("pl_solve_reverse_sde");
    return guarded([&] {
        Rng rng(seed);
        const Vec end = solve_reverse_sde(dist_score_fn(d),
                                          {x, static_cast<std::size_t>(d->impl->dim())}, t_start,
                                          steps, t_end, rng);
        std::memcpy(out, end.data(), sizeof(double) * end.size());
    });
}

pl_status pl_perturb(const double* x, int32_t dim, double t, uint64_t seed, double* out) {
    if (!x || !out) return fail_null("pl_perturb");
    return guarded([&] {
        Rng rng(seed);
        const Vec p = perturb({x, static_cast<std::size_t>(dim)}, t, rng);
        std::memcpy(out, p.data(), sizeof(double) * p.size());
    });
}

/* ---------- consistency net ---------- */

pl_status pl_net_create(int32_t data_dim, int32_t hidden_layers, int32_t hidden_units,
                        int32_t activation, double sigma_data, double t_min, uint64_t seed,
                        pl_net** out) {
    if (!out) return fail_null("pl_net_create");
    return guarded([&] {
        Rng rng(seed);
        auto net = std::make_shared<ConsistencyNet>(ConsistencyNet::create(
            data_dim, hidden_layers, hidden_units, to_activation(activation), sigma_data, t_min,
            rng));
        *out = new pl_net{std::move(net)};
    });
}

pl_status pl_net_load(const char* path, pl_net** out) {
    if (!path || !out) return fail_null("pl_net_load");
    return guarded([&] {
        auto net = std::make_shared<ConsistencyNet>(ConsistencyNet::load(path));
        *out = new pl_net{std::move(net)};
    });
}

pl_status pl_net_save(const pl_net* net, const char* path) {
    if (!net || !path) return fail_null("pl_net_save");
    return guarded([&] { net->impl->save(path); });
}

void pl_net_free(pl_net* net) { delete net; }

int32_t pl_net_data_dim(const pl_net* net) { return net ? net->impl->data_dim() : 0; }

uint64_t pl_net_param_hash(const pl_net* net) { return net ? net->impl->param_hash() : 0; }

pl_status pl_net_forward(const pl_net* net, const double* x, double t, double* out) {
    if (!net || !x || !out) return fail_null("pl_net_forward");
    return guarded([&] {
        net->impl->forward_into({x, static_cast<std::size_t>(net->impl->data_dim())}, t,
                                {out, static_cast<std::size_t>(net->impl->data_dim())});
    });
}

/* ---------- purifiers ---------- */

void pl_purifier_options_default(pl_purifier_options* opts) {
    if (!opts) return;
    opts->ode_method = 1;
    opts->ode_steps = 18;
    opts->sde_steps = 200;
    opts->debug_shift = 0.0;
}

pl_status pl_purifier_create(pl_purifier_kind kind, const pl_dist* dist, const pl_net* net,
                             const pl_purifier_options* opts, pl_purifier** out) {
    if (!out) return fail_null("pl_purifier_create");
    pl_purifier_options def;
    pl_purifier_options_default(&def);
    if (!opts) opts = &def;
    return guarded([&] {
        switch (kind) {
            case PL_PURIFIER_ONESTEP:
                if (!dist) throw_invalid("onestep purifier requires a distribution");
                *out = new pl_purifier{Purifier::onestep_posterior_mean(dist->impl)};
                return;
            case PL_PURIFIER_PF_ODE: {
                if (!dist) throw_invalid("pf-ode purifier requires a distribution");
                OdeSolverConfig cfg;
                cfg.method = to_method(opts->ode_method);
                cfg.steps = opts->ode_steps;
                *out = new pl_purifier{Purifier::pf_ode(dist->impl, cfg)};
                return;
            }
            case PL_PURIFIER_REVERSE_SDE:
                if (!dist) throw_invalid("reverse-sde purifier requires a distribution");
                *out = new pl_purifier{Purifier::reverse_sde(dist->impl, opts->sde_steps)};
                return;
            case PL_PURIFIER_CONSISTENCY_ORACLE:
                if (!dist) throw_invalid("consistency oracle requires a distribution");
                *out = new pl_purifier{Purifier::consistency_oracle(dist->impl)};
                return;
            case PL_PURIFIER_CONSISTENCY_NET:
                if (!net) throw_invalid("consistency-net purifier requires a net");
                *out = new pl_purifier{Purifier::consistency_net(net->impl)};
                return;
            case PL_PURIFIER_DEBUG_SHIFT:
                *out = new pl_purifier{Purifier::debug_shift(opts->debug_shift)};
                return;
        }
        throw_invalid("unknown purifier kind");
    });
}

void pl_purifier_free(pl_purifier* p) { delete p; }

pl_status pl_purify(const pl_purifier* p, const pl_grid* g, const double* x_noisy, int32_t dim,
                    double sigma, uint64_t seed, double* out) {
    if (!p || !g || !x_noisy || !out) return fail_null("pl_purify");
    return guarded([&] {
        Rng rng(seed);
        const Vec purified =
            p->impl.purify({x_noisy, static_cast<std::size_t>(dim)}, sigma, g->impl, rng);
        std::memcpy(out, purified.data(), sizeof(double) * purified.size());
    });
}

pl_status pl_vp_sigma_from_alpha_bar(double alpha_bar, double* out) {
    if (!out) return fail_null("pl_vp_sigma_from_alpha_bar");
    return guarded([&] { *out = vp_to_edm(alpha_bar).sigma; });
}

pl_status pl_vp_alpha_bar_from_sigma(double sigma, double* out) {
    if (!out) return fail_null("pl_vp_alpha_bar_from_sigma");
    return guarded([&] { *out = vp_alpha_bar_from_sigma(sigma); });
}

/* ---------- classifiers ---------- */

pl_status pl_classifier_nearest_centroid(const double* centers, const int32_t* labels, int32_t n,
                                         int32_t dim, pl_classifier** out) {
    if (!centers || !labels || !out) return fail_null("pl_classifier_nearest_centroid");
    return guarded([&] {
        std::vector<Vec> cs(static_cast<std::size_t>(n));
        std::vector<int> ls(static_cast<std::size_t>(n));
        for (int32_t k = 0; k < n; ++k) {
            cs[k].assign(centers + static_cast<std::size_t>(k) * dim,
                         centers + static_cast<std::size_t>(k + 1) * dim);
            ls[k] = labels[k];
        }
        *out = new pl_classifier{Classifier::nearest_centroid(std::move(cs), std::move(ls))};
    });
}

pl_status pl_classifier_logistic(const double* weights, int32_t dim, double bias,
                                 int32_t label_neg, int32_t label_pos, pl_classifier** out) {
    if (!weights || !out) return fail_null("pl_classifier_logistic");
    return guarded([&] {
        Vec w(weights, weights + dim);
        *out = new pl_classifier{Classifier::logistic(std::move(w), bias, label_neg, label_pos)};
    });
}

void pl_classifier_free(pl_classifier* c) { delete c; }

pl_status pl_classify(const pl_classifier* c, const double* x, int32_t dim, int32_t* label_out) {
    if (!c || !x || !label_out) return fail_null("pl_classify");
    return guarded(
        [&] { *label_out = c->impl.classify({x, static_cast<std::size_t>(dim)}); });
}

/* ---------- statistics ---------- */

pl_status pl_inverse_normal_cdf(double p, double* out) {
    if (!out) return fail_null("pl_inverse_normal_cdf");
    return guarded([&] { *out = inverse_normal_cdf(p); });
}

pl_status pl_clopper_pearson_lower(int64_t k, int64_t n, double alpha, double* out) {
    if (!out) return fail_null("pl_clopper_pearson_lower");
    return guarded([&] { *out = clopper_pearson_lower(k, n, alpha); });
}

pl_status pl_binom_test_two_sided(int64_t k, int64_t n, double* out) {
    if (!out) return fail_null("pl_binom_test_two_sided");
    return guarded([&] { *out = binom_test_two_sided(k, n); });
}

/* ---------- randomized smoothing ---------- */

pl_status pl_predict(const pl_purifier* p, const pl_classifier* c, const pl_grid* g,
                     const double* x, int32_t dim, double sigma, int64_t n, double alpha,
                     uint64_t seed, int32_t workers, int32_t* label_out) {
    if (!p || !c || !g || !x || !label_out) return fail_null("pl_predict");
    return guarded([&] {
        *label_out = predict(p->impl, c->impl, {x, static_cast<std::size_t>(dim)}, sigma, n, alpha,
                             g->impl, seed, workers);
    });
}

pl_status pl_certify(const pl_purifier* p, const pl_classifier* c, const pl_grid* g,
                     const double* x, int32_t dim, double sigma, int64_t n0, int64_t n_cert,
                     double alpha, uint64_t seed, int32_t workers, pl_certify_result* out,
                     int64_t* counts0_out, int64_t* counts_out, int32_t counts_len) {
    if (!p || !c || !g || !x || !out) return fail_null("pl_certify");
    return guarded([&] {
        const CertifyOutcome o = certify(p->impl, c->impl, {x, static_cast<std::size_t>(dim)},
                                         sigma, n0, n_cert, alpha, g->impl, seed, workers);
        out->prediction = o.prediction;
        out->radius = o.radius;
        out->p_a_lower = o.p_a_lower;
        out->sigma = o.sigma;
        if (counts0_out) counts_to_array(o.counts0, counts0_out, counts_len);
        if (counts_out) counts_to_array(o.counts, counts_out, counts_len);
    });
}

pl_status pl_certified_radius(double sigma, double p_a_lower, double* out) {
    if (!out) return fail_null("pl_certified_radius");
    return guarded([&] { *out = certified_radius(sigma, p_a_lower); });
}

pl_status pl_certified_accuracy_curve(const int32_t* predictions, const double* radii,
                                      const int32_t* true_labels, int64_t n,
                                      const double* eps_grid, int32_t n_eps, double* acc_out) {
    if (!predictions || !radii || !true_labels || !eps_grid || !acc_out)
        return fail_null("pl_certified_accuracy_curve");
    return guarded([&] {
        std::vector<CertifyOutcome> outcomes(static_cast<std::size_t>(n));
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (int64_t i = 0; i < n; ++i) {
            outcomes[i].prediction = predictions[i];
            outcomes[i].radius = radii[i];
            labels[i] = true_labels[i];
        }
        const auto acc = certified_accuracy_curve(
            outcomes, labels, {eps_grid, static_cast<std::size_t>(n_eps)});
        std::memcpy(acc_out, acc.data(), sizeof(double) * acc.size());
    });
}

/* ---------- transport ---------- */

pl_status pl_estimate_transport(const pl_dist* d, const pl_purifier* p, const pl_grid* g,
                                double sigma, int64_t n, const double* r_grid, int32_t n_r,
                                uint64_t seed, uint64_t purifier_seed, int32_t workers,
                                pl_transport_result* out, double* exceedance_out) {
    if (!d || !p || !g || !r_grid || !out) return fail_null("pl_estimate_transport");
    return guarded([&] {
        const TransportEstimate est =
            estimate_transport(*d->impl, p->impl, g->impl, sigma, n,
                               {r_grid, static_cast<std::size_t>(n_r)}, seed, purifier_seed,
                               workers);
        out->sigma = est.sigma;
        out->n = est.n;
        out->mean_dist = est.mean_dist;
        out->std_err = est.std_err;
        if (exceedance_out) {
            for (int32_t i = 0; i < n_r; ++i) exceedance_out[i] = est.exceedance[i].second;
        }
    });
}

pl_status pl_markov_report(const pl_transport_result* est, const double* r_grid,
                           const double* exceedance, int32_t n_r, double* bound_out,
                           double* slack_out, int32_t* pass_out) {
    if (!est || !r_grid || !exceedance) return fail_null("pl_markov_report");
    return guarded([&] {
        TransportEstimate e;
        e.sigma = est->sigma;
        e.n = est->n;
        e.mean_dist = est->mean_dist;
        e.std_err = est->std_err;
        for (int32_t i = 0; i < n_r; ++i) e.exceedance.emplace_back(r_grid[i], exceedance[i]);
        const auto rows = markov_bound_report(e);
        for (int32_t i = 0; i < n_r; ++i) {
            if (bound_out) bound_out[i] = rows[i].bound;
            if (slack_out) slack_out[i] = rows[i].slack;
            if (pass_out) pass_out[i] = rows[i].pass ? 1 : 0;
        }
    });
}

/* ---------- training ---------- */

void pl_distill_config_default(pl_distill_config* cfg) {
    if (!cfg) return;
    cfg->iters = 4000;
    cfg->batch = 256;
    cfg->ema_decay = 0.999;
    cfg->lr = 1e-3;
    cfg->loss = 1;
    cfg->seed = 0;
    cfg->log_interval = 200;
    cfg->eval_n = 0;
    cfg->eval_sigmas = nullptr;
    cfg->n_eval_sigmas = 0;
}

void pl_finetune_config_default(pl_finetune_config* cfg) {
    if (!cfg) return;
    cfg->sigmas = nullptr;
    cfg->n_sigmas = 0;
    cfg->continuous = 0;
    cfg->cont_lo = 0.002;
    cfg->cont_hi = 1.0;
    cfg->iters = 2000;
    cfg->batch = 256;
    cfg->lr = 1e-4;
    cfg->loss = 2;
    cfg->seed = 1;
    cfg->log_interval = 200;
    cfg->eval_n = 0;
}

namespace {

TrainLogFn wrap_log(pl_train_log_fn log, void* user) {
    if (!log) return {};
    return [log, user](const TrainLogRecord& rec) {
        log(user, rec.iter, rec.loss, rec.transport.empty() ? nullptr : rec.transport.data(),
            static_cast<int32_t>(rec.transport.size()));
    };
}

}  // namespace

pl_status pl_distill(const pl_dist* d, pl_net* net, const pl_grid* g,
                     const pl_distill_config* cfg, pl_train_log_fn log, void* user) {
    if (!d || !net || !g || !cfg) return fail_null("pl_distill");
    return guarded([&] {
        DistillConfig dc;
        dc.iters = cfg->iters;
        dc.batch = cfg->batch;
        dc.ema_decay = cfg->ema_decay;
        dc.lr = cfg->lr;
        dc.loss = to_loss(cfg->loss);
        dc.seed = cfg->seed;
        dc.log_interval = cfg->log_interval;
        dc.eval_n = cfg->eval_n;
        if (cfg->eval_sigmas && cfg->n_eval_sigmas > 0)
            dc.eval_sigmas.assign(cfg->eval_sigmas, cfg->eval_sigmas + cfg->n_eval_sigmas);
        *net->impl = distill(*d->impl, std::move(*net->impl), g->impl, dc, wrap_log(log, user));
    });
}

pl_status pl_finetune(const pl_dist* d, pl_net* net, const pl_grid* g,
                      const pl_finetune_config* cfg, pl_train_log_fn log, void* user,
                      int64_t* sigma_draw_counts_out) {
    if (!d || !net || !g || !cfg) return fail_null("pl_finetune");
    return guarded([&] {
        FinetuneConfig fc;
        if (cfg->sigmas && cfg->n_sigmas > 0)
            fc.sigmas.assign(cfg->sigmas, cfg->sigmas + cfg->n_sigmas);
        fc.continuous = cfg->continuous != 0;
        fc.cont_lo = cfg->cont_lo;
        fc.cont_hi = cfg->cont_hi;
        fc.iters = cfg->iters;
        fc.batch = cfg->batch;
        fc.lr = cfg->lr;
        fc.loss = to_loss(cfg->loss);
        fc.seed = cfg->seed;
        fc.log_interval = cfg->log_interval;
        fc.eval_n = cfg->eval_n;
        FinetuneReport report;
        *net->impl = finetune(*d->impl, std::move(*net->impl), g->impl, fc, &report,
                              wrap_log(log, user));
        if (sigma_draw_counts_out) {
            for (std::size_t i = 0; i < report.sigma_draw_counts.size(); ++i)
                sigma_draw_counts_out[i] = report.sigma_draw_counts[i];
        }
    });
}

}  // extern "C"
