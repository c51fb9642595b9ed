#include "train.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "error.hpp"

namespace purelab {

namespace {

// D rows for a batch given explicit MLP parameters (live or EMA copy)
Mat combined_forward(const ConsistencyNet& net, const Mlp& mlp, const Mat& X,
                     const std::vector<double>& ts, Mlp::Cache* cache) {
    const Mat in = net.assemble_input(X, ts);
    Mat F;
    mlp.forward(in, F, cache);
    Mat D(X.rows, X.cols);
    for (int r = 0; r < X.rows; ++r) {
        const double cs = net.c_skip(ts[r]);
        const double co = net.c_out(ts[r]);
        const double* x = X.row(r);
        const double* f = F.row(r);
        double* d = D.row(r);
        for (int j = 0; j < X.cols; ++j) d[j] = cs * x[j] + co * f[j];
    }
    return D;
}

struct BatchLoss {
    double mean = 0.0;
    Mat dD;  // d mean-loss / d D rows
};

BatchLoss batch_loss(const Loss& loss, const Mat& D, const Mat& target) {
    BatchLoss out;
    out.dD = Mat(D.rows, D.cols);
    const double inv_b = 1.0 / D.rows;
    for (int r = 0; r < D.rows; ++r) {
        std::span<const double> a{D.row(r), static_cast<std::size_t>(D.cols)};
        std::span<const double> b{target.row(r), static_cast<std::size_t>(D.cols)};
        out.mean += loss.distance(a, b) * inv_b;
        const Vec g = loss.grad_a(a, b);
        for (int j = 0; j < D.cols; ++j) out.dD.at(r, j) = g[j] * inv_b;
    }
    return out;
}

// dL/dF = c_out(t) * dL/dD row-wise
Mat to_mlp_cotangent(const ConsistencyNet& net, const Mat& dD, const std::vector<double>& ts) {
    Mat dF = dD;
    for (int r = 0; r < dF.rows; ++r) {
        const double co = net.c_out(ts[r]);
        double* row = dF.row(r);
        for (int j = 0; j < dF.cols; ++j) row[j] *= co;
    }
    return dF;
}

void heun_step_down(const MixtureDistribution& dist, const double* x, double t_hi, double t_lo,
                    double* out, int dim, double* s1, double* s2, double* x_pred) {
    dist.score_into({x, static_cast<std::size_t>(dim)}, t_hi, s1);
    const double h = t_lo - t_hi;  // negative
    for (int i = 0; i < dim; ++i) x_pred[i] = x[i] + h * (-t_hi * s1[i]);
    dist.score_into({x_pred, static_cast<std::size_t>(dim)}, t_lo, s2);
    for (int i = 0; i < dim; ++i) out[i] = x[i] + 0.5 * h * (-t_hi * s1[i] - t_lo * s2[i]);
}

}  // namespace

Loss make_loss(LossKind kind, int data_dim, std::uint64_t seed) {
    if (kind != LossKind::Feature) return Loss(kind);
    const int hidden = 32;
    const int out = 16;
    auto fmap = std::make_shared<const FeatureMap>(FeatureMap::create(data_dim, hidden, out, seed));
    return Loss(kind, fmap);
}

std::vector<double> eval_net_transport(const MixtureDistribution& dist, const ConsistencyNet& net,
                                       const KarrasGrid& grid, const std::vector<double>& sigmas,
                                       std::int64_t n, std::uint64_t seed) {
    std::vector<double> out;
    out.reserve(sigmas.size());
    const int dim = dist.dim();
    Vec x(dim), noisy(dim), purified(dim);
    const Rng base(seed);
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        const double sigma = sigmas[si];
        const double t_star = select_timestep(grid, sigma);
        double acc = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            Rng rng = base.child(si, static_cast<std::uint64_t>(i));
            int label = 0;
            dist.sample_one(rng, x.data(), &label);
            for (int j = 0; j < dim; ++j) noisy[j] = x[j] + sigma * rng.next_gaussian();
            net.forward_into(noisy, t_star, purified);
            acc += euclidean_distance(x, purified);
        }
        out.push_back(acc / static_cast<double>(n));
    }
    return out;
}

ConsistencyNet distill(const MixtureDistribution& dist, ConsistencyNet net, const KarrasGrid& grid,
                       const DistillConfig& cfg, const TrainLogFn& log) {
    if (net.data_dim() != dist.dim()) throw_domain("distill: net data_dim must match dist dim");
    if (cfg.iters < 0 || cfg.batch < 1) throw_invalid("distill: bad iteration/batch counts");
    if (!(cfg.ema_decay >= 0.0) || !(cfg.ema_decay < 1.0))
        throw_invalid("distill: ema_decay must lie in [0,1)");

    const int dim = dist.dim();
    const Loss loss = make_loss(cfg.loss, dim, cfg.seed);
    AdamState adam(net.mlp().param_count(), cfg.lr);
    EmaShadow ema(cfg.ema_decay, net.mlp().params());
    Mlp target_mlp = net.mlp();

    const Rng base(cfg.seed);
    Mat X_hi(cfg.batch, dim), X_lo(cfg.batch, dim);
    std::vector<double> ts_hi(cfg.batch), ts_lo(cfg.batch);
    Vec x0(dim), s1(dim), s2(dim), x_pred(dim);

    for (std::int64_t iter = 0; iter < cfg.iters; ++iter) {
        Rng rng = base.child(0xd157ull, static_cast<std::uint64_t>(iter));
        for (int b = 0; b < cfg.batch; ++b) {
            int label = 0;
            dist.sample_one(rng, x0.data(), &label);
            const int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(grid.n - 1)));
            const double t_lo = grid.points[i];
            const double t_hi = grid.points[i + 1];
            double* xh = X_hi.row(b);
            for (int j = 0; j < dim; ++j) xh[j] = x0[j] + t_hi * rng.next_gaussian();
            heun_step_down(dist, xh, t_hi, t_lo, X_lo.row(b), dim, s1.data(), s2.data(),
                           x_pred.data());
            ts_hi[b] = t_hi;
            ts_lo[b] = t_lo;
        }

        target_mlp.set_params(ema.params);
        const Mat target = combined_forward(net, target_mlp, X_lo, ts_lo, nullptr);

        Mlp::Cache cache;
        const Mat student = combined_forward(net, net.mlp(), X_hi, ts_hi, &cache);
        const BatchLoss bl = batch_loss(loss, student, target);
        if (!std::isfinite(bl.mean))
            throw Error(Errc::training,
                        "distill diverged: non-finite loss at iteration " + std::to_string(iter));
        const Mat dF = to_mlp_cotangent(net, bl.dD, ts_hi);
        std::vector<double> grads;
        net.mlp().backward(cache, dF, grads);
        try {
            adam.apply(net.mlp().mutable_params(), grads);
        } catch (const Error& e) {
            throw Error(Errc::training, std::string(e.what()) + " at iteration " +
                                            std::to_string(iter));
        }
        ema.update(net.mlp().params());

        if (log && (iter + 1 == cfg.iters || (cfg.log_interval > 0 &&
                                              (iter + 1) % cfg.log_interval == 0))) {
            TrainLogRecord rec;
            rec.iter = iter + 1;
            rec.loss = bl.mean;
            if (cfg.eval_n > 0) {
                ConsistencyNet snapshot = net;
                snapshot.mlp().set_params(ema.params);
                rec.transport = eval_net_transport(dist, snapshot, grid, cfg.eval_sigmas,
                                                   cfg.eval_n, base.child(0xe7a1ull).next_u64());
            }
            log(rec);
        }
    }

    net.mlp().set_params(ema.params);
    return net;
}

ConsistencyNet finetune(const MixtureDistribution& dist, ConsistencyNet net,
                        const KarrasGrid& grid, const FinetuneConfig& cfg, FinetuneReport* report,
                        const TrainLogFn& log) {
    if (net.data_dim() != dist.dim()) throw_domain("finetune: net data_dim must match dist dim");
    if (cfg.iters < 0 || cfg.batch < 1) throw_invalid("finetune: bad iteration/batch counts");
    if (cfg.sigmas.empty()) throw_invalid("finetune: sigma set must be nonempty");
    for (double s : cfg.sigmas) {
        if (!(s >= grid.eps) || !(s <= grid.t_max))
            throw_domain("finetune: sigma " + std::to_string(s) + " outside the grid horizon");
    }
    if (cfg.continuous && !(cfg.cont_lo < cfg.cont_hi))
        throw_invalid("finetune: continuous schedule needs cont_lo < cont_hi");

    const int dim = dist.dim();
    const Loss loss = make_loss(cfg.loss, dim, cfg.seed);
    AdamState adam(net.mlp().param_count(), cfg.lr);
    if (report) report->sigma_draw_counts.assign(cfg.sigmas.size(), 0);

    const Rng base(cfg.seed);
    Mat X_clean(cfg.batch, dim), X_noisy(cfg.batch, dim);
    std::vector<double> ts(cfg.batch);
    Vec x(dim);

    for (std::int64_t iter = 0; iter < cfg.iters; ++iter) {
        Rng rng = base.child(0xf17eull, static_cast<std::uint64_t>(iter));
        for (int b = 0; b < cfg.batch; ++b) {
            int label = 0;
            dist.sample_one(rng, x.data(), &label);
            double sigma;
            if (cfg.continuous) {
                sigma = cfg.cont_lo + (cfg.cont_hi - cfg.cont_lo) * rng.next_double();
                sigma = std::max(sigma, grid.eps);
            } else {
                const auto si = rng.next_below(cfg.sigmas.size());
                sigma = cfg.sigmas[si];
                if (report) ++report->sigma_draw_counts[si];
            }
            double* xc = X_clean.row(b);
            double* xn = X_noisy.row(b);
            for (int j = 0; j < dim; ++j) {
                xc[j] = x[j];
                xn[j] = x[j] + sigma * rng.next_gaussian();
            }
            ts[b] = select_timestep(grid, sigma);
        }

        Mlp::Cache cache;
        const Mat purified = combined_forward(net, net.mlp(), X_noisy, ts, &cache);
        const BatchLoss bl = batch_loss(loss, purified, X_clean);
        if (!std::isfinite(bl.mean))
            throw Error(Errc::training,
                        "finetune diverged: non-finite loss at iteration " + std::to_string(iter));
        const Mat dF = to_mlp_cotangent(net, bl.dD, ts);
        std::vector<double> grads;
        net.mlp().backward(cache, dF, grads);
        try {
            adam.apply(net.mlp().mutable_params(), grads);
        } catch (const Error& e) {
            throw Error(Errc::training, std::string(e.what()) + " at iteration " +
                                            std::to_string(iter));
        }

        if (log && (iter + 1 == cfg.iters || (cfg.log_interval > 0 &&
                                              (iter + 1) % cfg.log_interval == 0))) {
            TrainLogRecord rec;
            rec.iter = iter + 1;
            rec.loss = bl.mean;
            if (cfg.eval_n > 0)
                rec.transport = eval_net_transport(dist, net, grid, cfg.sigmas, cfg.eval_n,
                                                   base.child(0xe7a1ull).next_u64());
            log(rec);
        }
    }
    return net;
}

}  // namespace purelab
