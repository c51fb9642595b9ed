#include "purifier.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace purelab {

namespace {

ScoreFn make_score_fn(const MixtureDistribution& dist) {
    return [&dist](std::span<const double> x, double t, std::span<double> out) {
        dist.score_into(x, t, out.data());
    };
}

}  // namespace

Purifier Purifier::onestep_posterior_mean(std::shared_ptr<const MixtureDistribution> dist) {
    Purifier p;
    p.kind_ = PurifierKind::OnestepPosteriorMean;
    p.dist_ = std::move(dist);
    return p;
}

Purifier Purifier::pf_ode(std::shared_ptr<const MixtureDistribution> dist, OdeSolverConfig cfg) {
    Purifier p;
    p.kind_ = PurifierKind::PfOde;
    p.dist_ = std::move(dist);
    p.ode_cfg_ = cfg;
    return p;
}

Purifier Purifier::reverse_sde(std::shared_ptr<const MixtureDistribution> dist, int steps) {
    Purifier p;
    p.kind_ = PurifierKind::ReverseSde;
    p.dist_ = std::move(dist);
    p.sde_steps_ = steps;
    return p;
}

Purifier Purifier::consistency_oracle(std::shared_ptr<const MixtureDistribution> dist) {
    Purifier p;
    p.kind_ = PurifierKind::ConsistencyOracle;
    p.dist_ = std::move(dist);
    p.ode_cfg_ = OdeSolverConfig{OdeMethod::Heun, 400, 0.002, 7.0};
    return p;
}

Purifier Purifier::consistency_net(std::shared_ptr<const ConsistencyNet> net) {
    Purifier p;
    p.kind_ = PurifierKind::ConsistencyNetKind;
    p.net_ = std::move(net);
    return p;
}

Purifier Purifier::debug_shift(double offset) {
    Purifier p;
    p.kind_ = PurifierKind::DebugShift;
    p.shift_ = offset;
    return p;
}

std::string Purifier::name() const {
    switch (kind_) {
        case PurifierKind::OnestepPosteriorMean: return "onestep";
        case PurifierKind::PfOde: return "pfode";
        case PurifierKind::ReverseSde: return "sde";
        case PurifierKind::ConsistencyOracle: return "cm-oracle";
        case PurifierKind::ConsistencyNetKind: return "cm-net";
        case PurifierKind::DebugShift: return "debug-shift";
    }
    return "?";
}

Vec Purifier::purify(std::span<const double> x_noisy, double sigma, const KarrasGrid& grid,
                     Rng& rng) const {
    if (!(sigma > 0.0)) throw_domain("purify requires sigma > 0");
    switch (kind_) {
        case PurifierKind::OnestepPosteriorMean: {
            const double t_star = select_timestep(grid, sigma);
            return dist_->posterior_mean(x_noisy, t_star);
        }
        case PurifierKind::PfOde: {
            const double t_star = select_timestep(grid, sigma);
            OdeSolverConfig cfg = ode_cfg_;
            cfg.t_end = grid.eps;
            if (t_star <= cfg.t_end) return Vec(x_noisy.begin(), x_noisy.end());
            return solve_pf_ode(make_score_fn(*dist_), x_noisy, t_star, cfg);
        }
        case PurifierKind::ReverseSde: {
            const double t_star = select_timestep(grid, sigma);
            if (t_star <= grid.eps) return Vec(x_noisy.begin(), x_noisy.end());
            return solve_reverse_sde(make_score_fn(*dist_), x_noisy, t_star, sde_steps_, grid.eps,
                                     rng);
        }
        case PurifierKind::ConsistencyOracle: {
            const double t_star = select_timestep(grid, sigma);
            OdeSolverConfig cfg = ode_cfg_;
            cfg.t_end = grid.eps;
            if (t_star <= cfg.t_end) return Vec(x_noisy.begin(), x_noisy.end());
            return solve_pf_ode(make_score_fn(*dist_), x_noisy, t_star, cfg);
        }
        case PurifierKind::ConsistencyNetKind: {
            if (static_cast<int>(x_noisy.size()) != net_->data_dim())
                throw_domain("consistency net purifier: data_dim mismatch");
            const double t_star = select_timestep(grid, sigma);
            return net_->forward(x_noisy, t_star);
        }
        case PurifierKind::DebugShift: {
            Vec out(x_noisy.begin(), x_noisy.end());
            for (double& v : out) v += shift_;
            return out;
        }
    }
    throw_invalid("unknown purifier kind");
}

VpMapping vp_to_edm(double alpha_bar) {
    if (!(alpha_bar > 0.0) || !(alpha_bar < 1.0))
        throw_domain("vp_to_edm requires alpha_bar in (0,1)");
    // x_hat0 = (x_t - sqrt(1-abar) eps_hat) / sqrt(abar) matches the Tweedie
    // mean after rescaling x_t by 1/sqrt(abar), with eps_hat = -t * score
    return VpMapping{alpha_bar, std::sqrt((1.0 - alpha_bar) / alpha_bar)};
}

double vp_alpha_bar_from_sigma(double sigma) {
    if (!(sigma > 0.0)) throw_domain("sigma must be positive");
    return 1.0 / (1.0 + sigma * sigma);
}

}  // namespace purelab
