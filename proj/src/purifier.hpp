#pragma once

#include <memory>
#include <span>
#include <string>

#include "consistency_net.hpp"
#include "edm.hpp"
#include "mixture.hpp"
#include "rng.hpp"
#include "time_grid.hpp"

namespace purelab {

enum class PurifierKind {
    OnestepPosteriorMean,  // exact Tweedie mean at the selected timestep
    PfOde,                 // multi-step probability-flow ODE with exact scores
    ReverseSde,            // Euler-Maruyama reverse SDE (the only stochastic kind)
    ConsistencyOracle,     // high-accuracy PF-ODE solve, ground truth for the net
    ConsistencyNetKind,    // one evaluation of a trained consistency model
    DebugShift,            // diagnostic: returns the noisy input plus a constant offset
};

// Uniform purifier contract: map (noisy sample, noise level) to a purified
// sample. Score-based kinds hold the analytic distribution; the net kind
// holds a trained model. Copies are cheap (shared immutable context).
class Purifier {
public:
    static Purifier onestep_posterior_mean(std::shared_ptr<const MixtureDistribution> dist);
    static Purifier pf_ode(std::shared_ptr<const MixtureDistribution> dist, OdeSolverConfig cfg);
    static Purifier reverse_sde(std::shared_ptr<const MixtureDistribution> dist, int steps);
    static Purifier consistency_oracle(std::shared_ptr<const MixtureDistribution> dist);
    static Purifier consistency_net(std::shared_ptr<const ConsistencyNet> net);
    static Purifier debug_shift(double offset);

    PurifierKind kind() const { return kind_; }
    bool stochastic() const { return kind_ == PurifierKind::ReverseSde; }
    std::string name() const;

    // t* = select_timestep(grid, sigma) wherever a grid time is needed;
    // only the reverse-SDE kind consumes the generator
    Vec purify(std::span<const double> x_noisy, double sigma, const KarrasGrid& grid,
               Rng& rng) const;

private:
    PurifierKind kind_ = PurifierKind::OnestepPosteriorMean;
    std::shared_ptr<const MixtureDistribution> dist_;
    std::shared_ptr<const ConsistencyNet> net_;
    OdeSolverConfig ode_cfg_;
    int sde_steps_ = 200;
    double shift_ = 0.0;
};

// records the equivalence between the variance-preserving one-step
// reconstruction and the EDM parameterization: sigma^2 = (1 - abar) / abar
struct VpMapping {
    double alpha_bar = 0.5;
    double sigma = 1.0;
};

VpMapping vp_to_edm(double alpha_bar);
double vp_alpha_bar_from_sigma(double sigma);

}  // namespace purelab
