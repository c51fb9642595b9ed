#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "vecmath.hpp"

namespace purelab {

// One mixture component. scale = 0 makes it a Dirac; the forward perturbation
// turns it into a Gaussian for any t > 0, so a single code path serves both.
struct MixtureComponent {
    Vec center;
    double scale = 0.0;
    double weight = 1.0;
    int label = 0;
};

// Analytic data distribution: a finite mixture of Diracs / isotropic
// Gaussians with class labels. Densities, scores and posterior means under
// the perturbation kernel x_t = x_0 + t*eps are exact, which makes the
// distribution usable as its own oracle.
class MixtureDistribution {
public:
    MixtureDistribution(std::vector<MixtureComponent> components, int dim);

    int dim() const { return dim_; }
    const std::vector<MixtureComponent>& components() const { return components_; }
    bool all_dirac() const;
    int max_label() const;

    struct Draw {
        Vec point;
        int label = 0;
    };

    std::vector<Draw> sample(std::int64_t n, Rng& rng) const;
    void sample_one(Rng& rng, double* x_out, int* label_out) const;

    // log of the density of x_0 + t*eps at x; log-sum-exp over components
    double diffused_log_density(std::span<const double> x, double t) const;

    // exact gradient of diffused_log_density in x
    Vec score(std::span<const double> x, double t) const;
    void score_into(std::span<const double> x, double t, double* out) const;

    // E[x_0 | x_t = x] = x + t^2 * score(x, t)
    Vec posterior_mean(std::span<const double> x, double t) const;

    // closest component center (all components must be Diracs)
    std::pair<Vec, int> nearest_data_point(std::span<const double> x) const;

    static MixtureDistribution two_dirac();
    static MixtureDistribution four_dirac_2d();

private:
    std::vector<MixtureComponent> components_;
    int dim_;
    std::vector<double> cumulative_weights_;
};

}  // namespace purelab
