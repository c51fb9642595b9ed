#include "mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "error.hpp"

namespace purelab {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

void require_time(double t) {
    if (!(t > 0.0)) throw_domain("diffusion time must be positive, got " + std::to_string(t));
}

}  // namespace

MixtureDistribution::MixtureDistribution(std::vector<MixtureComponent> components, int dim)
    : components_(std::move(components)), dim_(dim) {
    if (dim_ <= 0) throw_invalid("dim must be positive");
    if (components_.empty()) throw_invalid("mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (static_cast<int>(c.center.size()) != dim_)
            throw_invalid("component center length does not match dim");
        if (c.scale < 0.0) throw_invalid("component scale must be nonnegative");
        if (!(c.weight > 0.0)) throw_invalid("component weight must be positive");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw_invalid("component weights must sum to 1");
    cumulative_weights_.reserve(components_.size());
    double acc = 0.0;
    for (const auto& c : components_) {
        acc += c.weight;
        cumulative_weights_.push_back(acc);
    }
    cumulative_weights_.back() = 1.0;
}

bool MixtureDistribution::all_dirac() const {
    return std::all_of(components_.begin(), components_.end(),
                       [](const MixtureComponent& c) { return c.scale == 0.0; });
}

int MixtureDistribution::max_label() const {
    int m = components_.front().label;
    for (const auto& c : components_) m = std::max(m, c.label);
    return m;
}

void MixtureDistribution::sample_one(Rng& rng, double* x_out, int* label_out) const {
    const double u = rng.next_double();
    const std::size_t k =
        std::upper_bound(cumulative_weights_.begin(), cumulative_weights_.end(), u) -
        cumulative_weights_.begin();
    const auto& c = components_[std::min(k, components_.size() - 1)];
    for (int i = 0; i < dim_; ++i) x_out[i] = c.center[i] + c.scale * rng.next_gaussian();
    if (label_out) *label_out = c.label;
}

std::vector<MixtureDistribution::Draw> MixtureDistribution::sample(std::int64_t n, Rng& rng) const {
    if (n < 1) throw_invalid("sample count must be >= 1");
    std::vector<Draw> out(static_cast<std::size_t>(n));
    for (auto& d : out) {
        d.point.resize(dim_);
        sample_one(rng, d.point.data(), &d.label);
    }
    return out;
}

double MixtureDistribution::diffused_log_density(std::span<const double> x, double t) const {
    require_time(t);
    const std::size_t n = components_.size();
    double stack[64];
    std::vector<double> heap;
    double* lw = stack;
    if (n > 64) {
        heap.resize(n);
        lw = heap.data();
    }
    for (std::size_t k = 0; k < n; ++k) {
        const auto& c = components_[k];
        const double var = c.scale * c.scale + t * t;
        lw[k] = std::log(c.weight) - 0.5 * dim_ * (kLog2Pi + std::log(var)) -
                squared_distance(x, c.center) / (2.0 * var);
    }
    return log_sum_exp({lw, n});
}

void MixtureDistribution::score_into(std::span<const double> x, double t, double* out) const {
    require_time(t);
    const std::size_t n = components_.size();
    double stack[64];
    std::vector<double> heap;
    double* lw = stack;
    if (n > 64) {
        heap.resize(n);
        lw = heap.data();
    }
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& c = components_[k];
        const double var = c.scale * c.scale + t * t;
        lw[k] = std::log(c.weight) - 0.5 * dim_ * (kLog2Pi + std::log(var)) -
                squared_distance(x, c.center) / (2.0 * var);
        m = std::max(m, lw[k]);
    }
    double z = 0.0;
    for (std::size_t k = 0; k < n; ++k) z += std::exp(lw[k] - m);
    for (int i = 0; i < dim_; ++i) out[i] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& c = components_[k];
        const double var = c.scale * c.scale + t * t;
        const double resp = std::exp(lw[k] - m) / z;
        if (resp == 0.0) continue;
        for (int i = 0; i < dim_; ++i) out[i] += resp * (c.center[i] - x[i]) / var;
    }
}

Vec MixtureDistribution::score(std::span<const double> x, double t) const {
    Vec out(dim_);
    score_into(x, t, out.data());
    return out;
}

Vec MixtureDistribution::posterior_mean(std::span<const double> x, double t) const {
    Vec s = score(x, t);
    Vec out(dim_);
    for (int i = 0; i < dim_; ++i) out[i] = x[i] + t * t * s[i];
    return out;
}

std::pair<Vec, int> MixtureDistribution::nearest_data_point(std::span<const double> x) const {
    if (!all_dirac())
        throw Error(Errc::unsupported, "nearest_data_point requires a pure Dirac mixture");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const double d = squared_distance(x, components_[k].center);
        if (d < best_d) {  // strict: ties keep the lowest index
            best_d = d;
            best = k;
        }
    }
    return {components_[best].center, components_[best].label};
}

MixtureDistribution MixtureDistribution::two_dirac() {
    std::vector<MixtureComponent> comps;
    comps.push_back({{-1.0}, 0.0, 0.5, 0});
    comps.push_back({{1.0}, 0.0, 0.5, 1});
    return MixtureDistribution(std::move(comps), 1);
}

MixtureDistribution MixtureDistribution::four_dirac_2d() {
    std::vector<MixtureComponent> comps;
    comps.push_back({{-2.0, -2.0}, 0.0, 0.25, 0});
    comps.push_back({{-2.0, 2.0}, 0.0, 0.25, 1});
    comps.push_back({{2.0, -2.0}, 0.0, 0.25, 2});
    comps.push_back({{2.0, 2.0}, 0.0, 0.25, 3});
    return MixtureDistribution(std::move(comps), 2);
}

}  // namespace purelab
