#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mixture.hpp"
#include "purifier.hpp"
#include "time_grid.hpp"

namespace purelab {

// Monte Carlo estimate of E ||x - purify(x + sigma z)|| with per-radius
// exceedance probabilities computed on the same draws.
struct TransportEstimate {
    double sigma = 0.0;
    std::int64_t n = 0;
    double mean_dist = 0.0;
    double std_err = 0.0;
    std::vector<std::pair<double, double>> exceedance;  // (r, P(dist > r))
};

struct MarkovRow {
    double r = 0.0;
    double exceedance = 0.0;
    double bound = 0.0;  // mean_dist / r
    double slack = 0.0;  // bound + 3*SE - exceedance
    bool pass = false;
};

inline const std::vector<double>& default_r_grid() {
    static const std::vector<double> grid = {0.1, 0.25, 0.5, 1.0, 2.0};
    return grid;
}

// generic map under test; rng carries any internal randomness
using PurifyFn = std::function<Vec(std::span<const double> x_noisy, Rng& rng)>;

// input draws come from `seed`, purifier-internal randomness from
// `purifier_seed`, so different purifiers can be paired on the same inputs
TransportEstimate estimate_transport_fn(const MixtureDistribution& dist, const PurifyFn& purify,
                                        double sigma, std::int64_t n,
                                        std::span<const double> r_grid, std::uint64_t seed,
                                        std::uint64_t purifier_seed, int workers = 1);

TransportEstimate estimate_transport(const MixtureDistribution& dist, const Purifier& purifier,
                                     const KarrasGrid& grid, double sigma, std::int64_t n,
                                     std::span<const double> r_grid, std::uint64_t seed,
                                     std::uint64_t purifier_seed, int workers = 1);

// empirical check of the exceedance bound P(dist > r) <= mean_dist / r with
// a 3-standard-error statistical slack
std::vector<MarkovRow> markov_bound_report(const TransportEstimate& est);

// one estimate per (purifier, sigma); draws are paired across purifiers
// through the shared base seed
std::vector<TransportEstimate> transport_comparison(const MixtureDistribution& dist,
                                                    const std::vector<Purifier>& purifiers,
                                                    std::span<const double> sigmas, std::int64_t n,
                                                    std::span<const double> r_grid,
                                                    const KarrasGrid& grid, std::uint64_t seed,
                                                    int workers = 1);

}  // namespace purelab
