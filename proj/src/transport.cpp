#include "transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "parallel.hpp"

namespace purelab {

TransportEstimate estimate_transport_fn(const MixtureDistribution& dist, const PurifyFn& purify,
                                        double sigma, std::int64_t n,
                                        std::span<const double> r_grid, std::uint64_t seed,
                                        std::uint64_t purifier_seed, int workers) {
    if (n < 2) throw_invalid("estimate_transport requires n >= 2");
    if (r_grid.empty()) throw_invalid("estimate_transport requires a nonempty r grid");
    if (!std::is_sorted(r_grid.begin(), r_grid.end()))
        throw_invalid("estimate_transport requires an ascending r grid");
    for (double r : r_grid)
        if (!(r > 0.0)) throw_domain("r grid entries must be positive");

    const int dim = dist.dim();
    std::vector<double> dists(static_cast<std::size_t>(n));
    const Rng input_base(seed);
    const Rng pur_base(purifier_seed);
    parallel_for(n, workers, [&](std::int64_t begin, std::int64_t end) {
        Vec x(dim), noisy(dim);
        for (std::int64_t i = begin; i < end; ++i) {
            Rng in_rng = input_base.child(0x1a7ull, static_cast<std::uint64_t>(i));
            int label = 0;
            dist.sample_one(in_rng, x.data(), &label);
            for (int j = 0; j < dim; ++j) noisy[j] = x[j] + sigma * in_rng.next_gaussian();
            Rng p_rng = pur_base.child(0x9b5ull, static_cast<std::uint64_t>(i));
            Vec purified;
            try {
                purified = purify(noisy, p_rng);
            } catch (const Error& e) {
                throw Error(e.code(), std::string(e.what()) + " (transport draw " +
                                          std::to_string(i) + ")");
            }
            dists[static_cast<std::size_t>(i)] = euclidean_distance(x, purified);
        }
    });

    TransportEstimate est;
    est.sigma = sigma;
    est.n = n;
    est.mean_dist = pairwise_sum(dists) / static_cast<double>(n);
    std::vector<double> sq(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i) {
        const double d = dists[i] - est.mean_dist;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    est.std_err = std::sqrt(var / static_cast<double>(n));
    est.exceedance.reserve(r_grid.size());
    for (double r : r_grid) {
        std::int64_t over = 0;
        for (double d : dists)
            if (d > r) ++over;
        est.exceedance.emplace_back(r, static_cast<double>(over) / static_cast<double>(n));
    }
    return est;
}

TransportEstimate estimate_transport(const MixtureDistribution& dist, const Purifier& purifier,
                                     const KarrasGrid& grid, double sigma, std::int64_t n,
                                     std::span<const double> r_grid, std::uint64_t seed,
                                     std::uint64_t purifier_seed, int workers) {
    const PurifyFn fn = [&](std::span<const double> noisy, Rng& rng) {
        return purifier.purify(noisy, sigma, grid, rng);
    };
    return estimate_transport_fn(dist, fn, sigma, n, r_grid, seed, purifier_seed, workers);
}

std::vector<MarkovRow> markov_bound_report(const TransportEstimate& est) {
    if (est.n < 2) throw_invalid("markov_bound_report requires a valid estimate");
    std::vector<MarkovRow> rows;
    rows.reserve(est.exceedance.size());
    for (const auto& [r, exc] : est.exceedance) {
        if (!(r > 0.0)) throw_domain("markov_bound_report: r must be positive");
        MarkovRow row;
        row.r = r;
        row.exceedance = exc;
        row.bound = est.mean_dist / r;
        const double se_binom = std::sqrt(exc * (1.0 - exc) / static_cast<double>(est.n));
        const double se = se_binom + est.std_err / r;
        row.slack = row.bound + 3.0 * se - exc;
        row.pass = row.slack >= 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<TransportEstimate> transport_comparison(const MixtureDistribution& dist,
                                                    const std::vector<Purifier>& purifiers,
                                                    std::span<const double> sigmas, std::int64_t n,
                                                    std::span<const double> r_grid,
                                                    const KarrasGrid& grid, std::uint64_t seed,
                                                    int workers) {
    if (purifiers.empty() || sigmas.empty())
        throw_invalid("transport_comparison requires purifiers and sigmas");
    std::vector<TransportEstimate> out;
    out.reserve(purifiers.size() * sigmas.size());
    for (std::size_t k = 0; k < purifiers.size(); ++k) {
        for (std::size_t si = 0; si < sigmas.size(); ++si) {
            // input seed depends only on sigma so purifiers see paired draws
            const std::uint64_t input_seed = Rng(seed).child(0x5e11ull, si).next_u64();
            const std::uint64_t pur_seed = Rng(seed).child(0xcafeull + k, si).next_u64();
            out.push_back(estimate_transport(dist, purifiers[k], grid, sigmas[si], n, r_grid,
                                             input_seed, pur_seed, workers));
        }
    }
    return out;
}

}  // namespace purelab
