#include "smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"
#include "stats.hpp"

namespace purelab {

namespace {

// (count desc, label asc) ordering for top-label selection
std::pair<int, std::int64_t> top_label(const std::map<int, std::int64_t>& counts) {
    int best = kAbstain;
    std::int64_t best_n = -1;
    for (const auto& [label, n] : counts) {
        if (n > best_n) {  // map iterates labels ascending, so ties keep the lower id
            best = label;
            best_n = n;
        }
    }
    return {best, best_n};
}

std::pair<int, std::int64_t> runner_up(const std::map<int, std::int64_t>& counts, int top) {
    int best = kAbstain;
    std::int64_t best_n = -1;
    for (const auto& [label, n] : counts) {
        if (label == top) continue;
        if (n > best_n) {
            best = label;
            best_n = n;
        }
    }
    if (best == kAbstain) best_n = 0;
    return {best, best_n};
}

}  // namespace

std::map<int, std::int64_t> collect_votes(const Purifier& purifier, const Classifier& classifier,
                                          std::span<const double> x, double sigma, std::int64_t n,
                                          const KarrasGrid& grid, std::uint64_t seed,
                                          std::uint64_t stream, int workers) {
    if (n < 1) throw_invalid("vote count must be >= 1");
    const std::size_t dim = x.size();
    std::vector<int> labels(static_cast<std::size_t>(n));
    const Rng base(seed);
    parallel_for(n, workers, [&](std::int64_t begin, std::int64_t end) {
        Vec noisy(dim);
        for (std::int64_t i = begin; i < end; ++i) {
            Rng rng = base.child(stream, static_cast<std::uint64_t>(i));
            for (std::size_t j = 0; j < dim; ++j) noisy[j] = x[j] + sigma * rng.next_gaussian();
            const Vec purified = purifier.purify(noisy, sigma, grid, rng);
            labels[static_cast<std::size_t>(i)] = classifier.classify(purified);
        }
    });
    std::map<int, std::int64_t> counts;
    for (int label : labels) ++counts[label];
    return counts;
}

int predict(const Purifier& purifier, const Classifier& classifier, std::span<const double> x,
            double sigma, std::int64_t n, double alpha, const KarrasGrid& grid, std::uint64_t seed,
            int workers) {
    const auto counts = collect_votes(purifier, classifier, x, sigma, n, grid, seed, 0, workers);
    const auto [top, n_a] = top_label(counts);
    const auto [second, n_b] = runner_up(counts, top);
    (void)second;
    const double p_value = binom_test_two_sided(n_a, n_a + n_b);
    return p_value <= alpha ? top : kAbstain;
}

double certified_radius(double sigma, double p_a_lower) {
    return sigma * inverse_normal_cdf(p_a_lower);
}

CertifyOutcome certify_from_counts(const std::map<int, std::int64_t>& counts0,
                                   const std::map<int, std::int64_t>& counts, std::int64_t n_cert,
                                   double sigma, double alpha) {
    CertifyOutcome out;
    out.sigma = sigma;
    out.counts0 = counts0;
    out.counts = counts;
    const auto [y_hat, n_sel] = top_label(counts0);
    (void)n_sel;
    const auto it = counts.find(y_hat);
    const std::int64_t k = it == counts.end() ? 0 : it->second;
    out.p_a_lower = clopper_pearson_lower(k, n_cert, alpha);
    if (out.p_a_lower > 0.5) {
        out.prediction = y_hat;
        out.radius = certified_radius(sigma, out.p_a_lower);
    } else {
        out.prediction = kAbstain;
        out.radius = 0.0;
    }
    return out;
}

CertifyOutcome certify(const Purifier& purifier, const Classifier& classifier,
                       std::span<const double> x, double sigma, std::int64_t n0,
                       std::int64_t n_cert, double alpha, const KarrasGrid& grid,
                       std::uint64_t seed, int workers) {
    if (n0 < 1 || n_cert < 1) throw_invalid("certify requires n0 >= 1 and n_cert >= 1");
    const auto counts0 =
        collect_votes(purifier, classifier, x, sigma, n0, grid, seed, 0, workers);
    const auto counts =
        collect_votes(purifier, classifier, x, sigma, n_cert, grid, seed, 1, workers);
    return certify_from_counts(counts0, counts, n_cert, sigma, alpha);
}

std::vector<double> certified_accuracy_curve(std::span<const CertifyOutcome> outcomes,
                                             std::span<const int> true_labels,
                                             std::span<const double> eps_grid) {
    if (outcomes.empty()) throw_domain("certified_accuracy_curve: empty outcomes");
    if (outcomes.size() != true_labels.size())
        throw_invalid("certified_accuracy_curve: outcomes and labels must align");
    std::vector<double> acc(eps_grid.size(), 0.0);
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        std::int64_t hits = 0;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const auto& o = outcomes[i];
            if (o.prediction != kAbstain && o.prediction == true_labels[i] &&
                o.radius >= eps_grid[e])
                ++hits;
        }
        acc[e] = static_cast<double>(hits) / static_cast<double>(outcomes.size());
    }
    return acc;
}

std::vector<double> best_over_sigma(const std::vector<std::vector<double>>& curves) {
    if (curves.empty()) throw_domain("best_over_sigma: no curves");
    std::vector<double> best = curves.front();
    for (const auto& c : curves) {
        if (c.size() != best.size()) throw_invalid("best_over_sigma: curve length mismatch");
        for (std::size_t i = 0; i < c.size(); ++i) best[i] = std::max(best[i], c[i]);
    }
    return best;
}

}  // namespace purelab
