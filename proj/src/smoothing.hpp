#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "classifier.hpp"
#include "purifier.hpp"
#include "time_grid.hpp"

namespace purelab {

inline constexpr int kAbstain = -1;

struct CertifyOutcome {
    int prediction = kAbstain;  // class label, or kAbstain
    double radius = 0.0;        // l2 units; 0 when abstaining
    double p_a_lower = 0.0;
    double sigma = 0.0;
    std::map<int, std::int64_t> counts0;  // selection votes
    std::map<int, std::int64_t> counts;   // certification votes
};

// Monte Carlo vote tally: per vote i the generator is derived from
// (seed, stream, i), so the tally is identical for any worker count.
std::map<int, std::int64_t> collect_votes(const Purifier& purifier, const Classifier& classifier,
                                          std::span<const double> x, double sigma, std::int64_t n,
                                          const KarrasGrid& grid, std::uint64_t seed,
                                          std::uint64_t stream, int workers);

// top label if the two-sided binomial test on the top-two counts passes at
// level alpha, else abstain
int predict(const Purifier& purifier, const Classifier& classifier, std::span<const double> x,
            double sigma, std::int64_t n, double alpha, const KarrasGrid& grid, std::uint64_t seed,
            int workers = 1);

// radius = sigma * Phi^{-1}(p_a_lower)
double certified_radius(double sigma, double p_a_lower);

// the statistics half of certification, separated so bounds can be injected
CertifyOutcome certify_from_counts(const std::map<int, std::int64_t>& counts0,
                                   const std::map<int, std::int64_t>& counts, std::int64_t n_cert,
                                   double sigma, double alpha);

CertifyOutcome certify(const Purifier& purifier, const Classifier& classifier,
                       std::span<const double> x, double sigma, std::int64_t n0,
                       std::int64_t n_cert, double alpha, const KarrasGrid& grid,
                       std::uint64_t seed, int workers = 1);

// accuracy(eps) = fraction with prediction == true label and radius >= eps;
// abstentions count as incorrect
std::vector<double> certified_accuracy_curve(std::span<const CertifyOutcome> outcomes,
                                             std::span<const int> true_labels,
                                             std::span<const double> eps_grid);

// pointwise max across per-sigma accuracy curves
std::vector<double> best_over_sigma(const std::vector<std::vector<double>>& curves);

}  // namespace purelab
