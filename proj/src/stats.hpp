#pragma once

#include <cstdint>

namespace purelab {

double normal_cdf(double z);
double normal_pdf(double z);

// quantile of the standard normal; rational approximation polished with one
// Newton step against the erfc-based CDF
double inverse_normal_cdf(double p);

// regularized incomplete beta I_x(a, b) by Lentz continued fraction
double reg_incomplete_beta(double a, double b, double x);

// P(Binomial(n, p) >= k)
double binomial_tail_geq(std::int64_t k, std::int64_t n, double p);

// exact one-sided lower confidence bound for a binomial proportion
double clopper_pearson_lower(std::int64_t k, std::int64_t n, double alpha);

// two-sided exact binomial test at success probability 1/2;
// convention: doubled smaller tail, capped at 1
double binom_test_two_sided(std::int64_t k, std::int64_t n);

}  // namespace purelab
