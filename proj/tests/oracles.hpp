// Test-only reference implementations. Everything here is deliberately
// independent of the library code paths it checks: brute-force summation,
// bisection, finite differences and high-precision formula re-evaluation.
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

// central finite difference of a scalar function
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Phi via erf, the reference CDF for quantile checks
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// quantile by bisection on the erf-based CDF; the upper half bisects the
// survival function so the tail keeps full relative precision
inline double normal_quantile_bisect(double p) {
    if (p > 0.5) {
        const double q = 1.0 - p;  // exact for p >= 0.5
        double lo = -12.0, hi = 12.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (0.5 * std::erfc(mid / std::sqrt(2.0)) > q)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }
    double lo = -12.0, hi = 12.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// P(Binomial(n, p) >= k) by log-space pmf summation
inline double binom_tail_geq_sum(long long k, long long n, double p) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double tail = 0.0;
    for (long long i = k; i <= n; ++i) {
        const double lp = std::lgamma(static_cast<double>(n) + 1.0) -
                          std::lgamma(static_cast<double>(i) + 1.0) -
                          std::lgamma(static_cast<double>(n - i) + 1.0) +
                          static_cast<double>(i) * std::log(p) +
                          static_cast<double>(n - i) * std::log1p(-p);
        tail += std::exp(lp);
    }
    return tail;
}

// exact two-sided p-value at 1/2 by direct pmf summation
inline double binom_test_half_sum(long long k, long long n) {
    const long long m = std::max(k, n - k);
    const double t = binom_tail_geq_sum(m, n, 0.5);
    return std::min(1.0, 2.0 * t);
}

// Clopper-Pearson lower bound by bisection on the summed binomial tail
inline double clopper_pearson_lower_bisect(long long k, long long n, double alpha) {
    if (k == 0) return 0.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (binom_tail_geq_sum(k, n, mid) <= alpha)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

// 1D mixture CDF at diffusion time t for components (center, scale, weight)
struct Comp1d {
    double center, scale, weight;
};

inline double mixture_cdf_1d(std::span<const Comp1d> comps, double x, double t) {
    double acc = 0.0;
    for (const auto& c : comps) {
        const double s = std::sqrt(c.scale * c.scale + t * t);
        acc += c.weight * normal_cdf((x - c.center) / s);
    }
    return acc;
}

// quantile of the 1D diffused mixture by bisection
inline double mixture_quantile_1d(std::span<const Comp1d> comps, double q, double t, double lo,
                                  double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mixture_cdf_1d(comps, mid, t) < q)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Karras grid point in extended precision
inline long double karras_point_ld(long double eps, long double t_max, long double rho, int n,
                                   int i) {
    const long double u_lo = std::pow(eps, 1.0L / rho);
    const long double u_hi = std::pow(t_max, 1.0L / rho);
    const long double u = u_lo + (static_cast<long double>(i) / (n - 1)) * (u_hi - u_lo);
    return std::pow(u, rho);
}

// tanh by its exponential series, kept away from the library's closed forms
inline double tanh_series(double x) {
    // tanh(x) = (e^{2x} - 1) / (e^{2x} + 1), with exp via its Taylor series
    const double two_x = 2.0 * x;
    if (two_x > 700.0) return 1.0;
    if (two_x < -700.0) return -1.0;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= two_x / k;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return (sum - 1.0) / (sum + 1.0);
}

// one-sample Kolmogorov-Smirnov statistic against a CDF
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

}  // namespace oracle
