#include "stats.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace purelab {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Acklam's rational approximation to the normal quantile (~1.15e-9 abs error)
double acklam(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// continued fraction for the incomplete beta (modified Lentz)
double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double inverse_normal_cdf(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw_domain("inverse_normal_cdf requires p in (0,1), got " + std::to_string(p));
    // reflect the upper half onto the lower tail, where 1 - p is exact and
    // the erfc-based CDF keeps full relative precision for the Newton step
    if (p > 0.5) return -inverse_normal_cdf(1.0 - p);
    double z = acklam(p);
    const double pdf = normal_pdf(z);
    if (pdf > 0.0) z -= (normal_cdf(z) - p) / pdf;
    return z;
}

double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(b) - std::lgamma(a) +
                          b * std::log1p(-x) + a * std::log(x)) *
                     betacf(b, a, 1.0 - x) / b;
}

double binomial_tail_geq(std::int64_t k, std::int64_t n, double p) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    // P(X >= k) = I_p(k, n - k + 1)
    return reg_incomplete_beta(static_cast<double>(k), static_cast<double>(n - k + 1), p);
}

double clopper_pearson_lower(std::int64_t k, std::int64_t n, double alpha) {
    if (n < 1 || k < 0 || k > n) throw_domain("clopper_pearson_lower requires 0 <= k <= n, n >= 1");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw_domain("alpha must lie in (0,1)");
    if (k == 0) return 0.0;
    // largest p with P(Bin(n,p) >= k) <= alpha; the tail is increasing in p
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (binomial_tail_geq(k, n, mid) <= alpha)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    return lo;
}

double binom_test_two_sided(std::int64_t k, std::int64_t n) {
    if (k < 0 || k > n) throw_domain("binom_test requires 0 <= k <= n");
    if (n == 0) return 1.0;
    const std::int64_t m = std::max(k, n - k);
    const double tail = binomial_tail_geq(m, n, 0.5);
    return std::min(1.0, 2.0 * tail);
}

}  // namespace purelab
