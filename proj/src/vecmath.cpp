#include "vecmath.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace purelab {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double euclidean_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

double log_sum_exp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

namespace {

// Neumaier base case
double block_sum(const double* v, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s + v[i];
        if (std::abs(s) >= std::abs(v[i]))
            c += (s - t) + v[i];
        else
            c += (v[i] - t) + s;
        s = t;
    }
    return s + c;
}

double pairwise_rec(const double* v, std::size_t n) {
    if (n <= 128) return block_sum(v, n);
    const std::size_t h = n / 2;
    return pairwise_rec(v, h) + pairwise_rec(v + h, n - h);
}

}  // namespace

double pairwise_sum(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return pairwise_rec(v.data(), v.size());
}

std::uint64_t hash_bytes(const void* data, std::size_t n, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t hash_doubles(std::span<const double> v, std::uint64_t h) {
    return hash_bytes(v.data(), v.size() * sizeof(double), h);
}

void gemm_nt(const Mat& A, const Mat& B, Mat& C) {
    const int m = A.rows, k = A.cols, n = B.rows;
    C.rows = m;
    C.cols = n;
    C.a.assign(static_cast<std::size_t>(m) * n, 0.0);
    for (int i = 0; i < m; ++i) {
        const double* ai = A.row(i);
        double* ci = C.row(i);
        for (int j = 0; j < n; ++j) {
            const double* bj = B.row(j);
            double s = 0.0;
            for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
            ci[j] = s;
        }
    }
}

void gemm_tn(const Mat& A, const Mat& B, Mat& C) {
    const int m = A.rows, k = A.cols, n = B.cols;
    C.rows = k;
    C.cols = n;
    C.a.assign(static_cast<std::size_t>(k) * n, 0.0);
    for (int i = 0; i < m; ++i) {
        const double* ai = A.row(i);
        const double* bi = B.row(i);
        for (int p = 0; p < k; ++p) {
            const double aip = ai[p];
            if (aip == 0.0) continue;
            double* cp = C.row(p);
            for (int j = 0; j < n; ++j) cp[j] += aip * bi[j];
        }
    }
}

void gemm_nn(const Mat& A, const Mat& B, Mat& C) {
    const int m = A.rows, k = A.cols, n = B.cols;
    C.rows = m;
    C.cols = n;
    C.a.assign(static_cast<std::size_t>(m) * n, 0.0);
    for (int i = 0; i < m; ++i) {
        const double* ai = A.row(i);
        double* ci = C.row(i);
        for (int p = 0; p < k; ++p) {
            const double aip = ai[p];
            if (aip == 0.0) continue;
            const double* bp = B.row(p);
            for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

}  // namespace purelab
