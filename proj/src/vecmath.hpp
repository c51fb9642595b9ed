#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace purelab {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_norm(std::span<const double> a);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

// log(sum_i exp(v_i)) without overflow
double log_sum_exp(std::span<const double> v);

// deterministic compensated pairwise summation; result is independent of how
// the array was produced (workers write disjoint slots, reduction is serial)
double pairwise_sum(std::span<const double> v);

// FNV-1a over raw bytes
std::uint64_t hash_bytes(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t hash_doubles(std::span<const double> v, std::uint64_t h = 0xcbf29ce484222325ull);

// dense row-major matrix, minimal on purpose
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double* row(int i) { return a.data() + static_cast<std::size_t>(i) * cols; }
    const double* row(int i) const { return a.data() + static_cast<std::size_t>(i) * cols; }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

// C = A * B^T   (A: m x k, B: n x k, C: m x n)
void gemm_nt(const Mat& A, const Mat& B, Mat& C);
// C = A^T * B   (A: m x k, B: m x n, C: k x n)
void gemm_tn(const Mat& A, const Mat& B, Mat& C);
// C = A * B     (A: m x k, B: k x n, C: m x n)
void gemm_nn(const Mat& A, const Mat& B, Mat& C);

}  // namespace purelab
