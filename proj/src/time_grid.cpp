#include "time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace purelab {

KarrasGrid build_grid(double eps, double t_max, double rho, int n) {
    if (!(eps > 0.0) || !(eps < t_max)) throw_domain("grid requires 0 < eps < t_max");
    if (n < 2) throw_domain("grid requires n >= 2");
    if (!(rho > 0.0)) throw_domain("grid requires rho > 0");

    KarrasGrid grid;
    grid.eps = eps;
    grid.t_max = t_max;
    grid.rho = rho;
    grid.n = n;
    grid.points.resize(n);
    const double u_lo = std::pow(eps, 1.0 / rho);
    const double u_hi = std::pow(t_max, 1.0 / rho);
    for (int i = 0; i < n; ++i) {
        const double u = u_lo + (static_cast<double>(i) / (n - 1)) * (u_hi - u_lo);
        grid.points[i] = std::pow(u, rho);
    }
    grid.points.front() = eps;
    grid.points.back() = t_max;
    for (int i = 0; i + 1 < n; ++i) {
        if (!(grid.points[i] < grid.points[i + 1]))
            throw_domain("grid points are not strictly increasing");
    }
    grid.midpoints.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i)
        grid.midpoints[i] = 0.5 * (grid.points[i] + grid.points[i + 1]);
    return grid;
}

int select_timestep_index(const KarrasGrid& grid, double sigma) {
    if (!(sigma > 0.0)) throw_domain("sigma must be positive, got " + std::to_string(sigma));
    // cell i is (m_{i-1}, m_i]; the first midpoint >= sigma identifies it,
    // which also clamps sigma beyond the outermost midpoints to the end cells
    const auto it = std::lower_bound(grid.midpoints.begin(), grid.midpoints.end(), sigma);
    return static_cast<int>(it - grid.midpoints.begin());
}

double select_timestep(const KarrasGrid& grid, double sigma) {
    return grid.points[select_timestep_index(grid, sigma)];
}

std::vector<double> warped_time_points(double t_hi, double t_lo, double rho, int steps) {
    if (!(t_hi > t_lo) || !(t_lo > 0.0)) throw_domain("time points require t_hi > t_lo > 0");
    if (steps < 1) throw_domain("time points require steps >= 1");
    std::vector<double> ts(steps + 1);
    const double u_hi = std::pow(t_hi, 1.0 / rho);
    const double u_lo = std::pow(t_lo, 1.0 / rho);
    for (int k = 0; k <= steps; ++k) {
        const double u = u_hi + (static_cast<double>(k) / steps) * (u_lo - u_hi);
        ts[k] = std::pow(u, rho);
    }
    ts.front() = t_hi;
    ts.back() = t_lo;
    return ts;
}

}  // namespace purelab
