#pragma once

#include <vector>

namespace purelab {

// rho-warped discretization of the diffusion horizon [eps, t_max]:
// t_i = (eps^(1/rho) + (i-1)/(n-1) * (t_max^(1/rho) - eps^(1/rho)))^rho.
// Endpoints are pinned exactly; midpoints back the noise-level-to-timestep
// selection rule.
struct KarrasGrid {
    double eps = 0.002;
    double t_max = 80.0;
    double rho = 7.0;
    int n = 18;
    std::vector<double> points;     // strictly increasing, points[0]=eps, points[n-1]=t_max
    std::vector<double> midpoints;  // (points[i] + points[i+1]) / 2
};

KarrasGrid build_grid(double eps, double t_max, double rho, int n);

// index of the grid point whose half-open midpoint cell (m_{i-1}, m_i]
// contains sigma; sigma below the first midpoint maps to 0, above the last
// to n-1
int select_timestep_index(const KarrasGrid& grid, double sigma);
double select_timestep(const KarrasGrid& grid, double sigma);

// steps+1 warped time points descending from t_hi to t_lo, endpoints exact;
// used by the ODE/SDE solvers so both spend their budget the same way
std::vector<double> warped_time_points(double t_hi, double t_lo, double rho, int steps);

}  // namespace purelab
