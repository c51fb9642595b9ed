#include "edm.hpp"

#include <cmath>
#include <string>

#include "error.hpp"
#include "time_grid.hpp"

namespace purelab {

namespace {

void check_finite(std::span<const double> v, double t) {
    for (double x : v) {
        if (!std::isfinite(x))
            throw Error(Errc::numeric, "non-finite score at t=" + std::to_string(t));
    }
}

}  // namespace

Vec perturb(std::span<const double> x0, double t, Rng& rng) {
    Vec out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = x0[i] + t * rng.next_gaussian();
    return out;
}

Vec solve_pf_ode(const ScoreFn& score, std::span<const double> x_t, double t_start,
                 const OdeSolverConfig& cfg, std::vector<std::pair<double, Vec>>* trajectory) {
    if (!(t_start > cfg.t_end))
        throw_domain("solve_pf_ode requires t_start > t_end");
    const std::size_t d = x_t.size();
    const std::vector<double> ts = warped_time_points(t_start, cfg.t_end, cfg.rho, cfg.steps);

    Vec x(x_t.begin(), x_t.end());
    Vec s(d), s2(d), x_pred(d);
    if (trajectory) {
        trajectory->clear();
        trajectory->emplace_back(t_start, x);
    }
    for (int k = 0; k < cfg.steps; ++k) {
        const double t = ts[k];
        const double t_next = ts[k + 1];
        const double h = t_next - t;  // negative
        score(x, t, s);
        check_finite(s, t);
        if (cfg.method == OdeMethod::Euler) {
            for (std::size_t i = 0; i < d; ++i) x[i] += h * (-t * s[i]);
        } else {
            for (std::size_t i = 0; i < d; ++i) x_pred[i] = x[i] + h * (-t * s[i]);
            score(x_pred, t_next, s2);
            check_finite(s2, t_next);
            for (std::size_t i = 0; i < d; ++i)
                x[i] += 0.5 * h * (-t * s[i] - t_next * s2[i]);
        }
        if (trajectory) trajectory->emplace_back(t_next, x);
    }
    return x;
}

Vec solve_reverse_sde(const ScoreFn& score, std::span<const double> x_t, double t_start,
                      int steps, double t_end, Rng& rng, double rho) {
    if (!(t_start > 0.0)) throw_domain("solve_reverse_sde requires t_start > 0");
    if (steps < 1) throw_domain("solve_reverse_sde requires steps >= 1");
    if (!(t_end < t_start)) throw_domain("solve_reverse_sde requires t_end < t_start");
    const std::size_t d = x_t.size();
    const std::vector<double> ts = warped_time_points(t_start, t_end, rho, steps);

    Vec x(x_t.begin(), x_t.end());
    Vec s(d);
    for (int k = 0; k < steps; ++k) {
        const double t = ts[k];
        const double h = ts[k] - ts[k + 1];  // positive
        score(x, t, s);
        check_finite(s, t);
        const double diff = std::sqrt(2.0 * t * h);
        for (std::size_t i = 0; i < d; ++i)
            x[i] += 2.0 * t * s[i] * h + diff * rng.next_gaussian();
    }
    return x;
}

}  // namespace purelab
