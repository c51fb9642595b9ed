#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "vecmath.hpp"

namespace purelab {

// Schedule constants: s(t) = 1 and sigma(t) = t, so the perturbation kernel
// is x_t = x_0 + t * eps and the probability-flow ODE reads
// dx/dt = -t * score(x, t).
struct EdmSchedule {
    static constexpr double s(double) { return 1.0; }
    static constexpr double sigma(double t) { return t; }
};

using ScoreFn = std::function<void(std::span<const double> x, double t, std::span<double> out)>;

enum class OdeMethod { Euler, Heun };

struct OdeSolverConfig {
    OdeMethod method = OdeMethod::Heun;
    int steps = 18;
    double t_end = 0.002;
    double rho = 7.0;  // warping of the internal step points
};

Vec perturb(std::span<const double> x0, double t, Rng& rng);

// integrates dx/dt = -t * score(x, t) from t_start down to cfg.t_end;
// optionally records (t, x) after every step including the start
Vec solve_pf_ode(const ScoreFn& score, std::span<const double> x_t, double t_start,
                 const OdeSolverConfig& cfg,
                 std::vector<std::pair<double, Vec>>* trajectory = nullptr);

// Euler-Maruyama on dx = -2t score dt + sqrt(2t) dw integrated backward from
// t_start to t_end over the same warped step points as the ODE
Vec solve_reverse_sde(const ScoreFn& score, std::span<const double> x_t, double t_start,
                      int steps, double t_end, Rng& rng, double rho = 7.0);

}  // namespace purelab
