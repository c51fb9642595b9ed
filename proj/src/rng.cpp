#include "rng.hpp"

#include <cmath>
#include <numbers>

namespace purelab {

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~0ull - (~0ull % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
}

double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so the log is finite
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

}  // namespace purelab
