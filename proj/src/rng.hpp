#pragma once

#include <cstdint>

namespace purelab {

// Deterministic generator with cheap stream derivation. The state advances
// through the splitmix64 sequence; child() hashes (seed, a, b) into a fresh
// stream, so parallel tasks draw from statistically independent generators
// without sharing state. Gaussian draws use Box-Muller on our own uniforms,
// keeping every draw bit-reproducible for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // splitmix64 finalizer, also used as the stream-derivation hash
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // derived stream keyed by (current seed, a, b); does not advance *this
    Rng child(std::uint64_t a, std::uint64_t b = 0) const {
        return Rng(mix(state_ ^ mix(a ^ mix(b))));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in {0, ..., n-1}, unbiased
    std::uint64_t next_below(std::uint64_t n);

    // standard normal
    double next_gaussian();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace purelab
