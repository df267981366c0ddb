#pragma once

// Deterministic stream-splittable RNG: xoshiro256** seeded through splitmix64,
// with an explicit Box-Muller transform for normal variates.  A given
// (seed, stream) pair produces the identical sequence on every platform;
// distinct streams are statistically independent, so parallel workers can
// each own one.

#include <cmath>
#include <cstdint>

#include "protectosim/constants.hpp"

namespace protectosim {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace detail

class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t sm = seed;
        const std::uint64_t h = detail::splitmix64(sm);
        sm = h ^ (stream * 0xda942042e4dd58b5ull + 0x2545f4914f6cdd1dull);
        for (auto& word : state_)
            word = detail::splitmix64(sm);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 1; // all-zero state is invalid for xoshiro
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal variate (Box-Muller; the second value of each pair is
    /// cached).
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double(); // (0, 1], keeps log finite
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = two_pi * u2;
        spare_ = r * std::sin(angle);
        have_spare_ = true;
        return r * std::cos(angle);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace protectosim
