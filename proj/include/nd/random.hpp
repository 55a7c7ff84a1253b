#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace nd {

// std::mt19937_64 is fully specified by the standard; the standard
// distributions are not, so the mappings below are spelled out to keep seeded
// output identical across toolchains.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

/// Uniform index in [0, count) by rejection sampling.
inline std::size_t uniform_index(Rng& rng, std::size_t count) {
    const std::uint64_t n = count;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw = rng();
    while (draw >= limit) {
        draw = rng();
    }
    return static_cast<std::size_t>(draw % n);
}

/// Standard normal variate (Box-Muller, one value per call).
inline double standard_normal(Rng& rng) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = 1.0 - uniform_unit(rng);  // (0, 1]
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace nd
