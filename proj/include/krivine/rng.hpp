#pragma once

#include <cstdint>
#include <cmath>

namespace krivine {

// Counter-based uniform stream: out(i) = mix64(seed + (i+1)*GAMMA), the
// splitmix64 sequence addressed by counter instead of carried state. Any
// counter can be evaluated independently, which is what makes chunked
// Monte Carlo reproducible regardless of scheduling order.
namespace rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t bits(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * kGamma);
}

// Independent substream seed for chunk/restart index `stream`.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream * kGamma + 0x5851F42D4C957F2Dull));
}

// Uniform in the open interval (0,1); never returns 0 or 1, so logs are safe.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
    return (static_cast<double>(bits(seed, counter) >> 11) + 0.5) * 0x1p-53;
}

// Box-Muller pair of independent standard normals from counters (c, c+1).
inline void gaussian_pair(std::uint64_t seed, std::uint64_t counter,
                          double& z0, double& z1) {
    const double u1 = uniform01(seed, counter);
    const double u2 = uniform01(seed, counter + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
}

// Standard normal at linear index `idx` of the stream (pairs share draws).
inline double gaussian_at(std::uint64_t seed, std::uint64_t idx) {
    double z0, z1;
    gaussian_pair(seed, (idx / 2) * 2, z0, z1);
    return (idx % 2 == 0) ? z0 : z1;
}

} // namespace rng
} // namespace krivine
