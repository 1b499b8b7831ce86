#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

// Deterministic random primitives. Everything here is reproducible from a
// 64-bit seed alone: the engine is std::mt19937_64 (bit-exact by the
// standard) and all distributions are hand-rolled on top of raw engine
// output, so results do not depend on the standard library's distribution
// implementations.
namespace ccs::rng {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based stream derivation: stream i of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream * 0x9e3779b97f4a7c15ull + 1));
}

inline Engine make_engine(std::uint64_t master, std::uint64_t stream = 0) {
    return Engine(derive_seed(master, stream));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline bool chance(Engine& eng, double p) { return uniform01(eng) < p; }

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = eng();
    } while (v >= limit);
    return v % n;
}

// Standard normal via Box-Muller. Draws two uniforms per call.
inline double gaussian(Engine& eng) {
    double u1 = uniform01(eng);
    while (u1 <= 0.0) u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Circularly symmetric complex normal CN(0, 1): E|z|^2 = 1.
inline std::complex<double> cgaussian(Engine& eng) {
    double u1 = uniform01(eng);
    while (u1 <= 0.0) u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    const double r = std::sqrt(-std::log(u1));  // sqrt(-2 ln u) / sqrt(2)
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

// Exact Binomial(n, p) sample. Walks outward from the mode so it stays
// O(stddev) per draw and never underflows for large n.
std::uint64_t binomial(Engine& eng, std::uint64_t n, double p);

}  // namespace ccs::rng
