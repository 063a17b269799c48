#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wadc {

/// Minimal splitmix64-based generator. Distribution draws are implemented
/// here rather than with <random> adaptors because the standard leaves their
/// algorithms implementation-defined, and experiment traces must reproduce
/// bit-identically from a seed across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi], rejection sampled (no modulo bias).
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return lo + static_cast<int>(r % span);
    }

    /// Box-Muller normal draw (two uniforms per call, no cached spare).
    double normal(double mean, double stddev) {
        double u1 = uniform01();
        while (u1 == 0.0)
            u1 = uniform01();
        const double u2 = uniform01();
        const double z =
            std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return mean + stddev * z;
    }

    /// Exponential with the given mean.
    double exponential(double mean) {
        double u = uniform01();
        while (u == 0.0)
            u = uniform01();
        return -mean * std::log(u);
    }

private:
    std::uint64_t state_;
};

} // namespace wadc
