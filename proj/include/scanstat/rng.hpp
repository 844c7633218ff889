// rng.hpp - deterministic pseudo-random streams for simulation.
//
// Generator: SplitMix64 (a counter-based 64-bit generator; the state advances
// by the golden-gamma constant and each output is the finalizer mix of the
// state). Normal variates use the Box-Muller transform on two consecutive
// uniforms, so a stream's output depends only on its seed and draw index.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace scanstat::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer: a bijective scramble of 64 bits.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Derived stream seed: sub_seed(master, a, b) = mix64(mix64(master + kGamma*(a+1)) + kGamma*(b+1)).
/// Used as sub_seed(master, replicate, stream-id); stream-id 0 is the noise
/// field, 1 the signal anchor, >= 2 auxiliary draws (e.g. permutations).
inline std::uint64_t sub_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(master + kGamma * (a + 1)) + kGamma * (b + 1));
}

struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        state += kGamma;
        return mix64(state);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound >= 1. Modulo draw; the bias is
    /// < 2^-50 for desk-scale bounds.
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }
};

/// Standard normal stream: Box-Muller pairs over a SplitMix64 stream.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : u_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite; u2 in [0,1).
        const double u1 = 1.0 - u_.next_unit();
        const double u2 = u_.next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    SplitMix64 u_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace scanstat::rng
