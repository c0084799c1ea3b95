#pragma once

#include <cmath>
#include <cstdint>

namespace muscle {

// Counter-based generator: the SplitMix64 finalizer applied to a Weyl
// sequence. Every consumer takes an explicit Rng (by reference), so there is
// no hidden global state and parallel callers simply derive disjoint streams
// with Rng::stream(seed, a, b, c).
class Rng {
public:
    explicit Rng(std::uint64_t key) : state_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Stream keys are derived by folding identifiers into the seed; the
    // identifiers used by each module are listed next to its sampler.
    static std::uint64_t fold(std::uint64_t key, std::uint64_t v) {
        return mix(key ^ (v + 0x9E3779B97F4A7C15ull + (key << 6) + (key >> 2)));
    }

    static Rng stream(std::uint64_t seed, std::uint64_t a = 0,
                      std::uint64_t b = 0, std::uint64_t c = 0) {
        return Rng(fold(fold(fold(mix(seed + 0x9E3779B97F4A7C15ull), a), b), c));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform on the open interval (0, 1); safe to feed into log().
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Box-Muller; consumes exactly two uniforms per variate so stream
    // positions stay predictable.
    double normal() {
        const double u = uniform();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
    }

    double exponential() { return -std::log(uniform()); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

}  // namespace muscle
