#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace tdss {

// SplitMix64 stream. Small state, full 64-bit output, identical sequences on
// every platform, which the determinism guarantees in this project depend on
// (std::uniform_*_distribution is implementation-defined and unusable here).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform01_open() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Multiply-shift; the O(2^-64) bias is
    // irrelevant for sampling and keeps re-simulation oracles trivial.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Standard normal via Box-Muller. Always consumes exactly two draws.
    double normal() {
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

// Sub-seed derivation: hash the tag (FNV-1a) into the base seed, then
// scramble. Every source of randomness in the project derives its stream as
// derive_seed(master, "component"[, index...]), so components are
// individually reproducible and independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return detail::mix64(base ^ detail::mix64(h));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a) {
    return detail::mix64(derive_seed(base, tag) ^ detail::mix64(a + 0x9E3779B97F4A7C15ull));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a, std::uint64_t b) {
    return detail::mix64(derive_seed(base, tag, a) ^ detail::mix64(b + 0x2545F4914F6CDD1Dull));
}

}  // namespace tdss
