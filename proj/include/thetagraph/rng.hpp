#pragma once

#include <cstdint>

namespace theta {

/// Finalizer of the splitmix64 generator. Bijective on uint64.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Deterministic 64-bit stream (splitmix64). Used instead of
/// <random> engines-plus-distributions so that identical seeds give
/// identical draws on every platform and standard library.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Unbiased uniform draw from [0, n). n >= 1.
    constexpr std::uint64_t below(std::uint64_t n) noexcept {
        if (n <= 1) return 0;
        // rejection threshold: discard the partial final block of 2^64
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t state_;
};

/// Seed for sub-stream `index` of a master seed. This is the
/// (index+1)-th output of a splitmix64 stream seeded at `master`,
/// computed in closed form; trials and tasks replay individually.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master + index * 0x9E3779B97F4A7C15ull);
}

} // namespace theta
