#pragma once

#include <cstdint>
#include <string>

namespace theta {

/// 128-bit unsigned arithmetic for exact moment sums: r-th powers of path
/// counts overflow 64 bits in adversarial controls.
using u128 = unsigned __int128;

struct U128Pow {
    u128 value = 1;
    bool overflow = false;
};

/// base^exp with overflow detection instead of wraparound.
inline U128Pow pow_u128(std::uint64_t base, std::uint64_t exp) noexcept {
    U128Pow r;
    constexpr u128 max = ~u128{0};
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && r.value > max / base) {
            r.overflow = true;
            return r;
        }
        r.value *= base;
    }
    return r;
}

/// Decimal rendering (no 128-bit support in std::to_string).
inline std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string digits;
    while (v != 0) {
        digits += char('0' + int(v % 10));
        v /= 10;
    }
    return {digits.rbegin(), digits.rend()};
}

} // namespace theta
