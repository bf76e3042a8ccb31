#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "thetagraph/errors.hpp"

namespace theta {

/// Exact nonnegative rational, always stored in lowest terms.
/// Numerators and denominators stay within uint64 because every exact
/// count in this library is capped well below 2^63.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    constexpr Rational() = default;

    Rational(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
        if (den == 0) throw Error("rational with zero denominator");
        const std::uint64_t g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    friend bool operator==(const Rational&, const Rational&) = default;

    double value() const noexcept {
        return static_cast<double>(num) / static_cast<double>(den);
    }

    std::string str() const {
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

} // namespace theta
