#pragma once

#include <cstdint>

#include "thetagraph/errors.hpp"

namespace theta {

/// Deterministic primality test (trial division up to sqrt n).
bool is_prime(std::uint64_t n) noexcept;

/// The prime field F_q with canonical representatives in [0, q-1].
///
/// q is restricted to q < 2^31 so that products of two canonical
/// representatives fit in a 64-bit intermediate. All operations are
/// pure; Field values are freely copyable and shareable across threads.
class Field {
public:
    /// Throws NotPrimeError if q is 0, 1 or composite; SizeOverflowError
    /// if q >= 2^31.
    explicit Field(std::uint64_t q);

    std::uint32_t q() const noexcept { return q_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
        const std::uint64_t s = std::uint64_t(a) + b;
        return std::uint32_t(s >= q_ ? s - q_ : s);
    }

    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept {
        return a >= b ? a - b : std::uint32_t(a + std::uint64_t(q_) - b);
    }

    std::uint32_t neg(std::uint32_t a) const noexcept { return a == 0 ? 0 : q_ - a; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
        return std::uint32_t((std::uint64_t(a) * b) % q_);
    }

    /// a^e with the convention pow(a, 0) = 1 (including a = 0).
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept;

    /// Multiplicative inverse; throws DivisionByZeroError if a = 0.
    std::uint32_t inv(std::uint32_t a) const;

    /// Canonical representative of an arbitrary signed integer.
    std::uint32_t reduce(std::int64_t v) const noexcept {
        std::int64_t m = v % std::int64_t(q_);
        if (m < 0) m += q_;
        return std::uint32_t(m);
    }

    friend bool operator==(const Field&, const Field&) = default;

private:
    std::uint32_t q_;
};

} // namespace theta
