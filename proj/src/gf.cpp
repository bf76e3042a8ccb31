#include "thetagraph/gf.hpp"

namespace theta {

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (std::uint64_t p = 3; p * p <= n; p += 2) {
        if (n % p == 0) return false;
    }
    return true;
}

Field::Field(std::uint64_t q) {
    if (q >= (1ull << 31)) {
        throw SizeOverflowError("field modulus must be below 2^31, got " + std::to_string(q));
    }
    if (!is_prime(q)) throw NotPrimeError(q);
    q_ = std::uint32_t(q);
}

std::uint32_t Field::pow(std::uint32_t a, std::uint64_t e) const noexcept {
    std::uint64_t base = a % q_;
    std::uint64_t acc = 1;
    while (e != 0) {
        if (e & 1) acc = (acc * base) % q_;
        base = (base * base) % q_;
        e >>= 1;
    }
    return std::uint32_t(acc);
}

std::uint32_t Field::inv(std::uint32_t a) const {
    if (a == 0) throw DivisionByZeroError();
    return pow(a, q_ - 2); // Fermat: a^(q-2) * a = a^(q-1) = 1
}

} // namespace theta
