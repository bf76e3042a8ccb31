#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thetagraph/caps.hpp"
#include "thetagraph/gf.hpp"
#include "thetagraph/rational.hpp"
#include "thetagraph/rng.hpp"

namespace theta {

using Exponent = std::uint16_t;

/// C(n, k) in uint64; throws SizeOverflowError if the value does not fit.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Number of monomials in `nvars` variables with total degree <= `degree`,
/// i.e. C(nvars + degree, nvars). Throws SizeOverflowError when the count
/// exceeds caps.basis.
std::uint64_t basis_size(std::uint32_t nvars, std::uint32_t degree, const Caps& caps = {});

/// All monomials of total degree <= degree in graded lexicographic order:
/// ascending total degree; within a degree, exponent vectors in descending
/// lexicographic order (so X1 comes before X2, X1^2 before X1*X2 before
/// X2^2). This order is the canonical basis order everywhere: sampling,
/// serialization and dense evaluation all follow it.
std::vector<std::vector<Exponent>> monomial_basis(std::uint32_t nvars, std::uint32_t degree,
                                                  const Caps& caps = {});

/// Index of a monomial in the graded lexicographic basis of its arity.
std::uint64_t monomial_rank(std::span<const Exponent> exps);

/// Inverse of monomial_rank for a given arity.
std::vector<Exponent> monomial_unrank(std::uint32_t nvars, std::uint64_t rank);

/// Sparse multivariate polynomial over F_q with total degree bound.
///
/// Terms are kept in graded lexicographic order with nonzero
/// coefficients only, so equal polynomials have equal representations.
/// Values are immutable after construction.
class MultiPoly {
public:
    struct Term {
        std::span<const Exponent> exps;
        std::uint32_t coeff;
    };

    /// The zero polynomial.
    MultiPoly(const Field& field, std::uint32_t nvars, std::uint32_t degree);

    /// Builds from (monomial, coefficient) pairs. Coefficients are reduced,
    /// like monomials are merged, zero results dropped. Throws
    /// SizeOverflowError if a monomial exceeds the degree bound,
    /// ArityMismatchError if one has the wrong number of exponents.
    static MultiPoly from_terms(const Field& field, std::uint32_t nvars, std::uint32_t degree,
                                const std::vector<std::pair<std::vector<Exponent>, std::uint32_t>>& terms);

    /// Uniform sample from the q^{C(nvars+degree, nvars)} polynomials of
    /// degree <= degree: one coefficient drawn per basis monomial, in
    /// basis order, so a fixed stream position determines the polynomial.
    static MultiPoly sample_uniform(const Field& field, std::uint32_t nvars, std::uint32_t degree,
                                    SplitMix64& rng, const Caps& caps = {});

    const Field& field() const noexcept { return field_; }
    std::uint32_t nvars() const noexcept { return nvars_; }
    std::uint32_t degree() const noexcept { return degree_; }
    std::size_t term_count() const noexcept { return coeffs_.size(); }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    bool is_constant() const noexcept;

    Term term(std::size_t i) const noexcept {
        return {std::span<const Exponent>(exps_.data() + i * nvars_, nvars_), coeffs_[i]};
    }

    /// Coefficient of a monomial (0 if absent).
    std::uint32_t coefficient(std::span<const Exponent> exps) const;

    /// Value at a point with canonical coordinates. ArityMismatchError if
    /// the point has the wrong number of coordinates.
    std::uint32_t evaluate(std::span<const std::uint32_t> point) const;

    /// Specializes the first prefix.size() variables, returning a
    /// polynomial in the remaining variables with the same degree bound:
    /// evaluate(result, y) == evaluate(*this, prefix ++ y) for all y.
    MultiPoly specialize_prefix(std::span<const std::uint32_t> prefix) const;

    /// specialize_prefix for a single leading variable (hot path).
    MultiPoly specialize_first(std::uint32_t value) const;

    friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

    /// Text dump "q t d; (a_1 ... a_t):coeff; ..." with monomials in basis
    /// order. The zero polynomial dumps as "q t d;".
    std::string serialize() const;
    static MultiPoly parse(const std::string& text);

private:
    MultiPoly(Field field, std::uint32_t nvars, std::uint32_t degree, std::vector<Exponent> exps,
              std::vector<std::uint32_t> coeffs)
        : field_(field), nvars_(nvars), degree_(degree), exps_(std::move(exps)),
          coeffs_(std::move(coeffs)) {}

    Field field_;
    std::uint32_t nvars_;
    std::uint32_t degree_;
    std::vector<Exponent> exps_;       // term_count x nvars, basis order
    std::vector<std::uint32_t> coeffs_; // nonzero, canonical
};

/// Exact probability that a uniform polynomial of degree <= degree in
/// nvars variables vanishes at every given point, computed by exhaustive
/// enumeration of all q^{C(nvars+degree, nvars)} polynomials.
///
/// Preconditions: points distinct (DuplicatePointsError), enumeration
/// count within caps.poly_enum (SizeOverflowError).
Rational vanish_probability_exact(std::uint32_t nvars, std::uint32_t degree, const Field& field,
                                  const std::vector<std::vector<std::uint32_t>>& points,
                                  const Caps& caps = {});

} // namespace theta
