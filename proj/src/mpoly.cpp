#include "thetagraph/mpoly.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "thetagraph/errors.hpp"

namespace theta {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i; // exact: i! divides any i consecutive integers
        if (result > std::numeric_limits<std::uint64_t>::max())
            throw SizeOverflowError("binomial overflows 64 bits");
    }
    return static_cast<std::uint64_t>(result);
}

std::uint64_t basis_size(std::uint32_t nvars, std::uint32_t degree, const Caps& caps) {
    std::uint64_t size = binomial(std::uint64_t(nvars) + degree, nvars);
    if (size > caps.basis)
        throw SizeOverflowError("monomial basis of " + std::to_string(size) +
                                " exceeds cap " + std::to_string(caps.basis));
    return size;
}

namespace {

void emit_compositions(std::uint32_t nvars, std::uint32_t total, std::vector<Exponent>& scratch,
                       std::uint32_t pos, std::vector<std::vector<Exponent>>& out) {
    if (pos + 1 == nvars) {
        scratch[pos] = static_cast<Exponent>(total);
        out.push_back(scratch);
        return;
    }
    for (std::uint32_t e = total; ; --e) {
        scratch[pos] = static_cast<Exponent>(e);
        emit_compositions(nvars, total - e, scratch, pos + 1, out);
        if (e == 0) break;
    }
}

} // namespace

std::vector<std::vector<Exponent>> monomial_basis(std::uint32_t nvars, std::uint32_t degree,
                                                  const Caps& caps) {
    std::uint64_t size = basis_size(nvars, degree, caps);
    std::vector<std::vector<Exponent>> basis;
    basis.reserve(size);
    if (nvars == 0) {
        basis.emplace_back(); // just the constant
        return basis;
    }
    std::vector<Exponent> scratch(nvars, 0);
    for (std::uint32_t g = 0; g <= degree; ++g)
        emit_compositions(nvars, g, scratch, 0, basis);
    return basis;
}

std::uint64_t monomial_rank(std::span<const Exponent> exps) {
    const std::size_t t = exps.size();
    std::uint64_t g = 0;
    for (Exponent e : exps) g += e;
    // everything of strictly smaller total degree comes first
    std::uint64_t rank = (g == 0) ? 0 : binomial(t + g - 1, t);
    std::uint64_t rem = g;
    for (std::size_t i = 0; i + 1 < t; ++i) {
        // within the block, compositions whose part i is larger come first
        for (std::uint64_t f = std::uint64_t(exps[i]) + 1; f <= rem; ++f)
            rank += binomial(rem - f + (t - i - 2), t - i - 2);
        rem -= exps[i];
    }
    return rank;
}

std::vector<Exponent> monomial_unrank(std::uint32_t nvars, std::uint64_t rank) {
    if (nvars == 0) {
        if (rank != 0) throw SizeOverflowError("rank out of range for the constant basis");
        return {};
    }
    std::uint64_t g = 0;
    while (binomial(std::uint64_t(nvars) + g, nvars) <= rank) ++g;
    std::uint64_t idx = rank - (g == 0 ? 0 : binomial(std::uint64_t(nvars) + g - 1, nvars));
    std::vector<Exponent> exps(nvars, 0);
    std::uint64_t rem = g;
    for (std::uint32_t i = 0; i + 1 < nvars; ++i) {
        for (std::uint64_t e = rem;; --e) {
            std::uint64_t block = binomial(rem - e + (nvars - i - 2), nvars - i - 2);
            if (idx < block) {
                exps[i] = static_cast<Exponent>(e);
                rem -= e;
                break;
            }
            idx -= block;
            if (e == 0) throw Error("monomial_unrank: rank inconsistent with arity");
        }
    }
    exps[nvars - 1] = static_cast<Exponent>(rem);
    return exps;
}

MultiPoly::MultiPoly(const Field& field, std::uint32_t nvars, std::uint32_t degree)
    : field_(field), nvars_(nvars), degree_(degree) {}

bool MultiPoly::is_constant() const noexcept {
    if (coeffs_.empty()) return true;
    if (coeffs_.size() != 1) return false;
    for (std::uint32_t v = 0; v < nvars_; ++v)
        if (exps_[v] != 0) return false;
    return true;
}

MultiPoly MultiPoly::from_terms(
    const Field& field, std::uint32_t nvars, std::uint32_t degree,
    const std::vector<std::pair<std::vector<Exponent>, std::uint32_t>>& terms) {
    std::map<std::uint64_t, std::uint32_t> by_rank;
    for (const auto& [exps, coeff] : terms) {
        if (exps.size() != nvars)
            throw ArityMismatchError("term has " + std::to_string(exps.size()) +
                                     " exponents, expected " + std::to_string(nvars));
        std::uint64_t g = 0;
        for (Exponent e : exps) g += e;
        if (g > degree)
            throw SizeOverflowError("term degree " + std::to_string(g) + " exceeds bound " +
                                    std::to_string(degree));
        std::uint64_t rank = monomial_rank(exps);
        std::uint32_t c = field.reduce(static_cast<std::int64_t>(coeff));
        auto [it, inserted] = by_rank.try_emplace(rank, c);
        if (!inserted) it->second = field.add(it->second, c);
    }
    std::vector<Exponent> exps;
    std::vector<std::uint32_t> coeffs;
    exps.reserve(by_rank.size() * nvars);
    coeffs.reserve(by_rank.size());
    for (const auto& [rank, coeff] : by_rank) {
        if (coeff == 0) continue;
        std::vector<Exponent> mono = monomial_unrank(nvars, rank);
        exps.insert(exps.end(), mono.begin(), mono.end());
        coeffs.push_back(coeff);
    }
    return MultiPoly(field, nvars, degree, std::move(exps), std::move(coeffs));
}

MultiPoly MultiPoly::sample_uniform(const Field& field, std::uint32_t nvars, std::uint32_t degree,
                                    SplitMix64& rng, const Caps& caps) {
    auto basis = monomial_basis(nvars, degree, caps);
    std::vector<Exponent> exps;
    std::vector<std::uint32_t> coeffs;
    for (const auto& mono : basis) {
        // one draw per basis monomial, zero or not, so the stream position
        // after sampling depends only on (nvars, degree)
        auto c = static_cast<std::uint32_t>(rng.below(field.q()));
        if (c == 0) continue;
        exps.insert(exps.end(), mono.begin(), mono.end());
        coeffs.push_back(c);
    }
    return MultiPoly(field, nvars, degree, std::move(exps), std::move(coeffs));
}

std::uint32_t MultiPoly::coefficient(std::span<const Exponent> exps) const {
    if (exps.size() != nvars_)
        throw ArityMismatchError("monomial arity " + std::to_string(exps.size()) +
                                 " does not match polynomial arity " + std::to_string(nvars_));
    std::uint64_t want = monomial_rank(exps);
    // terms are stored in rank order; binary search by rank
    std::size_t lo = 0, hi = coeffs_.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        std::uint64_t r = monomial_rank(term(mid).exps);
        if (r == want) return coeffs_[mid];
        if (r < want)
            lo = mid + 1;
        else
            hi = mid;
    }
    return 0;
}

std::uint32_t MultiPoly::evaluate(std::span<const std::uint32_t> point) const {
    if (point.size() != nvars_)
        throw ArityMismatchError("point has " + std::to_string(point.size()) +
                                 " coordinates, expected " + std::to_string(nvars_));
    if (coeffs_.empty()) return 0;
    // per-variable power tables up to the degree bound
    std::vector<std::uint32_t> powers(std::size_t(nvars_) * (degree_ + 1));
    for (std::uint32_t v = 0; v < nvars_; ++v) {
        std::uint32_t* row = powers.data() + std::size_t(v) * (degree_ + 1);
        row[0] = 1;
        for (std::uint32_t e = 1; e <= degree_; ++e) row[e] = field_.mul(row[e - 1], point[v]);
    }
    std::uint32_t acc = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        std::uint32_t prod = coeffs_[i];
        const Exponent* e = exps_.data() + i * nvars_;
        for (std::uint32_t v = 0; v < nvars_; ++v)
            if (e[v] != 0) prod = field_.mul(prod, powers[std::size_t(v) * (degree_ + 1) + e[v]]);
        acc = field_.add(acc, prod);
    }
    return acc;
}

MultiPoly MultiPoly::specialize_prefix(std::span<const std::uint32_t> prefix) const {
    if (prefix.size() > nvars_)
        throw ArityMismatchError("prefix of " + std::to_string(prefix.size()) +
                                 " values for a polynomial in " + std::to_string(nvars_) +
                                 " variables");
    const auto np = static_cast<std::uint32_t>(prefix.size());
    const std::uint32_t nrest = nvars_ - np;
    if (np == 0) return *this;
    // power tables for the specialized variables
    std::vector<std::uint32_t> powers(std::size_t(np) * (degree_ + 1));
    for (std::uint32_t v = 0; v < np; ++v) {
        std::uint32_t* row = powers.data() + std::size_t(v) * (degree_ + 1);
        row[0] = 1;
        for (std::uint32_t e = 1; e <= degree_; ++e) row[e] = field_.mul(row[e - 1], prefix[v]);
    }
    std::map<std::uint64_t, std::uint32_t> by_rank; // suffix monomial rank -> coeff
    std::vector<Exponent> suffix(nrest);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const Exponent* e = exps_.data() + i * nvars_;
        std::uint32_t factor = coeffs_[i];
        for (std::uint32_t v = 0; v < np; ++v)
            if (e[v] != 0) factor = field_.mul(factor, powers[std::size_t(v) * (degree_ + 1) + e[v]]);
        if (factor == 0) continue;
        std::copy(e + np, e + nvars_, suffix.begin());
        std::uint64_t rank = monomial_rank(suffix);
        auto [it, inserted] = by_rank.try_emplace(rank, factor);
        if (!inserted) it->second = field_.add(it->second, factor);
    }
    std::vector<Exponent> exps;
    std::vector<std::uint32_t> coeffs;
    exps.reserve(by_rank.size() * nrest);
    coeffs.reserve(by_rank.size());
    for (const auto& [rank, coeff] : by_rank) {
        if (coeff == 0) continue;
        std::vector<Exponent> mono = monomial_unrank(nrest, rank);
        exps.insert(exps.end(), mono.begin(), mono.end());
        coeffs.push_back(coeff);
    }
    return MultiPoly(field_, nrest, degree_, std::move(exps), std::move(coeffs));
}

MultiPoly MultiPoly::specialize_first(std::uint32_t value) const {
    const std::uint32_t point[1] = {value};
    return specialize_prefix(std::span<const std::uint32_t>(point, 1));
}

std::string MultiPoly::serialize() const {
    std::ostringstream out;
    out << field_.q() << ' ' << nvars_ << ' ' << degree_ << ';';
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        out << " (";
        const Exponent* e = exps_.data() + i * nvars_;
        for (std::uint32_t v = 0; v < nvars_; ++v) {
            if (v != 0) out << ' ';
            out << e[v];
        }
        out << "):" << coeffs_[i] << ';';
    }
    return out.str();
}

MultiPoly MultiPoly::parse(const std::string& text) {
    std::vector<std::string> chunks;
    std::string cur;
    for (char ch : text) {
        if (ch == ';') {
            chunks.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    for (char ch : cur)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            throw ParseError("trailing content after final ';': '" + cur + "'");
    if (chunks.empty()) throw ParseError("empty polynomial text");

    std::istringstream head(chunks[0]);
    std::uint64_t q = 0;
    std::uint32_t nvars = 0, degree = 0;
    if (!(head >> q >> nvars >> degree)) throw ParseError("header must be 'q t d'");
    std::string extra;
    if (head >> extra) throw ParseError("unexpected token in header: '" + extra + "'");
    std::optional<Field> field;
    try {
        field.emplace(q);
    } catch (const Error& e) {
        throw ParseError(e.what()); // non-prime or oversized modulus in the header
    }

    std::vector<std::pair<std::vector<Exponent>, std::uint32_t>> terms;
    for (std::size_t i = 1; i < chunks.size(); ++i) {
        const std::string& chunk = chunks[i];
        auto open = chunk.find('(');
        auto close = chunk.find(')');
        auto colon = chunk.find(':', close == std::string::npos ? 0 : close);
        if (open == std::string::npos || close == std::string::npos || colon == std::string::npos ||
            close < open)
            throw ParseError("malformed term '" + chunk + "', expected '(a_1 ... a_t):coeff'");
        for (std::size_t p = 0; p < open; ++p)
            if (!std::isspace(static_cast<unsigned char>(chunk[p])))
                throw ParseError("malformed term '" + chunk + "'");
        std::istringstream body(chunk.substr(open + 1, close - open - 1));
        std::vector<Exponent> exps;
        std::int64_t e = 0;
        while (body >> e) {
            if (e < 0 || e > std::numeric_limits<Exponent>::max())
                throw ParseError("exponent " + std::to_string(e) + " out of range");
            exps.push_back(static_cast<Exponent>(e));
        }
        if (!body.eof()) throw ParseError("non-numeric exponent in '" + chunk + "'");
        std::istringstream tail(chunk.substr(colon + 1));
        std::int64_t coeff = 0;
        if (!(tail >> coeff) || coeff < 0) throw ParseError("malformed coefficient in '" + chunk + "'");
        if (tail >> extra) throw ParseError("unexpected token after coefficient: '" + extra + "'");
        terms.emplace_back(std::move(exps), field->reduce(coeff));
    }
    try {
        return from_terms(*field, nvars, degree, terms);
    } catch (const ArityMismatchError& e) {
        throw ParseError(e.what());
    } catch (const SizeOverflowError& e) {
        throw ParseError(e.what());
    }
}

Rational vanish_probability_exact(std::uint32_t nvars, std::uint32_t degree, const Field& field,
                                  const std::vector<std::vector<std::uint32_t>>& points,
                                  const Caps& caps) {
    for (const auto& p : points)
        if (p.size() != nvars)
            throw ArityMismatchError("evaluation point has " + std::to_string(p.size()) +
                                     " coordinates, expected " + std::to_string(nvars));
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j]) throw DuplicatePointsError();

    auto basis = monomial_basis(nvars, degree, caps);
    const std::size_t nbasis = basis.size();
    const std::uint64_t q = field.q();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < nbasis; ++i) {
        if (total > caps.poly_enum / q)
            throw SizeOverflowError("exhaustive oracle needs q^" + std::to_string(nbasis) +
                                    " evaluations, beyond cap " + std::to_string(caps.poly_enum));
        total *= q;
    }

    const std::size_t npts = points.size();
    // monomial values at each point, laid out basis-major
    std::vector<std::uint32_t> mono_vals(nbasis * npts);
    for (std::size_t b = 0; b < nbasis; ++b)
        for (std::size_t p = 0; p < npts; ++p) {
            std::uint32_t prod = 1;
            for (std::uint32_t v = 0; v < nvars; ++v)
                prod = field.mul(prod, field.pow(points[p][v], basis[b][v]));
            mono_vals[b * npts + p] = prod;
        }

    // odometer over coefficient vectors: stepping digit b by one adds the
    // b-th monomial's value at every point, and a q-fold wrap is a no-op
    std::vector<std::uint32_t> digits(nbasis, 0);
    std::vector<std::uint32_t> vals(npts, 0);
    std::uint64_t hits = 0;
    for (std::uint64_t iter = 0;; ++iter) {
        bool all_zero = true;
        for (std::size_t p = 0; p < npts; ++p)
            if (vals[p] != 0) {
                all_zero = false;
                break;
            }
        if (all_zero) ++hits;
        if (iter + 1 == total) break;
        std::size_t b = 0;
        for (;; ++b) {
            for (std::size_t p = 0; p < npts; ++p)
                vals[p] = field.add(vals[p], mono_vals[b * npts + p]);
            if (++digits[b] < q) break;
            digits[b] = 0;
        }
    }
    return Rational{hits, total};
}

} // namespace theta
