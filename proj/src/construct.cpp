#include "thetagraph/construct.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "thetagraph/errors.hpp"
#include "thetagraph/gf.hpp"
#include "thetagraph/parallel.hpp"
#include "thetagraph/rng.hpp"

namespace theta {

namespace {

std::uint64_t checked_pow(std::uint64_t base, std::uint32_t exp, const char* what) {
    std::uint64_t acc = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        if (base != 0 && acc > std::numeric_limits<std::uint64_t>::max() / base)
            throw SizeOverflowError(std::string(what) + " overflows 64 bits");
        acc *= base;
    }
    return acc;
}

} // namespace

std::uint64_t ConstructionParams::side_size() const {
    return checked_pow(q, k, "q^k");
}

void ConstructionParams::validate(const Caps& caps) const {
    if (k < 2) throw ConfigError("path length k must be at least 2, got " + std::to_string(k));
    Field field(q); // primality and width checks
    std::uint64_t n = side_size();
    if (n > caps.vertices)
        throw SizeOverflowError("side size q^k = " + std::to_string(n) + " exceeds cap " +
                                std::to_string(caps.vertices));
    basis_size(t(), d(), caps); // throws if the monomial basis is too large
    if (strict_theory) {
        std::uint64_t pairs = binomial(std::uint64_t(k) * r(), 2);
        if (q <= pairs)
            throw StrictTheoryViolationError(
                "strict theory needs q > C(kr,2) = " + std::to_string(pairs) + ", got q = " +
                std::to_string(q) + " (least admissible prime: " +
                std::to_string(strict_theory_min_q(k)) + ")");
    }
}

std::uint64_t strict_theory_min_q(std::uint32_t k) {
    std::uint64_t pairs = binomial(2ull * k * k, 2);
    std::uint64_t q = pairs + 1;
    while (!is_prime(q)) ++q;
    return q;
}

std::vector<std::uint32_t> rank_to_coords(std::uint64_t rank, std::uint32_t k, std::uint64_t q) {
    std::vector<std::uint32_t> coords(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        coords[i] = std::uint32_t(rank % q);
        rank /= q;
    }
    return coords;
}

std::uint64_t coords_to_rank(std::span<const std::uint32_t> coords, std::uint64_t q) {
    std::uint64_t rank = 0;
    for (std::size_t i = coords.size(); i-- > 0;) rank = rank * q + coords[i];
    return rank;
}

BipartiteGraph BipartiteGraph::build(std::optional<ConstructionParams> params,
                                     std::vector<MultiPoly> polys, std::uint32_t nu,
                                     std::uint32_t nv,
                                     std::vector<std::vector<std::uint32_t>> rows_u,
                                     std::vector<std::uint8_t> present_u,
                                     std::vector<std::uint8_t> present_v) {
    BipartiteGraph g;
    g.params_ = std::move(params);
    g.polys_ = std::move(polys);
    g.nu_ = nu;
    g.nv_ = nv;
    g.present_u_ = std::move(present_u);
    g.present_v_ = std::move(present_v);
    g.present_u_count_ = std::uint32_t(std::count(g.present_u_.begin(), g.present_u_.end(), 1));
    g.present_v_count_ = std::uint32_t(std::count(g.present_v_.begin(), g.present_v_.end(), 1));

    g.off_u_.assign(std::size_t(nu) + 1, 0);
    std::uint64_t total = 0;
    for (std::uint32_t u = 0; u < nu; ++u) {
        std::sort(rows_u[u].begin(), rows_u[u].end());
        rows_u[u].erase(std::unique(rows_u[u].begin(), rows_u[u].end()), rows_u[u].end());
        total += rows_u[u].size();
        g.off_u_[u + 1] = total;
    }
    g.edge_count_ = total;
    g.adj_u_.reserve(total);
    std::vector<std::uint64_t> deg_v(nv, 0);
    for (std::uint32_t u = 0; u < nu; ++u)
        for (std::uint32_t v : rows_u[u]) {
            g.adj_u_.push_back(v);
            ++deg_v[v];
        }

    g.off_v_.assign(std::size_t(nv) + 1, 0);
    for (std::uint32_t v = 0; v < nv; ++v) g.off_v_[v + 1] = g.off_v_[v] + deg_v[v];
    g.adj_v_.assign(total, 0);
    std::vector<std::uint64_t> cursor(g.off_v_.begin(), g.off_v_.end() - 1);
    for (std::uint32_t u = 0; u < nu; ++u)
        for (std::uint32_t v : rows_u[u]) g.adj_v_[cursor[v]++] = u; // ascending u per v row

    const std::uint64_t bitmap_side = Caps{}.bitmap_side;
    if (nu <= bitmap_side && nv <= bitmap_side) {
        g.words_u_ = (std::size_t(nv) + 63) / 64;
        g.words_v_ = (std::size_t(nu) + 63) / 64;
        g.bits_u_.assign(std::size_t(nu) * g.words_u_, 0);
        g.bits_v_.assign(std::size_t(nv) * g.words_v_, 0);
        for (std::uint32_t u = 0; u < nu; ++u)
            for (std::uint32_t v : rows_u[u]) {
                g.bits_u_[std::size_t(u) * g.words_u_ + v / 64] |= 1ull << (v % 64);
                g.bits_v_[std::size_t(v) * g.words_v_ + u / 64] |= 1ull << (u % 64);
            }
    }
    return g;
}

BipartiteGraph BipartiteGraph::complete_host(std::uint32_t nu, std::uint32_t nv) {
    std::vector<std::vector<std::uint32_t>> rows(nu);
    std::vector<std::uint32_t> all(nv);
    for (std::uint32_t v = 0; v < nv; ++v) all[v] = v;
    for (auto& row : rows) row = all;
    return build(std::nullopt, {}, nu, nv, std::move(rows), std::vector<std::uint8_t>(nu, 1),
                 std::vector<std::uint8_t>(nv, 1));
}

BipartiteGraph BipartiteGraph::from_edges(
    std::uint32_t nu, std::uint32_t nv,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::vector<std::vector<std::uint32_t>> rows(nu);
    for (auto [u, v] : edges) {
        if (u >= nu || v >= nv)
            throw ConfigError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") outside host " + std::to_string(nu) + "x" + std::to_string(nv));
        rows[u].push_back(v);
    }
    return build(std::nullopt, {}, nu, nv, std::move(rows), std::vector<std::uint8_t>(nu, 1),
                 std::vector<std::uint8_t>(nv, 1));
}

BipartiteGraph BipartiteGraph::from_construction_edges(
    const ConstructionParams& params,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    params.validate();
    const auto n = std::uint32_t(params.side_size());
    std::vector<std::vector<std::uint32_t>> rows(n);
    for (auto [u, v] : edges) {
        if (u >= n || v >= n)
            throw ParseError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                             ") outside rank space of size " + std::to_string(n));
        rows[u].push_back(v);
    }
    return build(params, {}, n, n, std::move(rows), std::vector<std::uint8_t>(n, 1),
                 std::vector<std::uint8_t>(n, 1));
}

bool BipartiteGraph::has_edge(std::uint32_t u_rank, std::uint32_t v_rank) const noexcept {
    if (words_u_ != 0)
        return (bits_u_[std::size_t(u_rank) * words_u_ + v_rank / 64] >> (v_rank % 64)) & 1;
    auto row = neighbors({Side::U, u_rank});
    return std::binary_search(row.begin(), row.end(), v_rank);
}

BipartiteGraph BipartiteGraph::without_vertices(const std::vector<VertexRef>& removals) const {
    std::vector<std::uint8_t> keep_u(present_u_), keep_v(present_v_);
    for (VertexRef r : removals) {
        auto& flags = r.side == Side::U ? keep_u : keep_v;
        if (r.rank >= flags.size())
            throw ConfigError("removal rank " + std::to_string(r.rank) + " out of range");
        flags[std::size_t(r.rank)] = 0;
    }
    std::vector<std::vector<std::uint32_t>> rows(nu_);
    for (std::uint32_t u = 0; u < nu_; ++u) {
        if (!keep_u[u]) continue;
        auto row = neighbors({Side::U, u});
        rows[u].reserve(row.size());
        for (std::uint32_t v : row)
            if (keep_v[v]) rows[u].push_back(v);
    }
    return build(params_, polys_, nu_, nv_, std::move(rows), std::move(keep_u), std::move(keep_v));
}

namespace {

// Dense coefficient array (by exponent) of a univariate polynomial.
std::vector<std::uint32_t> dense_univariate(const MultiPoly& g) {
    std::vector<std::uint32_t> coeffs(std::size_t(g.degree()) + 1, 0);
    for (std::size_t i = 0; i < g.term_count(); ++i) {
        auto term = g.term(i);
        coeffs[term.exps[0]] = term.coeff;
    }
    return coeffs;
}

// Sets the bit base + x * stride for every x in F_q with g(x, rest...) = 0,
// recursing over the remaining variables in rank-digit order.
void mark_zero_set(const MultiPoly& g, const Field& field, std::uint64_t base,
                   std::uint64_t stride, std::vector<std::uint64_t>& bits) {
    const std::uint32_t q = field.q();
    if (g.nvars() == 0) {
        // only reachable when called on an already-constant polynomial
        if (g.evaluate({}) == 0) bits[base / 64] |= 1ull << (base % 64);
        return;
    }
    if (g.nvars() == 1) {
        auto coeffs = dense_univariate(g);
        for (std::uint32_t x = 0; x < q; ++x) {
            std::uint32_t val = 0;
            for (std::size_t e = coeffs.size(); e-- > 0;)
                val = field.add(field.mul(val, x), coeffs[e]);
            if (val == 0) {
                const std::uint64_t rank = base + std::uint64_t(x) * stride;
                bits[rank / 64] |= 1ull << (rank % 64);
            }
        }
        return;
    }
    for (std::uint32_t x = 0; x < q; ++x)
        mark_zero_set(g.specialize_first(x), field, base + std::uint64_t(x) * stride, stride * q,
                      bits);
}

} // namespace

BipartiteGraph construct_graph_with_polys(const ConstructionParams& params,
                                          std::vector<MultiPoly> polys, unsigned threads,
                                          const Caps& caps) {
    params.validate(caps);
    const Field field(params.q);
    if (polys.size() != params.poly_count())
        throw ConfigError("expected " + std::to_string(params.poly_count()) +
                          " polynomials, got " + std::to_string(polys.size()));
    for (const auto& p : polys) {
        if (p.field() != field || p.nvars() != params.t() || p.degree() != params.d())
            throw ConfigError("polynomial shape mismatch: want degree <= " +
                              std::to_string(params.d()) + " in " + std::to_string(params.t()) +
                              " variables over F_" + std::to_string(params.q));
    }

    const std::uint64_t n64 = params.side_size();
    const auto n = std::uint32_t(n64);
    const std::size_t words = (std::size_t(n) + 63) / 64;
    std::vector<std::vector<std::uint32_t>> rows(n);

    parallel_for(n64, threads, [&](std::uint64_t u_rank) {
        auto u_coords = rank_to_coords(u_rank, params.k, params.q);
        std::vector<std::uint64_t> row(words, 0), scratch;
        for (std::size_t i = 0; i < polys.size(); ++i) {
            MultiPoly g = polys[i].specialize_prefix(u_coords);
            if (i == 0) {
                mark_zero_set(g, field, 0, 1, row);
            } else {
                scratch.assign(words, 0);
                mark_zero_set(g, field, 0, 1, scratch);
                for (std::size_t w = 0; w < words; ++w) row[w] &= scratch[w];
            }
        }
        auto& out = rows[std::size_t(u_rank)];
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t bitsw = row[w];
            while (bitsw != 0) {
                const int b = std::countr_zero(bitsw);
                const std::uint64_t v = w * 64 + std::uint64_t(b);
                if (v < n) out.push_back(std::uint32_t(v));
                bitsw &= bitsw - 1;
            }
        }
    });

    return BipartiteGraph::build(params, std::move(polys), n, n, std::move(rows),
                                 std::vector<std::uint8_t>(n, 1), std::vector<std::uint8_t>(n, 1));
}

BipartiteGraph construct_graph(const ConstructionParams& params, unsigned threads,
                               const Caps& caps) {
    params.validate(caps);
    const Field field(params.q);
    std::vector<MultiPoly> polys;
    polys.reserve(params.poly_count());
    for (std::uint32_t i = 0; i < params.poly_count(); ++i) {
        SplitMix64 stream(derive_seed(params.seed, i));
        polys.push_back(MultiPoly::sample_uniform(field, params.t(), params.d(), stream, caps));
    }
    return construct_graph_with_polys(params, std::move(polys), threads, caps);
}

Rational edge_probability(std::uint32_t k, std::uint64_t q) {
    if (k < 2) throw ConfigError("path length k must be at least 2, got " + std::to_string(k));
    Field field(q);
    return Rational{1, checked_pow(q, k - 1, "q^{k-1}")};
}

std::uint64_t choose_prime(std::uint64_t n, std::uint32_t k) {
    if (k < 2) throw ConfigError("path length k must be at least 2, got " + std::to_string(k));
    std::uint64_t best = 0;
    for (std::uint64_t q = 2;; ++q) {
        unsigned __int128 doubled = 2;
        for (std::uint32_t i = 0; i < k; ++i) doubled *= q;
        if (doubled > n) break;
        if (is_prime(q)) best = q;
    }
    if (best == 0)
        throw TooSmallError("no prime q has 2*q^" + std::to_string(k) +
                            " <= " + std::to_string(n));
    return best;
}

} // namespace theta
