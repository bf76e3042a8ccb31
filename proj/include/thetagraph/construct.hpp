#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "thetagraph/caps.hpp"
#include "thetagraph/mpoly.hpp"
#include "thetagraph/rational.hpp"

namespace theta {

/// Parameters of the random algebraic bipartite construction: two sides
/// U, V, each a copy of F_q^k, with (u, v) an edge iff all k-1 random
/// polynomials of degree <= d in the 2k concatenated coordinates vanish.
struct ConstructionParams {
    std::uint32_t k = 2;       // path length; >= 2
    std::uint64_t q = 2;       // prime field order
    std::uint64_t seed = 0;    // master seed for polynomial sampling
    bool strict_theory = false;

    std::uint32_t t() const noexcept { return 2 * k; }      // variables per polynomial
    std::uint32_t r() const noexcept { return 2 * k; }      // moment order downstream
    std::uint32_t d() const noexcept { return 2 * k * k; }  // degree bound k*r
    std::uint32_t poly_count() const noexcept { return k - 1; }

    /// N = q^k vertices per side; throws SizeOverflowError on 64-bit overflow.
    std::uint64_t side_size() const;

    /// Checks every invariant: k >= 2 (ConfigError), q prime
    /// (NotPrimeError), N and the monomial basis within caps
    /// (SizeOverflowError), and — when strict_theory is set — q large
    /// enough for exact r-wise independence, q > C(kr, 2)
    /// (StrictTheoryViolationError).
    void validate(const Caps& caps = {}) const;

    friend bool operator==(const ConstructionParams&, const ConstructionParams&) = default;
};

/// Smallest prime usable with strict_theory at path length k, i.e. the
/// least prime exceeding C(2k^2, 2). (29 at k = 2.)
std::uint64_t strict_theory_min_q(std::uint32_t k);

enum class Side : std::uint8_t { U = 0, V = 1 };

inline char side_char(Side s) noexcept { return s == Side::U ? 'U' : 'V'; }

/// A vertex named by side and rank. Ranks are stable across pruning:
/// removed vertices keep their rank and are flagged absent.
struct VertexRef {
    Side side = Side::U;
    std::uint64_t rank = 0;
    friend auto operator<=>(const VertexRef&, const VertexRef&) = default;
};

/// rank = sum coords[i] * q^i (coords[0] least significant digit).
std::vector<std::uint32_t> rank_to_coords(std::uint64_t rank, std::uint32_t k, std::uint64_t q);
std::uint64_t coords_to_rank(std::span<const std::uint32_t> coords, std::uint64_t q);

/// Immutable bipartite graph with CSR adjacency on both sides, optional
/// per-row bitmaps for intersection counting, and optional construction
/// provenance (params + polynomials) when it came out of construct_graph.
class BipartiteGraph {
public:
    /// Empty 0x0 graph; placeholder until assigned.
    BipartiteGraph() = default;

    /// Complete bipartite host K_{nu,nv} (exhaustive-oracle substrate).
    static BipartiteGraph complete_host(std::uint32_t nu, std::uint32_t nv);

    /// Ad-hoc host from an explicit edge list (duplicates collapse).
    static BipartiteGraph from_edges(std::uint32_t nu, std::uint32_t nv,
                                     const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);

    /// Reload of an exported construction: params provenance, edges as
    /// given, but no polynomials (they are not part of the edge format).
    static BipartiteGraph from_construction_edges(
        const ConstructionParams& params,
        const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);

    std::uint32_t nu() const noexcept { return nu_; }
    std::uint32_t nv() const noexcept { return nv_; }
    std::uint32_t side_count(Side s) const noexcept { return s == Side::U ? nu_ : nv_; }
    std::uint64_t edge_count() const noexcept { return edge_count_; }

    bool present(VertexRef v) const noexcept {
        return (v.side == Side::U ? present_u_ : present_v_)[std::size_t(v.rank)] != 0;
    }
    std::uint32_t present_count(Side s) const noexcept {
        return s == Side::U ? present_u_count_ : present_v_count_;
    }

    std::span<const std::uint32_t> neighbors(VertexRef v) const noexcept {
        const auto& off = v.side == Side::U ? off_u_ : off_v_;
        const auto& adj = v.side == Side::U ? adj_u_ : adj_v_;
        const auto i = std::size_t(v.rank);
        return {adj.data() + off[i], adj.data() + off[i + 1]};
    }
    std::uint32_t degree(VertexRef v) const noexcept {
        const auto& off = v.side == Side::U ? off_u_ : off_v_;
        return std::uint32_t(off[std::size_t(v.rank) + 1] - off[std::size_t(v.rank)]);
    }

    bool has_edge(std::uint32_t u_rank, std::uint32_t v_rank) const noexcept;

    /// Row bitmaps exist when both sides fit the caps.bitmap_side limit.
    bool has_bitmaps() const noexcept { return words_u_ != 0; }
    std::size_t row_words(Side s) const noexcept { return s == Side::U ? words_u_ : words_v_; }
    /// Bit v_rank of row_bits({U, u}) is the edge (u, v); rows over the
    /// opposite side's ranks.
    std::span<const std::uint64_t> row_bits(VertexRef v) const noexcept {
        const auto& bits = v.side == Side::U ? bits_u_ : bits_v_;
        const std::size_t w = v.side == Side::U ? words_u_ : words_v_;
        return {bits.data() + std::size_t(v.rank) * w, w};
    }

    /// Construction provenance; nullptr / empty for ad-hoc hosts.
    const ConstructionParams* params() const noexcept {
        return params_ ? &*params_ : nullptr;
    }
    const std::vector<MultiPoly>& polys() const noexcept { return polys_; }

    /// Copy with the listed vertices removed: their rows empty, their
    /// presence flags cleared, all incident edges dropped. Ranks stable.
    BipartiteGraph without_vertices(const std::vector<VertexRef>& removals) const;

private:
    static BipartiteGraph build(std::optional<ConstructionParams> params,
                                std::vector<MultiPoly> polys, std::uint32_t nu, std::uint32_t nv,
                                std::vector<std::vector<std::uint32_t>> rows_u,
                                std::vector<std::uint8_t> present_u,
                                std::vector<std::uint8_t> present_v);

    std::optional<ConstructionParams> params_;
    std::vector<MultiPoly> polys_;
    std::uint32_t nu_ = 0, nv_ = 0;
    std::uint64_t edge_count_ = 0;
    std::uint32_t present_u_count_ = 0, present_v_count_ = 0;
    std::vector<std::uint8_t> present_u_, present_v_;
    std::vector<std::uint64_t> off_u_, off_v_; // CSR offsets, size n+1
    std::vector<std::uint32_t> adj_u_, adj_v_; // sorted neighbor ranks
    std::size_t words_u_ = 0, words_v_ = 0;    // bitmap row widths (0 = none)
    std::vector<std::uint64_t> bits_u_, bits_v_;

    friend BipartiteGraph construct_graph_with_polys(const ConstructionParams&,
                                                     std::vector<MultiPoly>, unsigned, const Caps&);
};

/// Samples the k-1 polynomials from per-index substreams of params.seed
/// and scans all N^2 pairs for common zeros. Deterministic in params
/// regardless of thread count.
BipartiteGraph construct_graph(const ConstructionParams& params, unsigned threads = 0,
                               const Caps& caps = {});

/// Same scan with caller-supplied polynomials (controls, replays).
BipartiteGraph construct_graph_with_polys(const ConstructionParams& params,
                                          std::vector<MultiPoly> polys, unsigned threads = 0,
                                          const Caps& caps = {});

/// Probability that a fixed pair is an edge: exactly q^{-(k-1)}.
Rational edge_probability(std::uint32_t k, std::uint64_t q);

/// Largest prime q with 2*q^k <= n, so a two-sided construction fits in
/// n vertices after padding; throws TooSmallError if no prime works.
std::uint64_t choose_prime(std::uint64_t n, std::uint32_t k);

} // namespace theta
