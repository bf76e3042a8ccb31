#pragma once

#include <cstdint>

namespace theta {

/// Resource caps for the exact/exhaustive code paths. Every enumeration
/// checks its cap up front and throws SizeOverflowError instead of
/// silently truncating.
struct Caps {
    /// Max number of monomials C(t+d, t) in a polynomial basis.
    std::uint64_t basis = 2'097'152;
    /// Max number of polynomials q^{C(t+d,t)} enumerated by the exact
    /// vanishing-probability oracle.
    std::uint64_t poly_enum = 10'000'000;
    /// Max number of interior-vertex tuples q^{k(k-1)} enumerated per
    /// pair by the solution-set counter.
    std::uint64_t solution_enum = 10'000'000;
    /// Max number of vertex pairs visited by an all-pairs scan.
    std::uint64_t pair_scan = 200'000'000;
    /// Max number of entries in a walk-count table.
    std::uint64_t walk_table = 20'000'000;
    /// Max side size N = q^k of a constructed graph.
    std::uint64_t vertices = 1'048'576;
    /// Largest side size for which per-row adjacency bitmaps are built
    /// (two full n*n bit matrices; 8192 keeps them at 16 MiB).
    std::uint64_t bitmap_side = 8'192;

    friend bool operator==(const Caps&, const Caps&) = default;
};

} // namespace theta
