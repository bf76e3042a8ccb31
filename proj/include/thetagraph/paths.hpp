#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thetagraph/caps.hpp"
#include "thetagraph/construct.hpp"

namespace theta {

/// A distinctness violation of a length-k walk w1, x_1, ..., x_{k-1}, w2:
/// the walk revisits w1, repeats an internal vertex, or touches w2 early.
struct DegeneracyCondition {
    enum class Kind : std::uint8_t { W1HitsInternal, InternalCollision, InternalHitsW2 };
    Kind kind = Kind::W1HitsInternal;
    std::uint32_t a = 0; // InternalCollision: first index; InternalHitsW2: the index
    std::uint32_t b = 0; // W1HitsInternal / InternalCollision: second index

    std::string label() const; // "w1=x2", "x1=x3", "x2=w2"
    friend auto operator<=>(const DegeneracyCondition&, const DegeneracyCondition&) = default;
};

/// Every representable condition for path length k, in the canonical scan
/// order: w1 = x_b (b ascending), x_a = x_b ((a, b) lexicographic),
/// x_a = w2 (a ascending). A solution is classified by the first condition
/// it satisfies.
std::vector<DegeneracyCondition> degeneracy_conditions(std::uint32_t k);

/// Exhaustive count of the walk-system solution set between a fixed pair,
/// with every solution classified as a path or by its first violated
/// distinctness condition.
struct SolutionCount {
    std::uint64_t solution_count = 0;
    std::uint64_t path_count = 0; // solutions violating no condition
    std::vector<std::pair<DegeneracyCondition, std::uint64_t>> degenerate; // canonical order
    std::uint64_t degenerate_total() const;
};

/// Per-pair analysis row: paths, walks and solution-set size side by side
/// so the conservation laws (walks = solutions, paths + degenerate =
/// solutions) are checkable per pair.
struct PairPathReport {
    VertexRef w1, w2;
    std::uint64_t path_count = 0;
    std::uint64_t walk_count = 0;
    std::uint64_t solution_count = 0;
    std::vector<std::pair<DegeneracyCondition, std::uint64_t>> degenerate_breakdown;
    std::uint64_t degenerate_total() const;
};

/// Endpoints of a length-k path are on the same side iff k is even.
bool parity_valid(VertexRef w1, VertexRef w2, std::uint32_t k);

/// Validates a pair query: ranks in range (ConfigError), distinct
/// endpoints (SameVertexError), compatible sides (ParityMismatchError).
void require_pair(const BipartiteGraph& g, VertexRef w1, VertexRef w2, std::uint32_t k);

/// Number of length-k paths w1, x_1, ..., x_{k-1}, w2 with all k+1
/// vertices pairwise distinct, counted as directed sequences (the count
/// is symmetric in w1, w2 by path reversal).
std::uint64_t count_paths(const BipartiteGraph& g, VertexRef w1, VertexRef w2, std::uint32_t k);

/// The internal-vertex sequences (x_1, ..., x_{k-1}) of every length-k
/// path between the pair; throws SizeOverflowError past caps.solution_enum.
std::vector<std::vector<VertexRef>> enumerate_paths(const BipartiteGraph& g, VertexRef w1,
                                                    VertexRef w2, std::uint32_t k,
                                                    const Caps& caps = {});

/// All-pairs length-k walk counts (unrestricted vertex sequences) via
/// k-step neighbor propagation in exact 64-bit integers.
class WalkTable {
public:
    WalkTable(const BipartiteGraph& g, std::uint32_t k, unsigned threads = 0,
              const Caps& caps = {});

    std::uint32_t k() const noexcept { return k_; }

    /// Walks from w1 to w2; ParityMismatchError when the sides are not
    /// reachable in k steps. Removed vertices have zero walks.
    std::uint64_t walks(VertexRef w1, VertexRef w2) const;

private:
    std::uint32_t k_ = 0;
    std::uint32_t nu_ = 0, nv_ = 0;
    std::vector<std::uint64_t> uu_, vv_; // k even: same-side tables
    std::vector<std::uint64_t> uv_;      // k odd: cross table (u-major)
};

/// Exhaustively enumerates the walk system f-solutions between w1 and w2
/// — every (x_1, ..., x_{k-1}) whose consecutive pairs are all edges —
/// and classifies each solution. Throws SizeOverflowError when the
/// enumeration would exceed caps.solution_enum visited tuples.
SolutionCount count_system_solutions(const BipartiteGraph& g, VertexRef w1, VertexRef w2,
                                     std::uint32_t k, const Caps& caps = {});

/// Assembles the per-pair report: path count (independent DFS/bitmap
/// count), walk count (from the table when given, else from the solution
/// enumeration) and the classified solution set.
PairPathReport analyze_pair(const BipartiteGraph& g, const WalkTable* walk_table, VertexRef w1,
                            VertexRef w2, std::uint32_t k, const Caps& caps = {});

struct BadPair {
    VertexRef w1, w2;
    std::uint64_t path_count = 0;
    friend auto operator<=>(const BadPair&, const BadPair&) = default;
};

/// Deterministic all-pairs path-count scan over unordered parity-valid
/// pairs of present vertices (both same-side orbits when k is even).
struct PathScan {
    std::map<std::uint64_t, std::uint64_t> histogram; // path count -> #pairs
    std::vector<BadPair> collected;                   // pairs with count >= collect_min
    std::uint64_t pair_count = 0;                     // pairs scanned
};
PathScan scan_path_counts(const BipartiteGraph& g, std::uint32_t k, std::uint64_t collect_min,
                          unsigned threads = 0, const Caps& caps = {});

/// All unordered parity-valid pairs with more than ell length-k paths.
std::vector<BadPair> find_bad_pairs(const BipartiteGraph& g, std::uint32_t k, std::uint64_t ell,
                                    unsigned threads = 0, const Caps& caps = {});

/// Removes the lexicographically smaller (side, rank) vertex of each bad
/// pair (U before V, then lower rank). Removal only destroys paths, so
/// the result has no pair above the threshold the bad list was built with.
BipartiteGraph prune(const BipartiteGraph& g, const std::vector<BadPair>& bad);

/// True iff g has no theta subgraph of ell internally disjoint length-k
/// paths sharing both endpoints, by exhaustive backtracking search.
bool theta_free_certify(const BipartiteGraph& g, std::uint32_t k, std::uint64_t ell,
                        const Caps& caps = {});

/// Exhaustive check of the union inequality k*n <= (k-1)*m over every
/// ordered collection of r length-k paths between every parity-valid
/// pair, where m counts the union's edges and n its internal vertices.
struct UnionWitness {
    VertexRef w1, w2;
    std::vector<std::vector<VertexRef>> paths; // the r internal sequences
    std::uint64_t internal_vertices = 0;       // n
    std::uint64_t union_edges = 0;             // m
};
struct UnionCheck {
    bool ok = true;
    std::optional<UnionWitness> witness; // first violation in scan order
    std::uint64_t collections_checked = 0;
};
UnionCheck check_union_inequality(const BipartiteGraph& host, std::uint32_t r, std::uint32_t k,
                                  const Caps& caps = {});

/// Tabulates P_{r,m} — ordered collections of r length-k paths between a
/// fixed pair of the complete host K_{n,n} whose union has exactly m
/// edges — and checks P_{r,m} <= n^{(k-1)m/k} for every m (as the exact
/// integer comparison P^k <= n^{(k-1)m}).
struct CollectionsBound {
    bool ok = true;
    VertexRef w1, w2;                          // the fixed endpoint pair
    std::map<std::uint64_t, std::uint64_t> p_rm;
    std::optional<std::uint64_t> violating_m;  // smallest violating m
    std::uint64_t collections_checked = 0;
};
CollectionsBound count_collections_bound_check(std::uint32_t n_side, std::uint32_t k,
                                               std::uint32_t r, const Caps& caps = {});

} // namespace theta
