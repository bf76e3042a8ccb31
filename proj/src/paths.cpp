#include "thetagraph/paths.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <set>

#include "thetagraph/errors.hpp"
#include "thetagraph/parallel.hpp"
#include "thetagraph/u128.hpp"

namespace theta {

namespace {

constexpr Side opposite(Side s) noexcept { return s == Side::U ? Side::V : Side::U; }

// Edge test for two vertices known to be on opposite sides.
bool edge_between(const BipartiteGraph& g, VertexRef a, VertexRef b) noexcept {
    return a.side == Side::U ? g.has_edge(std::uint32_t(a.rank), std::uint32_t(b.rank))
                             : g.has_edge(std::uint32_t(b.rank), std::uint32_t(a.rank));
}

// |N(a) cap N(b)| for two same-side vertices.
std::uint64_t common_neighbors(const BipartiteGraph& g, VertexRef a, VertexRef b) noexcept {
    if (g.has_bitmaps()) {
        auto ra = g.row_bits(a), rb = g.row_bits(b);
        std::uint64_t total = 0;
        for (std::size_t w = 0; w < ra.size(); ++w) total += std::popcount(ra[w] & rb[w]);
        return total;
    }
    auto na = g.neighbors(a), nb = g.neighbors(b);
    std::uint64_t total = 0;
    std::size_t i = 0, j = 0;
    while (i < na.size() && j < nb.size()) {
        if (na[i] < nb[j])
            ++i;
        else if (nb[j] < na[i])
            ++j;
        else {
            ++total;
            ++i;
            ++j;
        }
    }
    return total;
}

std::uint64_t encode(VertexRef v) noexcept {
    return (std::uint64_t(v.side) << 32) | v.rank;
}

} // namespace

std::string DegeneracyCondition::label() const {
    switch (kind) {
        case Kind::W1HitsInternal:
            return "w1=x" + std::to_string(b);
        case Kind::InternalCollision:
            return "x" + std::to_string(a) + "=x" + std::to_string(b);
        case Kind::InternalHitsW2:
            return "x" + std::to_string(a) + "=w2";
    }
    return {};
}

std::vector<DegeneracyCondition> degeneracy_conditions(std::uint32_t k) {
    std::vector<DegeneracyCondition> out;
    if (k < 2) return out;
    for (std::uint32_t b = 1; b <= k - 1; ++b)
        out.push_back({DegeneracyCondition::Kind::W1HitsInternal, 0, b});
    for (std::uint32_t a = 1; a <= k - 1; ++a)
        for (std::uint32_t b = a + 1; b <= k - 1; ++b)
            out.push_back({DegeneracyCondition::Kind::InternalCollision, a, b});
    for (std::uint32_t a = 1; a <= k - 1; ++a)
        out.push_back({DegeneracyCondition::Kind::InternalHitsW2, a, 0});
    return out;
}

std::uint64_t SolutionCount::degenerate_total() const {
    std::uint64_t total = 0;
    for (const auto& [cond, count] : degenerate) total += count;
    return total;
}

std::uint64_t PairPathReport::degenerate_total() const {
    std::uint64_t total = 0;
    for (const auto& [cond, count] : degenerate_breakdown) total += count;
    return total;
}

bool parity_valid(VertexRef w1, VertexRef w2, std::uint32_t k) {
    return (k % 2 == 0) == (w1.side == w2.side);
}

void require_pair(const BipartiteGraph& g, VertexRef w1, VertexRef w2, std::uint32_t k) {
    if (k == 0) throw ConfigError("path length must be positive");
    if (w1.rank >= g.side_count(w1.side) || w2.rank >= g.side_count(w2.side))
        throw ConfigError("vertex rank out of range");
    if (w1 == w2) throw SameVertexError();
    if (!parity_valid(w1, w2, k))
        throw ParityMismatchError(
            std::string("a length-") + std::to_string(k) + " path from side " +
            side_char(w1.side) + " cannot end on side " + side_char(w2.side));
}

namespace {

// Depth-first path enumeration with on-path vertex marking. `collect`
// null: count only.
struct PathSearch {
    const BipartiteGraph& g;
    VertexRef w2;
    std::uint32_t k;
    std::vector<std::vector<VertexRef>>* collect;
    std::uint64_t cap;
    std::vector<std::uint8_t> mark_u, mark_v;
    std::vector<VertexRef> stack;
    std::uint64_t count = 0;

    PathSearch(const BipartiteGraph& graph, VertexRef end, std::uint32_t len,
               std::vector<std::vector<VertexRef>>* out, std::uint64_t path_cap)
        : g(graph), w2(end), k(len), collect(out), cap(path_cap),
          mark_u(graph.nu(), 0), mark_v(graph.nv(), 0) {}

    std::uint8_t& mark(VertexRef v) {
        return (v.side == Side::U ? mark_u : mark_v)[std::size_t(v.rank)];
    }

    void descend(VertexRef cur, std::uint32_t steps_left) {
        if (steps_left == 1) {
            if (edge_between(g, cur, w2)) {
                ++count;
                if (collect) {
                    if (count > cap)
                        throw SizeOverflowError("path enumeration exceeds cap " +
                                                std::to_string(cap));
                    collect->push_back(stack);
                }
            }
            return;
        }
        const Side next_side = opposite(cur.side);
        for (std::uint32_t rank : g.neighbors(cur)) {
            VertexRef next{next_side, rank};
            if (next == w2 || mark(next)) continue;
            mark(next) = 1;
            stack.push_back(next);
            descend(next, steps_left - 1);
            stack.pop_back();
            mark(next) = 0;
        }
    }
};

} // namespace

std::uint64_t count_paths(const BipartiteGraph& g, VertexRef w1, VertexRef w2, std::uint32_t k) {
    require_pair(g, w1, w2, k);
    if (k == 1) return edge_between(g, w1, w2) ? 1 : 0;
    if (k == 2) return common_neighbors(g, w1, w2); // middles cannot collide with endpoints
    PathSearch search(g, w2, k, nullptr, 0);
    search.mark(w1) = 1;
    search.descend(w1, k);
    return search.count;
}

std::vector<std::vector<VertexRef>> enumerate_paths(const BipartiteGraph& g, VertexRef w1,
                                                    VertexRef w2, std::uint32_t k,
                                                    const Caps& caps) {
    require_pair(g, w1, w2, k);
    std::vector<std::vector<VertexRef>> out;
    if (k == 1) {
        if (edge_between(g, w1, w2)) out.emplace_back();
        return out;
    }
    PathSearch search(g, w2, k, &out, caps.solution_enum);
    search.mark(w1) = 1;
    search.descend(w1, k);
    return out;
}

WalkTable::WalkTable(const BipartiteGraph& g, std::uint32_t k, unsigned threads,
                     const Caps& caps) {
    if (k == 0) throw ConfigError("path length must be positive");
    k_ = k;
    nu_ = g.nu();
    nv_ = g.nv();
    const bool even = k % 2 == 0;
    const std::uint64_t entries = even
        ? std::uint64_t(nu_) * nu_ + std::uint64_t(nv_) * nv_
        : std::uint64_t(nu_) * nv_;
    if (entries > caps.walk_table)
        throw SizeOverflowError("walk table of " + std::to_string(entries) +
                                " entries exceeds cap " + std::to_string(caps.walk_table));
    if (even) {
        uu_.assign(std::uint64_t(nu_) * nu_, 0);
        vv_.assign(std::uint64_t(nv_) * nv_, 0);
    } else {
        uv_.assign(std::uint64_t(nu_) * nv_, 0);
    }

    auto propagate = [&](Side start, std::uint64_t source, std::uint64_t* row) {
        std::vector<std::uint64_t> cur(start == Side::U ? nu_ : nv_, 0);
        cur[std::size_t(source)] = 1;
        Side side = start;
        std::vector<std::uint64_t> next;
        for (std::uint32_t step = 0; step < k_; ++step) {
            const Side other = opposite(side);
            next.assign(other == Side::U ? nu_ : nv_, 0);
            for (std::uint32_t x = 0; x < cur.size(); ++x) {
                const std::uint64_t c = cur[x];
                if (c == 0) continue;
                for (std::uint32_t y : g.neighbors({side, x})) next[y] += c;
            }
            cur.swap(next);
            side = other;
        }
        std::copy(cur.begin(), cur.end(), row);
    };

    parallel_for(nu_, threads, [&](std::uint64_t u) {
        propagate(Side::U, u, even ? uu_.data() + u * nu_ : uv_.data() + u * nv_);
    });
    if (even)
        parallel_for(nv_, threads,
                     [&](std::uint64_t v) { propagate(Side::V, v, vv_.data() + v * nv_); });
}

std::uint64_t WalkTable::walks(VertexRef w1, VertexRef w2) const {
    const bool even = k_ % 2 == 0;
    if ((w1.side == w2.side) != even)
        throw ParityMismatchError(std::string("length-") + std::to_string(k_) +
                                  " walks cannot join sides " + side_char(w1.side) + " and " +
                                  side_char(w2.side));
    const std::uint32_t limit1 = w1.side == Side::U ? nu_ : nv_;
    const std::uint32_t limit2 = w2.side == Side::U ? nu_ : nv_;
    if (w1.rank >= limit1 || w2.rank >= limit2) throw ConfigError("vertex rank out of range");
    if (even) {
        return w1.side == Side::U ? uu_[w1.rank * nu_ + w2.rank] : vv_[w1.rank * nv_ + w2.rank];
    }
    // cross walks are symmetric under path reversal, so one table serves
    return w1.side == Side::U ? uv_[w1.rank * nv_ + w2.rank] : uv_[w2.rank * nv_ + w1.rank];
}

SolutionCount count_system_solutions(const BipartiteGraph& g, VertexRef w1, VertexRef w2,
                                     std::uint32_t k, const Caps& caps) {
    require_pair(g, w1, w2, k);
    const auto conditions = degeneracy_conditions(k);
    SolutionCount out;
    out.degenerate.reserve(conditions.size());
    for (const auto& cond : conditions) out.degenerate.emplace_back(cond, 0);

    if (k == 1) {
        if (edge_between(g, w1, w2)) {
            out.solution_count = 1;
            out.path_count = 1;
        }
        return out;
    }

    std::vector<VertexRef> xs(k - 1);
    std::uint64_t visited = 0;

    auto classify = [&] {
        ++out.solution_count;
        for (std::size_t c = 0; c < conditions.size(); ++c) {
            const auto& cond = conditions[c];
            bool hit = false;
            switch (cond.kind) {
                case DegeneracyCondition::Kind::W1HitsInternal:
                    hit = xs[cond.b - 1] == w1;
                    break;
                case DegeneracyCondition::Kind::InternalCollision:
                    hit = xs[cond.a - 1] == xs[cond.b - 1];
                    break;
                case DegeneracyCondition::Kind::InternalHitsW2:
                    hit = xs[cond.a - 1] == w2;
                    break;
            }
            if (hit) {
                ++out.degenerate[c].second;
                return;
            }
        }
        ++out.path_count;
    };

    auto place = [&](auto&& self, std::uint32_t j, VertexRef prev) -> void {
        const Side side = opposite(prev.side);
        for (std::uint32_t rank : g.neighbors(prev)) {
            if (++visited > caps.solution_enum)
                throw SizeOverflowError("solution enumeration exceeds cap " +
                                        std::to_string(caps.solution_enum));
            xs[j] = {side, rank};
            if (j == k - 2) {
                if (edge_between(g, xs[j], w2)) classify();
            } else {
                self(self, j + 1, xs[j]);
            }
        }
    };
    place(place, 0, w1);
    return out;
}

PairPathReport analyze_pair(const BipartiteGraph& g, const WalkTable* walk_table, VertexRef w1,
                            VertexRef w2, std::uint32_t k, const Caps& caps) {
    PairPathReport report;
    report.w1 = w1;
    report.w2 = w2;
    report.path_count = count_paths(g, w1, w2, k);
    SolutionCount sol = count_system_solutions(g, w1, w2, k, caps);
    report.solution_count = sol.solution_count;
    report.degenerate_breakdown = std::move(sol.degenerate);
    report.walk_count = walk_table ? walk_table->walks(w1, w2) : sol.solution_count;
    return report;
}

namespace {

struct BlockOut {
    std::map<std::uint64_t, std::uint64_t> histogram;
    std::vector<BadPair> collected;
    std::uint64_t pairs = 0;
};

// [lo, hi) of block b when n is split across `workers` contiguous blocks.
std::pair<std::uint32_t, std::uint32_t> block_range(std::uint32_t n, unsigned workers,
                                                    unsigned b) {
    const std::uint32_t base = n / workers, extra = n % workers;
    const std::uint32_t lo = b * base + std::min<std::uint32_t>(b, extra);
    return {lo, lo + base + (b < extra ? 1 : 0)};
}

} // namespace

PathScan scan_path_counts(const BipartiteGraph& g, std::uint32_t k, std::uint64_t collect_min,
                          unsigned threads, const Caps& caps) {
    if (k == 0) throw ConfigError("path length must be positive");
    const bool even = k % 2 == 0;
    const std::uint64_t nu = g.nu(), nv = g.nv();
    const std::uint64_t npairs =
        even ? nu * (nu - 1) / 2 + nv * (nv - 1) / 2 : nu * nv;
    if (npairs > caps.pair_scan)
        throw SizeOverflowError("pair scan of " + std::to_string(npairs) +
                                " pairs exceeds cap " + std::to_string(caps.pair_scan));

    PathScan result;
    auto pair_paths = [&](VertexRef a, VertexRef b) -> std::uint64_t {
        if (k == 2) return common_neighbors(g, a, b);
        return count_paths(g, a, b, k);
    };

    auto run_phase = [&](Side lead_side) {
        const auto n_lead = g.side_count(lead_side);
        if (n_lead == 0) return;
        unsigned workers = resolve_threads(threads);
        if (workers > n_lead) workers = n_lead;
        std::vector<BlockOut> blocks(workers);
        parallel_for(workers, workers, [&](std::uint64_t b) {
            auto [lo, hi] = block_range(n_lead, workers, unsigned(b));
            BlockOut& out = blocks[b];
            for (std::uint32_t lead = lo; lead < hi; ++lead) {
                const VertexRef w1{lead_side, lead};
                if (!g.present(w1)) continue;
                if (even) {
                    for (std::uint32_t other = lead + 1; other < n_lead; ++other) {
                        const VertexRef w2{lead_side, other};
                        if (!g.present(w2)) continue;
                        const std::uint64_t c = pair_paths(w1, w2);
                        ++out.pairs;
                        ++out.histogram[c];
                        if (c >= collect_min) out.collected.push_back({w1, w2, c});
                    }
                } else {
                    for (std::uint32_t other = 0; other < g.nv(); ++other) {
                        const VertexRef w2{Side::V, other};
                        if (!g.present(w2)) continue;
                        const std::uint64_t c = pair_paths(w1, w2);
                        ++out.pairs;
                        ++out.histogram[c];
                        if (c >= collect_min) out.collected.push_back({w1, w2, c});
                    }
                }
            }
        });
        for (const BlockOut& out : blocks) {
            result.pair_count += out.pairs;
            for (const auto& [count, pairs] : out.histogram) result.histogram[count] += pairs;
            result.collected.insert(result.collected.end(), out.collected.begin(),
                                    out.collected.end());
        }
    };

    run_phase(Side::U);
    if (even) run_phase(Side::V);
    return result;
}

std::vector<BadPair> find_bad_pairs(const BipartiteGraph& g, std::uint32_t k, std::uint64_t ell,
                                    unsigned threads, const Caps& caps) {
    return scan_path_counts(g, k, ell + 1, threads, caps).collected;
}

BipartiteGraph prune(const BipartiteGraph& g, const std::vector<BadPair>& bad) {
    std::vector<VertexRef> removals;
    removals.reserve(bad.size());
    for (const BadPair& pair : bad) removals.push_back(std::min(pair.w1, pair.w2));
    std::sort(removals.begin(), removals.end());
    removals.erase(std::unique(removals.begin(), removals.end()), removals.end());
    return g.without_vertices(removals);
}

namespace {

// Backtracking search for `needed` pairwise internally-disjoint paths out
// of `paths` (each given by its internal vertices).
bool disjoint_subset_exists(const std::vector<std::vector<VertexRef>>& paths,
                            std::uint64_t needed, std::vector<std::uint8_t>& used_u,
                            std::vector<std::uint8_t>& used_v) {
    if (needed == 0) return true;

    auto used = [&](VertexRef v) -> std::uint8_t& {
        return (v.side == Side::U ? used_u : used_v)[std::size_t(v.rank)];
    };

    auto pick = [&](auto&& self, std::size_t idx, std::uint64_t chosen) -> bool {
        if (chosen == needed) return true;
        if (idx >= paths.size() || paths.size() - idx < needed - chosen) return false;
        const auto& path = paths[idx];
        bool free = true;
        for (VertexRef v : path)
            if (used(v)) {
                free = false;
                break;
            }
        if (free) {
            for (VertexRef v : path) used(v) = 1;
            if (self(self, idx + 1, chosen + 1)) return true;
            for (VertexRef v : path) used(v) = 0;
        }
        return self(self, idx + 1, chosen);
    };
    return pick(pick, 0, 0);
}

} // namespace

bool theta_free_certify(const BipartiteGraph& g, std::uint32_t k, std::uint64_t ell,
                        const Caps& caps) {
    if (k == 0) throw ConfigError("path length must be positive");
    if (ell == 0) return false; // zero disjoint paths exist vacuously
    const bool even = k % 2 == 0;
    std::vector<std::uint8_t> used_u(g.nu(), 0), used_v(g.nv(), 0);

    auto pair_hosts_theta = [&](VertexRef w1, VertexRef w2) {
        auto paths = enumerate_paths(g, w1, w2, k, caps);
        if (paths.size() < ell) return false;
        // one internal vertex per path: distinct paths are always disjoint
        if (k == 2) return true;
        return disjoint_subset_exists(paths, ell, used_u, used_v);
    };

    if (even) {
        for (Side side : {Side::U, Side::V}) {
            const auto n = g.side_count(side);
            for (std::uint32_t a = 0; a < n; ++a) {
                if (!g.present({side, a})) continue;
                for (std::uint32_t b = a + 1; b < n; ++b) {
                    if (!g.present({side, b})) continue;
                    if (pair_hosts_theta({side, a}, {side, b})) return false;
                }
            }
        }
    } else {
        for (std::uint32_t u = 0; u < g.nu(); ++u) {
            if (!g.present({Side::U, u})) continue;
            for (std::uint32_t v = 0; v < g.nv(); ++v) {
                if (!g.present({Side::V, v})) continue;
                if (pair_hosts_theta({Side::U, u}, {Side::V, v})) return false;
            }
        }
    }
    return true;
}

namespace {

// Sorted unique union size bookkeeping for path collections.
struct CollectionAccumulator {
    std::vector<std::uint64_t> vertices; // encoded internal vertices
    std::vector<std::uint64_t> edges;    // encoded (u_rank, v_rank) pairs

    void add_path(VertexRef w1, const std::vector<VertexRef>& internals, VertexRef w2) {
        VertexRef prev = w1;
        for (VertexRef x : internals) {
            vertices.push_back(encode(x));
            edges.push_back(edge_key(prev, x));
            prev = x;
        }
        edges.push_back(edge_key(prev, w2));
    }

    static std::uint64_t edge_key(VertexRef a, VertexRef b) noexcept {
        const VertexRef u = a.side == Side::U ? a : b;
        const VertexRef v = a.side == Side::U ? b : a;
        return (u.rank << 32) | v.rank;
    }

    static std::uint64_t distinct(std::vector<std::uint64_t>& items) {
        std::sort(items.begin(), items.end());
        return std::uint64_t(std::unique(items.begin(), items.end()) - items.begin());
    }
};

} // namespace

UnionCheck check_union_inequality(const BipartiteGraph& host, std::uint32_t r, std::uint32_t k,
                                  const Caps& caps) {
    if (r == 0) throw ConfigError("collection size r must be positive");
    UnionCheck result;
    const bool even = k % 2 == 0;

    auto check_pair = [&](VertexRef w1, VertexRef w2) -> bool { // false = violation found
        auto paths = enumerate_paths(host, w1, w2, k, caps);
        if (paths.empty()) return true;
        U128Pow tuples = pow_u128(paths.size(), r);
        if (tuples.overflow ||
            tuples.value > u128(caps.solution_enum - result.collections_checked))
            throw SizeOverflowError("collection enumeration exceeds cap " +
                                    std::to_string(caps.solution_enum));
        std::vector<std::size_t> pick(r, 0);
        for (;;) {
            CollectionAccumulator acc;
            for (std::size_t i = 0; i < r; ++i) acc.add_path(w1, paths[pick[i]], w2);
            const std::uint64_t n = CollectionAccumulator::distinct(acc.vertices);
            const std::uint64_t m = CollectionAccumulator::distinct(acc.edges);
            ++result.collections_checked;
            if (std::uint64_t(k) * n > std::uint64_t(k - 1) * m) {
                UnionWitness witness;
                witness.w1 = w1;
                witness.w2 = w2;
                for (std::size_t i = 0; i < r; ++i) witness.paths.push_back(paths[pick[i]]);
                witness.internal_vertices = n;
                witness.union_edges = m;
                result.ok = false;
                result.witness = std::move(witness);
                return false;
            }
            std::size_t j = 0;
            while (j < r && ++pick[j] == paths.size()) pick[j++] = 0;
            if (j == r) break;
        }
        return true;
    };

    if (even) {
        for (Side side : {Side::U, Side::V}) {
            const auto n = host.side_count(side);
            for (std::uint32_t a = 0; a < n; ++a)
                for (std::uint32_t b = a + 1; b < n; ++b) {
                    if (!host.present({side, a}) || !host.present({side, b})) continue;
                    if (!check_pair({side, a}, {side, b})) return result;
                }
        }
    } else {
        for (std::uint32_t u = 0; u < host.nu(); ++u)
            for (std::uint32_t v = 0; v < host.nv(); ++v) {
                if (!host.present({Side::U, u}) || !host.present({Side::V, v})) continue;
                if (!check_pair({Side::U, u}, {Side::V, v})) return result;
            }
    }
    return result;
}

CollectionsBound count_collections_bound_check(std::uint32_t n_side, std::uint32_t k,
                                               std::uint32_t r, const Caps& caps) {
    if (r == 0) throw ConfigError("collection size r must be positive");
    if (k == 0) throw ConfigError("path length must be positive");
    const bool even = k % 2 == 0;
    if (n_side < (even ? 2u : 1u))
        throw ConfigError("complete host too small for an endpoint pair");

    BipartiteGraph host = BipartiteGraph::complete_host(n_side, n_side);
    CollectionsBound result;
    result.w1 = {Side::U, 0};
    result.w2 = even ? VertexRef{Side::U, 1} : VertexRef{Side::V, 0};

    auto paths = enumerate_paths(host, result.w1, result.w2, k, caps);
    if (!paths.empty()) {
        U128Pow tuples = pow_u128(paths.size(), r);
        if (tuples.overflow || tuples.value > u128(caps.solution_enum))
            throw SizeOverflowError("collection enumeration exceeds cap " +
                                    std::to_string(caps.solution_enum));
        std::vector<std::size_t> pick(r, 0);
        for (;;) {
            CollectionAccumulator acc;
            for (std::size_t i = 0; i < r; ++i) acc.add_path(result.w1, paths[pick[i]], result.w2);
            const std::uint64_t m = CollectionAccumulator::distinct(acc.edges);
            ++result.p_rm[m];
            ++result.collections_checked;
            std::size_t j = 0;
            while (j < r && ++pick[j] == paths.size()) pick[j++] = 0;
            if (j == r) break;
        }
    }

    // P_{r,m} <= n^{(k-1)m/k}, compared exactly as P^k <= n^{(k-1)m}
    for (const auto& [m, count] : result.p_rm) {
        U128Pow lhs = pow_u128(count, k);
        U128Pow rhs = pow_u128(n_side, (std::uint64_t(k) - 1) * m);
        const bool holds = rhs.overflow ? true : (!lhs.overflow && lhs.value <= rhs.value);
        if (!holds) {
            result.ok = false;
            result.violating_m = m;
            break;
        }
    }
    return result;
}

} // namespace theta
