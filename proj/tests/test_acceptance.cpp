// Acceptance gate for the construction pipeline: eight end-to-end checks,
// one PASS/FAIL line each, exit 0 iff all pass. Tolerances are pinned here
// as named constants; the statistical checks use fixed seeds so the gate
// is deterministic.
//
// Criteria 4 and 5 currently FAIL and are expected to: the raw collection
// bound P_{r,m} <= n^{(k-1)m/k} is false at (k, r) = (2, 3), m = 4 (the
// count includes collections that reuse a path, contributing a constant
// multiplicity the bound has no room for), and the empirical fourth moment
// of per-pair path counts sits near the Poisson limit 15 (Bell's B_4), not
// under 12. Both failures are measured and reported, not patched over.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "thetagraph/construct.hpp"
#include "thetagraph/experiment.hpp"
#include "thetagraph/paths.hpp"
#include "thetagraph/rng.hpp"

using namespace theta;

namespace {

// pinned acceptance tolerances
constexpr double kDensityTolerance = 0.05; // relative error of mean |E| vs q^{k+1}
constexpr double kMomentThreshold = 12.0;  // ceiling for the mean fourth moment
constexpr double kDemoRatioFloor = 0.2;    // edge_count / n^{3/2} at n = 100
constexpr std::uint64_t kDensityTrials = 30;
constexpr std::uint64_t kMomentTrials = 10;
constexpr std::uint64_t kGateSeed = 0; // master seed of the statistical checks

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// 1. A uniform degree-<= d polynomial vanishes at any fixed point with
//    probability exactly 1/q, for every (t, d, q) small enough to
//    enumerate and three canonical points each.
bool check_point_vanishing(std::string& detail) {
    struct Config {
        std::uint32_t t, d;
        std::uint64_t q;
    };
    const std::vector<Config> configs = {{2, 2, 3}, {2, 2, 5}, {3, 1, 3}, {1, 3, 7}};
    int exact = 0, total = 0;
    for (const Config& c : configs) {
        for (std::uint64_t rank = 0; rank < 3; ++rank) {
            const std::vector<std::uint32_t> point = rank_to_coords(rank, c.t, c.q);
            const Verdict v = verify_lemma1(c.t, c.d, c.q, point);
            ++total;
            if (v.pass) ++exact;
        }
    }
    detail = std::to_string(exact) + "/" + std::to_string(total) + " enumerations exactly 1/q";
    return exact == total;
}

// 2. Vanishing at m distinct points has probability exactly 1/q^m when
//    q > C(m,2) and d >= m-1; a dependent control (degree too low for the
//    point count) must measurably deviate from 1/q^m.
bool check_multipoint_independence(std::string& detail) {
    const Verdict two = verify_lemma2(2, 2, 5, {{1, 2}, {3, 4}});
    const Verdict three = verify_lemma2(2, 2, 5, {{0, 1}, {2, 3}, {4, 0}});
    const Verdict control = verify_lemma2(1, 1, 5, {{0}, {1}, {2}});
    const bool control_deviates = std::abs(control.measured - 1.0 / 125) > 1e-12;
    detail = "m=2: " + fmt(two.measured) + ", m=3: " + fmt(three.measured) +
             ", dependent control: " + fmt(control.measured) + " != 1/125";
    return two.pass && three.pass && control_deviates;
}

// 3. Mean edge count over 30 seeded trials within 5% of q^{k+1} at k = 2
//    for three primes.
bool check_edge_density(std::string& detail) {
    bool ok = true;
    std::ostringstream os;
    for (std::uint64_t q : {11ull, 13ull, 17ull}) {
        ExperimentConfig cfg;
        cfg.k = 2;
        cfg.q = q;
        cfg.trials = kDensityTrials;
        cfg.master_seed = kGateSeed;
        const ExperimentReport rep = run_trials(cfg);
        const double expected = double(q * q * q);
        const double rel = std::abs(rep.mean_edge_count - expected) / expected;
        if (rel > kDensityTolerance) ok = false;
        os << "q=" << q << ": " << fmt(rep.mean_edge_count) << " vs " << fmt(expected) << " ("
           << fmt(rel * 100) << "%)  ";
    }
    detail = os.str();
    return ok;
}

// 4. Path-union counting: the union inequality k*n <= (k-1)*m must hold for
//    every collection (it does), and the collection count P_{r,m} must stay
//    below n^{(k-1)m/k} for every m (it does not at (k, r) = (2, 3)).
bool check_collection_bounds(std::string& detail) {
    bool ok = true;
    std::ostringstream os;
    for (std::uint32_t n : {3u, 4u}) {
        const BipartiteGraph host = BipartiteGraph::complete_host(n, n);
        for (auto [r, k] : {std::pair{2u, 2u}, {3u, 2u}, {2u, 3u}}) {
            if (!check_union_inequality(host, r, k).ok) {
                ok = false;
                os << "union inequality fails on K_{" << n << "," << n << "} r=" << r
                   << " k=" << k << "  ";
            }
        }
        for (auto [k, r] : {std::pair{2u, 2u}, {2u, 3u}, {3u, 2u}}) {
            const CollectionsBound b = count_collections_bound_check(n, k, r);
            if (!b.ok) {
                ok = false;
                const std::uint64_t m = *b.violating_m;
                os << "P_{" << r << "," << m << "} = " << b.p_rm.at(m) << " > n^((k-1)m/k) = "
                   << fmt(std::pow(double(n), double((k - 1) * m) / k)) << " on K_{" << n << ","
                   << n << "} k=" << k << "  ";
            }
        }
    }
    detail = ok ? "all collection counts within bounds" : os.str();
    return ok;
}

// 5. The mean fourth moment of per-pair path counts at q = 29 (strict
//    parameter regime) must stay below 12, and the all-zero-polynomial
//    control must violate the same threshold loudly.
bool check_fourth_moment(std::string& detail) {
    ExperimentConfig cfg;
    cfg.k = 2;
    cfg.q = 29;
    cfg.trials = kMomentTrials;
    cfg.master_seed = kGateSeed;
    cfg.strict_theory = true;
    const ExperimentReport rep = run_trials(cfg);
    const bool moment_ok = rep.mean_empirical_moment <= kMomentThreshold;

    ExperimentConfig control = cfg;
    control.trials = 1;
    control.strict_theory = false;
    control.control_zero_polys = true;
    const ExperimentReport crep = run_trials(control);
    const bool control_fails = crep.mean_empirical_moment > kMomentThreshold;

    detail = "measured " + fmt(rep.mean_empirical_moment) + " vs " + fmt(kMomentThreshold) +
             "; control " + fmt(crep.mean_empirical_moment) + " exceeds as required";
    return moment_ok && control_fails;
}

// 6. Conservation laws on constructed graphs: walk count equals solution
//    count, and path count plus degenerate count equals solution count,
//    for every parity-valid pair at k in {2, 3}, q in {3, 5, 7}.
bool check_conservation(std::string& detail) {
    std::uint64_t pairs = 0, violations = 0;
    int graphs = 0;
    for (std::uint32_t k : {2u, 3u}) {
        for (std::uint64_t q : {3ull, 5ull, 7ull}) {
            const BipartiteGraph g = construct_graph({k, q, derive_seed(kGateSeed, graphs), false});
            ++graphs;
            const WalkTable table(g, k);
            auto visit = [&](VertexRef w1, VertexRef w2) {
                const PairPathReport rep = analyze_pair(g, &table, w1, w2, k);
                ++pairs;
                if (rep.walk_count != rep.solution_count ||
                    rep.path_count + rep.degenerate_total() != rep.solution_count)
                    ++violations;
            };
            const std::uint64_t n = g.nu();
            if (k % 2 == 0) {
                for (std::uint64_t a = 0; a < n; ++a)
                    for (std::uint64_t b = a + 1; b < n; ++b) {
                        visit({Side::U, a}, {Side::U, b});
                        visit({Side::V, a}, {Side::V, b});
                    }
            } else {
                for (std::uint64_t a = 0; a < n; ++a)
                    for (std::uint64_t b = 0; b < n; ++b) visit({Side::U, a}, {Side::V, b});
            }
        }
    }
    detail = std::to_string(violations) + " violations across " + std::to_string(graphs) +
             " graphs / " + std::to_string(pairs) + " pairs";
    return violations == 0;
}

// 7. The end-to-end demo at n = 100 lands on exactly 100 vertices,
//    certifies bad-pair-freeness, and keeps the edge ratio above the floor.
bool check_demo(std::string& detail) {
    const DemoResult d = theorem1_demo(100, 2, std::nullopt, kDefaultSeed);
    const bool exact_n = 2 * d.side_size - d.removed_vertices + d.padding_vertices == d.n;
    detail = "q=" + std::to_string(d.q) + ", ell=" + std::to_string(d.ell_used) + ", " +
             std::to_string(d.edge_count) + " edges, ratio " + fmt(d.edge_ratio) + " vs floor " +
             fmt(kDemoRatioFloor);
    return d.n == 100 && exact_n && d.certified && d.edge_ratio >= kDemoRatioFloor;
}

// 8. Theta certification: the exhaustive search finds the theta in K_{2,3},
//    clears K_{2,2}, and certifies pruned constructions at their scanned
//    maximum plus one (for k = 2, a pair with c paths is exactly a c-theta,
//    so the boundary must be tight).
bool check_theta_certification(std::string& detail) {
    bool ok = true;
    std::ostringstream os;
    if (theta_free_certify(BipartiteGraph::complete_host(2, 3), 2, 3)) {
        ok = false;
        os << "missed the 3-theta in K_{2,3}  ";
    }
    if (!theta_free_certify(BipartiteGraph::complete_host(2, 2), 2, 3)) {
        ok = false;
        os << "hallucinated a 3-theta in K_{2,2}  ";
    }
    for (std::uint64_t seed : {7ull, 1ull, 2ull}) {
        const BipartiteGraph g = construct_graph({2, 7, seed, false});
        const PathScan scan = scan_path_counts(g, 2, 0);
        std::uint64_t ell = 0;
        for (const auto& [count, n] : scan.histogram)
            if (2 * count < 7 && count > ell) ell = count;
        const BipartiteGraph pruned = prune(g, find_bad_pairs(g, 2, ell));
        std::uint64_t max_after = 0;
        for (const auto& [count, n] : scan_path_counts(pruned, 2, 0).histogram)
            if (n > 0 && count > max_after) max_after = count;
        const bool free_above = theta_free_certify(pruned, 2, max_after + 1);
        const bool tight_at = max_after == 0 || !theta_free_certify(pruned, 2, max_after);
        if (!(free_above && tight_at)) {
            ok = false;
            os << "seed " << seed << ": certification disagrees with max count " << max_after
               << "  ";
        }
    }
    detail = ok ? "boundary tight on K_{2,3}, K_{2,2} and three pruned graphs" : os.str();
    return ok;
}

} // namespace

int main() {
    struct Criterion {
        const char* label;
        bool (*run)(std::string&);
    };
    const std::vector<Criterion> criteria = {
        {"single-point vanishing probability is exactly 1/q", check_point_vanishing},
        {"multi-point vanishing factors as 1/q^m", check_multipoint_independence},
        {"mean edge count tracks q^{k+1} within 5%", check_edge_density},
        {"ordered path collections bounded by n^{(k-1)m/k}", check_collection_bounds},
        {"mean fourth moment of path counts below 12", check_fourth_moment},
        {"walk/solution and path/degenerate conservation", check_conservation},
        {"100-vertex demo certifies with edge ratio >= 0.2", check_demo},
        {"theta-freeness certification boundary is tight", check_theta_certification},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failed;
        std::printf("%s  criterion %zu: %s  [%s]\n", ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].label, detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failed),
                criteria.size());
    return failed == 0 ? 0 : 1;
}
