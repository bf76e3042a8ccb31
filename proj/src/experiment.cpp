#include "thetagraph/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thetagraph/errors.hpp"
#include "thetagraph/gf.hpp"
#include "thetagraph/mpoly.hpp"
#include "thetagraph/rng.hpp"

namespace theta {

ConstructionParams ExperimentConfig::trial_params(std::uint64_t trial_index) const {
    return ConstructionParams{k, q, derive_seed(master_seed, trial_index), strict_theory};
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (moment_order() < 1) throw ConfigError("moment order must be at least 1");
    trial_params(0).validate(caps);
}

namespace {

// Compact double rendering for verdict text (std::to_string pads zeros).
std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Largest path count below q/2 and smallest at or above it.
void split_histogram(const std::map<std::uint64_t, std::uint64_t>& histogram, std::uint64_t q,
                     std::optional<std::uint64_t>& max_small,
                     std::optional<std::uint64_t>& min_large) {
    for (const auto& [count, pairs] : histogram) {
        if (2 * count < q) {
            if (!max_small || count > *max_small) max_small = count;
        } else if (!min_large || count < *min_large) {
            min_large = count;
        }
    }
}

u128 histogram_moment(const std::map<std::uint64_t, std::uint64_t>& histogram, std::uint32_t r) {
    u128 sum = 0;
    constexpr u128 max = ~u128{0};
    for (const auto& [count, pairs] : histogram) {
        U128Pow p = pow_u128(count, r);
        if (p.overflow || (pairs != 0 && p.value > (max - sum) / pairs))
            throw SizeOverflowError("moment accumulation overflows 128 bits");
        sum += p.value * pairs;
    }
    return sum;
}

double u128_to_double(u128 v) noexcept {
    return double(std::uint64_t(v >> 64)) * 18446744073709551616.0 + double(std::uint64_t(v));
}

std::vector<MultiPoly> zero_polys(const ConstructionParams& params) {
    Field field(params.q);
    return std::vector<MultiPoly>(params.poly_count(),
                                  MultiPoly(field, params.t(), params.d()));
}

} // namespace

ExperimentReport run_trials(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.config = config;
    report.ell_was_auto = !config.ell.has_value();

    const std::uint32_t r = config.moment_order();
    const std::uint64_t q = config.q;
    // auto mode collects every count >= ceil(q/2): nothing can land in
    // (max_small, q/2) once the threshold resolves to the global max_small
    const std::uint64_t collect_min = config.ell ? *config.ell + 1 : (q + 1) / 2;

    struct TrialWork {
        BipartiteGraph graph;
        PathScan scan;
    };
    std::vector<TrialWork> work;
    work.reserve(config.trials);
    report.trials.resize(config.trials);

    for (std::uint64_t i = 0; i < config.trials; ++i) {
        ConstructionParams params = config.trial_params(i);
        BipartiteGraph graph =
            config.control_zero_polys
                ? construct_graph_with_polys(params, zero_polys(params), config.threads,
                                             config.caps)
                : construct_graph(params, config.threads, config.caps);
        PathScan scan =
            scan_path_counts(graph, config.k, collect_min, config.threads, config.caps);

        TrialStats& stats = report.trials[i];
        stats.seed = params.seed;
        stats.edge_count = graph.edge_count();
        stats.path_histogram = scan.histogram;
        stats.pair_count = scan.pair_count;
        stats.moment_sum = histogram_moment(scan.histogram, r);
        stats.empirical_moment =
            scan.pair_count == 0 ? 0 : u128_to_double(stats.moment_sum) / double(scan.pair_count);
        split_histogram(scan.histogram, q, stats.max_small, stats.min_large);
        work.push_back({std::move(graph), std::move(scan)});
    }

    if (config.ell) {
        report.resolved_ell = *config.ell;
    } else {
        std::uint64_t ell = 0;
        for (const TrialStats& stats : report.trials)
            if (stats.max_small) ell = std::max(ell, *stats.max_small);
        report.resolved_ell = ell;
    }

    for (std::uint64_t i = 0; i < config.trials; ++i) {
        TrialStats& stats = report.trials[i];
        std::vector<BadPair> bad;
        for (const BadPair& pair : work[i].scan.collected)
            if (pair.path_count > report.resolved_ell) bad.push_back(pair);
        stats.bad_pair_count = bad.size();

        BipartiteGraph pruned = prune(work[i].graph, bad);
        stats.pruned_edge_count = pruned.edge_count();
        stats.pruned_vertex_count =
            (work[i].graph.present_count(Side::U) - pruned.present_count(Side::U)) +
            (work[i].graph.present_count(Side::V) - pruned.present_count(Side::V));
        stats.prune_sound =
            find_bad_pairs(pruned, config.k, report.resolved_ell, config.threads, config.caps)
                .empty();
    }

    double edge_sum = 0, moment_sum = 0;
    for (const TrialStats& stats : report.trials) {
        edge_sum += double(stats.edge_count);
        moment_sum += stats.empirical_moment;
    }
    report.mean_edge_count = edge_sum / double(config.trials);
    report.mean_empirical_moment = moment_sum / double(config.trials);
    if (config.trials >= 2) {
        double ss = 0;
        for (const TrialStats& stats : report.trials) {
            const double dev = double(stats.edge_count) - report.mean_edge_count;
            ss += dev * dev;
        }
        report.stddev_edge_count = std::sqrt(ss / double(config.trials - 1));
    }

    // standard verdicts
    {
        const double expected = std::pow(double(q), double(config.k) + 1); // N^{1+1/k}
        Verdict v;
        v.name = "edge_mean";
        v.measured = report.mean_edge_count;
        v.bound = expected;
        v.pass = std::abs(report.mean_edge_count - expected) <= kEdgeMeanTolerance * expected;
        v.detail = "mean |E| within " + std::to_string(int(kEdgeMeanTolerance * 100)) +
                   "% of q^(k+1) = " + std::to_string(std::uint64_t(expected));
        report.verdicts.push_back(v);
    }
    if (config.trials >= 2) {
        const double expected = std::sqrt(std::pow(double(q), double(config.k) + 1));
        Verdict v;
        v.name = "edge_stddev";
        v.measured = report.stddev_edge_count;
        v.bound = kEdgeStddevFactor * expected;
        v.pass = report.stddev_edge_count <= kEdgeStddevFactor * expected &&
                 report.stddev_edge_count >= expected / kEdgeStddevFactor;
        v.detail = "sample sd of |E| within a factor " + fmt(kEdgeStddevFactor) +
                   " of sqrt(q^(k+1))";
        report.verdicts.push_back(v);
    }
    {
        const double kr = double(config.k) * r;
        Verdict v;
        v.name = "moment_vs_kr";
        v.measured = report.mean_empirical_moment;
        v.bound = kMomentSlack * kr;
        v.pass = report.mean_empirical_moment <= v.bound;
        v.detail = "mean over trials of mean |S|^r per pair, against kr = " +
                   std::to_string(std::uint64_t(kr)) + " with slack " + fmt(kMomentSlack);
        report.verdicts.push_back(v);
    }
    if (config.trials >= 10) report.verdicts.push_back(markov_tail_check(report, double(q) / 2));
    {
        Verdict v;
        v.name = "prune_soundness";
        v.bound = 0;
        std::uint64_t unsound = 0;
        for (const TrialStats& stats : report.trials)
            if (!stats.prune_sound) ++unsound;
        v.measured = double(unsound);
        v.pass = unsound == 0;
        v.detail = std::to_string(unsound) + "/" + std::to_string(report.trials.size()) +
                   " trials still had a pair above ell = " +
                   std::to_string(report.resolved_ell) + " after pruning";
        report.verdicts.push_back(v);
    }
    return report;
}

Verdict verify_lemma1(std::uint32_t t, std::uint32_t d, std::uint64_t q,
                      const std::vector<std::uint32_t>& point, const Caps& caps) {
    Field field(q);
    Rational measured = vanish_probability_exact(t, d, field, {point}, caps);
    const Rational expected{1, q};
    Verdict v;
    v.name = "lemma1 t=" + std::to_string(t) + " d=" + std::to_string(d) +
             " q=" + std::to_string(q);
    v.measured = measured.value();
    v.bound = expected.value();
    v.pass = measured == expected;
    v.detail = "exact vanishing probability " + measured.str() + " vs 1/q = " + expected.str();
    return v;
}

Verdict verify_lemma2(std::uint32_t t, std::uint32_t d, std::uint64_t q,
                      const std::vector<std::vector<std::uint32_t>>& points, const Caps& caps) {
    Field field(q);
    const std::uint64_t m = points.size();
    Rational measured = vanish_probability_exact(t, d, field, points, caps);

    std::uint64_t qm = 1;
    bool qm_overflow = false;
    for (std::uint64_t i = 0; i < m; ++i) {
        if (qm > std::numeric_limits<std::uint64_t>::max() / q) {
            qm_overflow = true;
            break;
        }
        qm *= q;
    }

    const bool hypotheses = q > binomial(m, 2) && d + 1 >= m;
    Verdict v;
    v.name = "lemma2 t=" + std::to_string(t) + " d=" + std::to_string(d) +
             " q=" + std::to_string(q) + " m=" + std::to_string(m);
    v.measured = measured.value();
    if (hypotheses) {
        if (qm_overflow) throw SizeOverflowError("q^m overflows 64 bits");
        const Rational expected{1, qm};
        v.bound = expected.value();
        v.pass = measured == expected;
        v.detail = "exact " + measured.str() + " vs 1/q^m = " + expected.str();
    } else {
        v.bound = qm_overflow ? 0 : Rational{1, qm}.value();
        v.pass = true; // informational: hypotheses q > C(m,2), d >= m-1 do not hold
        v.detail = "negative control (hypotheses fail): measured " + measured.str() +
                   (qm_overflow ? "" : ", independent-case value would be 1/" +
                                           std::to_string(qm));
    }
    return v;
}

Verdict markov_tail_check(const ExperimentReport& report, double s) {
    if (report.trials.size() < 10)
        throw ConfigError("markov tail check needs at least 10 trials, got " +
                          std::to_string(report.trials.size()));
    if (!(s > 0)) throw ConfigError("tail threshold s must be positive");
    const std::uint32_t k = report.config.k;
    const std::uint32_t r = report.config.moment_order();

    std::uint64_t events = 0, total = 0;
    for (const TrialStats& stats : report.trials) {
        total += stats.pair_count;
        for (const auto& [count, pairs] : stats.path_histogram)
            if (double(count) >= s) events += pairs;
    }
    const double fraction = total == 0 ? 0 : double(events) / double(total);
    const double bound = kMarkovSlack * double(k) * r / std::pow(s, double(r));

    Verdict v;
    v.name = "markov_tail s=" + fmt(s);
    v.measured = fraction;
    v.bound = bound;
    v.pass = fraction <= bound;
    v.detail = std::to_string(events) + "/" + std::to_string(total) +
               " pairs at or above s, bound " + fmt(kMarkovSlack) + "*kr/s^r";
    return v;
}

DichotomySummary dichotomy_report(const ExperimentReport& report) {
    DichotomySummary summary;
    summary.resolved_ell = report.resolved_ell;
    summary.q_half = double(report.config.q) / 2;
    for (const TrialStats& stats : report.trials) {
        if (stats.max_small && (!summary.max_small || *stats.max_small > *summary.max_small))
            summary.max_small = stats.max_small;
        if (stats.min_large && (!summary.min_large || *stats.min_large < *summary.min_large))
            summary.min_large = stats.min_large;
    }
    return summary;
}

DemoResult theorem1_demo(std::uint64_t n, std::uint32_t k, std::optional<std::uint64_t> ell,
                         std::uint64_t seed, unsigned threads, const Caps& caps) {
    DemoResult result;
    result.n = n;
    result.k = k;
    result.q = choose_prime(n, k);
    result.seed = seed;
    result.ell_was_auto = !ell.has_value();

    ConstructionParams params{k, result.q, seed, false};
    result.side_size = params.side_size();
    BipartiteGraph graph = construct_graph(params, threads, caps);

    const std::uint64_t collect_min = ell ? *ell + 1 : (result.q + 1) / 2;
    PathScan scan = scan_path_counts(graph, k, collect_min, threads, caps);
    if (ell) {
        result.ell_used = *ell;
    } else {
        std::optional<std::uint64_t> max_small, min_large;
        split_histogram(scan.histogram, result.q, max_small, min_large);
        result.ell_used = max_small.value_or(0);
    }

    std::vector<BadPair> bad;
    for (const BadPair& pair : scan.collected)
        if (pair.path_count > result.ell_used) bad.push_back(pair);
    result.bad_pair_count = bad.size();

    BipartiteGraph pruned = prune(graph, bad);
    result.removed_vertices =
        (graph.present_count(Side::U) - pruned.present_count(Side::U)) +
        (graph.present_count(Side::V) - pruned.present_count(Side::V));
    result.edge_count = pruned.edge_count();
    const std::uint64_t occupied = 2 * result.side_size - result.removed_vertices;
    if (occupied > n)
        throw ConfigError("pruned graph larger than target n"); // unreachable: 2q^k <= n
    result.padding_vertices = n - occupied;
    result.edge_ratio =
        double(result.edge_count) / std::pow(double(n), 1.0 + 1.0 / double(k));

    PathScan rescan = scan_path_counts(pruned, k, result.ell_used + 1, threads, caps);
    result.max_path_count =
        rescan.histogram.empty() ? 0 : rescan.histogram.rbegin()->first;
    result.certified = rescan.collected.empty();
    result.graph = std::move(pruned);
    return result;
}

} // namespace theta
