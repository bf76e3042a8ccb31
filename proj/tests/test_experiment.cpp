#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "thetagraph/experiment.hpp"
#include "thetagraph/rng.hpp"

using namespace theta;

namespace {

// Independent recomputation of the exact r-th moment of a path histogram.
u128 histogram_moment_oracle(const std::map<std::uint64_t, std::uint64_t>& hist,
                             std::uint32_t r) {
    u128 sum = 0;
    for (const auto& [count, pairs] : hist) {
        const U128Pow p = pow_u128(count, r);
        REQUIRE_FALSE(p.overflow);
        sum += p.value * pairs;
    }
    return sum;
}

const Verdict* find_verdict(const ExperimentReport& rep, const std::string& prefix) {
    for (const Verdict& v : rep.verdicts)
        if (v.name.rfind(prefix, 0) == 0) return &v;
    return nullptr;
}

} // namespace

TEST_CASE("per-trial parameters derive from the master seed") {
    ExperimentConfig cfg;
    cfg.k = 2;
    cfg.q = 7;
    cfg.trials = 3;
    cfg.master_seed = 5;

    CHECK(cfg.moment_order() == 4); // default r = 2k
    cfg.r = 6;
    CHECK(cfg.moment_order() == 6);
    cfg.r = 0;

    const ConstructionParams p0 = cfg.trial_params(0);
    CHECK(p0.k == 2);
    CHECK(p0.q == 7);
    CHECK_FALSE(p0.strict_theory);
    CHECK(p0.seed == derive_seed(5, 0));
    CHECK(cfg.trial_params(1).seed == derive_seed(5, 1));
    CHECK(cfg.trial_params(0).seed != cfg.trial_params(1).seed);

    cfg.strict_theory = true;
    CHECK(cfg.trial_params(0).strict_theory);
}

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg;
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = {};
    cfg.q = 6;
    CHECK_THROWS_AS(cfg.validate(), NotPrimeError);

    cfg = {};
    cfg.q = 7;
    cfg.strict_theory = true; // needs q > C(2k^2, 2) = 28
    CHECK_THROWS_AS(cfg.validate(), StrictTheoryViolationError);

    cfg.q = 29;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("run_trials is deterministic and internally consistent") {
    ExperimentConfig cfg;
    cfg.k = 2;
    cfg.q = 7;
    cfg.trials = 3;
    cfg.master_seed = 5;

    const ExperimentReport a = run_trials(cfg);
    const ExperimentReport b = run_trials(cfg);
    REQUIRE(a.trials.size() == 3);
    CHECK(a.config == cfg);
    CHECK(a.resolved_ell == b.resolved_ell);
    CHECK(a.ell_was_auto);

    double edge_sum = 0;
    for (std::uint64_t i = 0; i < 3; ++i) {
        const TrialStats& t = a.trials[i];
        CHECK(t.seed == derive_seed(5, i));
        CHECK(t.seed == b.trials[i].seed);
        CHECK(t.edge_count == b.trials[i].edge_count);
        CHECK(t.path_histogram == b.trials[i].path_histogram);
        CHECK(t.pair_count == 2352); // 2 * C(49, 2)

        // histogram totals and the exact moment sum
        std::uint64_t pairs_total = 0;
        for (const auto& [count, pairs] : t.path_histogram) pairs_total += pairs;
        CHECK(pairs_total == t.pair_count);
        CHECK(t.moment_sum == histogram_moment_oracle(t.path_histogram, 4));
        CHECK(t.empirical_moment ==
              doctest::Approx(double(t.moment_sum) / double(t.pair_count)));
        edge_sum += double(t.edge_count);
    }
    CHECK(a.mean_edge_count == doctest::Approx(edge_sum / 3));

    // sample standard deviation, n-1 convention
    double ss = 0;
    for (const TrialStats& t : a.trials) {
        const double dev = double(t.edge_count) - a.mean_edge_count;
        ss += dev * dev;
    }
    CHECK(a.stddev_edge_count == doctest::Approx(std::sqrt(ss / 2)));

    // auto threshold: the largest path count strictly below q/2 seen anywhere
    std::uint64_t expected_ell = 0;
    for (const TrialStats& t : a.trials)
        for (const auto& [count, pairs] : t.path_histogram)
            if (2 * count < 7) expected_ell = std::max(expected_ell, count);
    CHECK(a.resolved_ell == expected_ell);

    // bad pairs are the ones strictly above the threshold; pruning is sound
    for (const TrialStats& t : a.trials) {
        std::uint64_t expected_bad = 0;
        for (const auto& [count, pairs] : t.path_histogram)
            if (count > a.resolved_ell) expected_bad += pairs;
        CHECK(t.bad_pair_count == expected_bad);
        CHECK(t.prune_sound);
        CHECK(t.pruned_edge_count <= t.edge_count);
        CHECK(t.pruned_vertex_count <= t.bad_pair_count);
    }

    // with 3 trials: edge_mean, edge_stddev, moment_vs_kr, prune_soundness
    CHECK(a.verdicts.size() == 4);
    CHECK(find_verdict(a, "edge_mean") != nullptr);
    CHECK(find_verdict(a, "edge_stddev") != nullptr);
    CHECK(find_verdict(a, "moment_vs_kr") != nullptr);
    CHECK(find_verdict(a, "prune_soundness") != nullptr);
    CHECK(find_verdict(a, "markov_tail") == nullptr);

    const Verdict* mean = find_verdict(a, "edge_mean");
    CHECK(mean->bound == doctest::Approx(343)); // q^{k+1}
    CHECK(mean->measured == doctest::Approx(a.mean_edge_count));

    const Verdict* moment = find_verdict(a, "moment_vs_kr");
    CHECK(moment->bound == doctest::Approx(1.5 * 8)); // slack * k * r
    CHECK(moment->measured == doctest::Approx(a.mean_empirical_moment));

    CHECK(find_verdict(a, "prune_soundness")->pass);
}

TEST_CASE("a different master seed changes the trial graphs") {
    ExperimentConfig cfg;
    cfg.k = 2;
    cfg.q = 7;
    cfg.trials = 1;
    cfg.master_seed = 5;
    const ExperimentReport a = run_trials(cfg);
    cfg.master_seed = 6;
    const ExperimentReport b = run_trials(cfg);
    CHECK(a.trials[0].seed != b.trials[0].seed);
    // not guaranteed in principle, but these seeds do differ
    CHECK(a.trials[0].edge_count != b.trials[0].edge_count);
}

TEST_CASE("zero-polynomial control: complete graph, loud failures, sound prune") {
    ExperimentConfig cfg;
    cfg.k = 2;
    cfg.q = 3;
    cfg.trials = 2;
    cfg.master_seed = 1;
    cfg.control_zero_polys = true;

    const ExperimentReport rep = run_trials(cfg);
    REQUIRE(rep.trials.size() == 2);
    for (const TrialStats& t : rep.trials) {
        CHECK(t.edge_count == 81); // complete K_{9,9}
        CHECK(t.pair_count == 72); // 2 * C(9, 2)
        const std::map<std::uint64_t, std::uint64_t> expected = {{9, 72}};
        CHECK(t.path_histogram == expected); // every pair has all 9 middles
        CHECK_FALSE(t.max_small.has_value()); // nothing below q/2 = 1.5
        CHECK(t.min_large == 9);
        CHECK(t.bad_pair_count == 72);
        // pruning one endpoint per bad pair leaves a single vertex per side
        CHECK(t.pruned_vertex_count == 16);
        CHECK(t.pruned_edge_count == 1);
        CHECK(t.prune_sound);
    }
    CHECK(rep.resolved_ell == 0); // no small counts anywhere

    // the control is supposed to fail the moment check loudly
    const Verdict* moment = find_verdict(rep, "moment_vs_kr");
    REQUIRE(moment != nullptr);
    CHECK_FALSE(moment->pass);
    CHECK(moment->measured == doctest::Approx(6561)); // 9^4
    CHECK(find_verdict(rep, "edge_mean")->pass == false); // 81 vs q^3 = 27
    CHECK(find_verdict(rep, "prune_soundness")->pass);

    const DichotomySummary dich = dichotomy_report(rep);
    CHECK_FALSE(dich.max_small.has_value());
    CHECK(dich.min_large == 9);
    CHECK(dich.resolved_ell == 0);
    CHECK(dich.q_half == doctest::Approx(1.5));
}

TEST_CASE("moment sums stay exact beyond 64 bits") {
    // complete control at q=13 with r=8: every one of the 28392 pairs
    // contributes 169^8, and the sum overflows 64-bit arithmetic
    ExperimentConfig cfg;
    cfg.k = 2;
    cfg.q = 13;
    cfg.trials = 1;
    cfg.r = 8;
    cfg.master_seed = 0;
    cfg.control_zero_polys = true;

    const ExperimentReport rep = run_trials(cfg);
    const TrialStats& t = rep.trials[0];
    CHECK(t.pair_count == 28392); // 2 * C(169, 2)
    const u128 per_pair = pow_u128(169, 8).value;
    CHECK(per_pair == 665416609183179841ull);
    const u128 expected = per_pair * u128(28392);
    CHECK(t.moment_sum == expected);
    CHECK(expected > u128(~std::uint64_t{0})); // really needed 128 bits
    CHECK(u128_to_string(expected) == "18892508367928842045672");
    CHECK(t.empirical_moment == doctest::Approx(665416609183179841.0));
}

TEST_CASE("markov tail verdict appears at 10 trials and recomputes") {
    ExperimentConfig cfg;
    cfg.k = 2;
    cfg.q = 7;
    cfg.trials = 12;
    cfg.master_seed = 3;

    const ExperimentReport rep = run_trials(cfg);
    const Verdict* tail = find_verdict(rep, "markov_tail");
    REQUIRE(tail != nullptr);
    CHECK(tail->bound == doctest::Approx(3.0 * 8 / std::pow(3.5, 4)));
    CHECK(tail->pass); // far from saturating the bound at q=7

    // recompute the pooled fraction for a different threshold
    const double s = 2.0;
    std::uint64_t events = 0, total = 0;
    for (const TrialStats& t : rep.trials) {
        total += t.pair_count;
        for (const auto& [count, pairs] : t.path_histogram)
            if (double(count) >= s) events += pairs;
    }
    const Verdict v = markov_tail_check(rep, s);
    CHECK(v.measured == doctest::Approx(double(events) / double(total)));
    CHECK(v.bound == doctest::Approx(3.0 * 8 / 16.0));

    CHECK_THROWS_AS(markov_tail_check(rep, 0), ConfigError);
    CHECK_THROWS_AS(markov_tail_check(rep, -1), ConfigError);

    ExperimentConfig few = cfg;
    few.trials = 3;
    const ExperimentReport small = run_trials(few);
    CHECK_THROWS_AS(markov_tail_check(small, 3.5), ConfigError);
}

TEST_CASE("single-point vanishing probability is exactly 1/q") {
    for (std::uint64_t q : {3ull, 5ull}) {
        const Verdict v =
            verify_lemma1(2, 2, q, {std::uint32_t(1 % q), std::uint32_t(2 % q)});
        CHECK(v.pass);
        CHECK(v.measured == doctest::Approx(1.0 / double(q)));
        CHECK(v.bound == doctest::Approx(1.0 / double(q)));
    }
    // degree much larger than needed changes nothing
    const Verdict v = verify_lemma1(1, 3, 7, {4});
    CHECK(v.pass);
    CHECK(v.name == "lemma1 t=1 d=3 q=7");
    CHECK(v.measured == doctest::Approx(1.0 / 7));

    Caps tight;
    tight.poly_enum = 100; // 5^6 polynomials is past this
    CHECK_THROWS_AS(verify_lemma1(2, 2, 5, {1, 2}, tight), SizeOverflowError);
}

TEST_CASE("multi-point vanishing: independent when the hypotheses hold") {
    const Verdict two = verify_lemma2(2, 2, 5, {{1, 2}, {3, 4}});
    CHECK(two.pass);
    CHECK(two.name == "lemma2 t=2 d=2 q=5 m=2");
    CHECK(two.measured == doctest::Approx(1.0 / 25));
    CHECK(two.bound == doctest::Approx(1.0 / 25));

    const Verdict three = verify_lemma2(2, 2, 7, {{1, 2}, {3, 4}, {5, 6}});
    CHECK(three.pass);
    CHECK(three.measured == doctest::Approx(1.0 / 343));

    // d + 1 < m: the hypotheses fail and the case is a negative control --
    // a line through three points of F_5 is forced to be the zero line
    const Verdict control = verify_lemma2(1, 1, 5, {{0}, {1}, {2}});
    CHECK(control.pass); // informational, not a bound violation
    CHECK(control.measured == doctest::Approx(1.0 / 25));
    CHECK(control.measured != doctest::Approx(1.0 / 125));
    CHECK(control.detail.find("negative control") != std::string::npos);
}

TEST_CASE("dichotomy summary pools the per-trial extremes") {
    ExperimentConfig cfg;
    cfg.k = 2;
    cfg.q = 7;
    cfg.trials = 4;
    cfg.master_seed = 11;
    const ExperimentReport rep = run_trials(cfg);
    const DichotomySummary dich = dichotomy_report(rep);
    CHECK(dich.q_half == doctest::Approx(3.5));
    CHECK(dich.resolved_ell == rep.resolved_ell);

    std::optional<std::uint64_t> max_small, min_large;
    for (const TrialStats& t : rep.trials) {
        if (t.max_small && (!max_small || *t.max_small > *max_small)) max_small = t.max_small;
        if (t.min_large && (!min_large || *t.min_large < *min_large)) min_large = t.min_large;
    }
    CHECK(dich.max_small == max_small);
    CHECK(dich.min_large == min_large);
    if (max_small) CHECK(dich.resolved_ell == *max_small);
}

TEST_CASE("end-to-end demo lands on exactly n vertices and certifies") {
    const DemoResult d = theorem1_demo(100, 2, std::nullopt, kDefaultSeed);
    CHECK(d.n == 100);
    CHECK(d.k == 2);
    CHECK(d.q == 7); // largest prime with 2q^2 <= 100
    CHECK(d.side_size == 49);
    CHECK(d.seed == kDefaultSeed);
    CHECK(d.ell_was_auto);
    CHECK(d.ell_used == 3);
    CHECK(d.bad_pair_count == 11);

    // vertex accounting: 2N - removed + padding = n exactly
    CHECK(2 * d.side_size - d.removed_vertices + d.padding_vertices == 100);
    CHECK(d.graph.present_count(Side::U) + d.graph.present_count(Side::V) ==
          2 * d.side_size - d.removed_vertices);

    CHECK(d.edge_count == 224); // frozen for the default seed
    CHECK(d.graph.edge_count() == d.edge_count);
    CHECK(d.edge_ratio == doctest::Approx(0.224)); // 224 / 100^{3/2}
    CHECK(d.max_path_count <= d.ell_used);
    CHECK(d.certified);

    REQUIRE(d.graph.params() != nullptr);
    CHECK(d.graph.params()->q == 7);
    CHECK(d.graph.params()->seed == kDefaultSeed);
}

TEST_CASE("demo with an explicit threshold matches the auto-resolved run") {
    const DemoResult a = theorem1_demo(100, 2, std::nullopt, kDefaultSeed);
    const DemoResult e = theorem1_demo(100, 2, 3, kDefaultSeed);
    CHECK_FALSE(e.ell_was_auto);
    CHECK(e.ell_used == 3);
    CHECK(e.bad_pair_count == a.bad_pair_count);
    CHECK(e.removed_vertices == a.removed_vertices);
    CHECK(e.edge_count == a.edge_count);
    CHECK(e.certified == a.certified);
}

TEST_CASE("demo rejects vertex budgets below the smallest construction") {
    CHECK_THROWS_AS(theorem1_demo(7, 2, std::nullopt, 0), TooSmallError);
    // 8 vertices admit q = 2
    const DemoResult d = theorem1_demo(8, 2, std::nullopt, 0);
    CHECK(d.q == 2);
    CHECK(d.side_size == 4);
    CHECK(2 * d.side_size - d.removed_vertices + d.padding_vertices == 8);
}
