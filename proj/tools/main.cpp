// Command-line front end: construct / analyze / prune / verify / demo /
// experiment. All outputs are deterministic functions of argv and input
// files; exit codes are 0 (all checks pass), 1 (a verification failed),
// 2 (usage or configuration error).

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thetagraph/construct.hpp"
#include "thetagraph/experiment.hpp"
#include "thetagraph/io.hpp"
#include "thetagraph/paths.hpp"

namespace {

using namespace theta;

std::uint64_t parse_seed(const std::string& text) {
    if (text == "default") return kDefaultSeed;
    if (text == "random") {
        std::random_device rd;
        return (std::uint64_t(rd()) << 32) | rd();
    }
    try {
        std::size_t used = 0;
        const std::uint64_t value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError("--seed expects an integer, 'random' or 'default', got '" + text +
                          "'");
    }
}

std::optional<std::uint64_t> parse_ell(const std::string& text) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const std::uint64_t value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError("--ell expects a nonnegative integer or 'auto', got '" + text + "'");
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

/// Writes to the file when a path is given, else to stdout.
void emit(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
    } else {
        auto out = open_output(path);
        out << payload;
    }
}

BipartiteGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open edge list '" + path + "'");
    return io::edge_list_to_graph(io::read_edge_list(in));
}

/// Shared input plumbing: a subcommand takes either an edge-list file
/// (-i) or inline construction parameters (-q plus optionals).
struct GraphInput {
    std::string in_path;
    std::uint32_t k = 2;
    std::uint64_t q = 0;
    std::string seed = "default";
    bool strict = false;

    void attach(CLI::App& cmd) {
        cmd.add_option("-i,--input", in_path, "edge-list file to load instead of constructing");
        cmd.add_option("-k", k, "path length k (>= 2)")->capture_default_str();
        cmd.add_option("-q", q, "prime field order");
        cmd.add_option("--seed", seed,
                       "construction seed: integer, 'random' or 'default' (" +
                           std::to_string(kDefaultSeed) + ")")
            ->capture_default_str();
        cmd.add_flag("--strict", strict, "require the exact-independence regime q > C(kr,2)");
    }

    BipartiteGraph resolve(unsigned threads, const Caps& caps) const {
        if (!in_path.empty()) {
            if (q != 0)
                throw ConfigError("give either --input or -q, not both");
            return load_graph(in_path);
        }
        if (q == 0) throw ConfigError("need --input FILE or -q PRIME");
        ConstructionParams params{k, q, parse_seed(seed), strict};
        return construct_graph(params, threads, caps);
    }
};

int cmd_construct(const GraphInput& input, const std::string& out_path,
                  const std::string& meta_path, unsigned threads) {
    BipartiteGraph g = input.resolve(threads, {});
    std::ostringstream edges;
    io::write_edge_list(edges, g);
    emit(out_path, edges.str());
    if (!meta_path.empty()) emit(meta_path, io::construction_metadata_json(g));
    return 0;
}

int cmd_analyze(const GraphInput& input, const std::string& out_path,
                const std::string& hist_path, unsigned threads) {
    BipartiteGraph g = input.resolve(threads, {});
    const ConstructionParams* params = g.params();
    if (!params) throw ConfigError("analyze needs construction provenance for k");
    const std::uint32_t k = params->k;
    const Caps caps{};

    WalkTable walk_table(g, k, threads, caps);
    std::vector<PairPathReport> rows;
    std::map<std::uint64_t, std::uint64_t> histogram;
    std::uint64_t violations = 0;

    auto visit = [&](VertexRef w1, VertexRef w2) {
        if (!g.present(w1) || !g.present(w2)) return;
        PairPathReport row = analyze_pair(g, &walk_table, w1, w2, k, caps);
        const bool conserved = row.walk_count == row.solution_count &&
                               row.path_count + row.degenerate_total() == row.solution_count;
        if (!conserved) {
            ++violations;
            std::cerr << "conservation violated at (" << side_char(w1.side) << w1.rank << ", "
                      << side_char(w2.side) << w2.rank << "): paths=" << row.path_count
                      << " degenerate=" << row.degenerate_total()
                      << " solutions=" << row.solution_count << " walks=" << row.walk_count
                      << "\n";
        }
        ++histogram[row.path_count];
        rows.push_back(std::move(row));
    };

    if (k % 2 == 0) {
        for (std::uint32_t a = 0; a < g.nu(); ++a)
            for (std::uint32_t b = a + 1; b < g.nu(); ++b)
                visit({Side::U, a}, {Side::U, b});
        for (std::uint32_t a = 0; a < g.nv(); ++a)
            for (std::uint32_t b = a + 1; b < g.nv(); ++b)
                visit({Side::V, a}, {Side::V, b});
    } else {
        for (std::uint32_t a = 0; a < g.nu(); ++a)
            for (std::uint32_t b = 0; b < g.nv(); ++b) visit({Side::U, a}, {Side::V, b});
    }

    std::ostringstream csv;
    io::write_pair_reports_csv(csv, rows);
    emit(out_path, csv.str());
    if (!hist_path.empty()) emit(hist_path, io::histogram_json(histogram));
    if (violations != 0) {
        std::cerr << violations << " pair(s) violate the conservation laws\n";
        return 1;
    }
    return 0;
}

/// Largest path count strictly below q/2 in the scan histogram, i.e. the
/// empirical small side of the dichotomy; 0 when every count is large.
std::uint64_t auto_ell_from_histogram(const std::map<std::uint64_t, std::uint64_t>& histogram,
                                      std::uint64_t q) {
    std::uint64_t ell = 0;
    for (const auto& [count, pairs] : histogram)
        if (2 * count < q) ell = std::max(ell, count);
    return ell;
}

int cmd_prune(const GraphInput& input, const std::string& ell_text, const std::string& out_path,
              const std::string& summary_path, unsigned threads) {
    BipartiteGraph g = input.resolve(threads, {});
    const ConstructionParams* params = g.params();
    if (!params) throw ConfigError("prune needs construction provenance for k");
    const std::uint32_t k = params->k;
    const Caps caps{};

    const std::optional<std::uint64_t> ell_opt = parse_ell(ell_text);
    const std::uint64_t collect_min = ell_opt ? *ell_opt + 1 : (params->q + 1) / 2;
    PathScan scan = scan_path_counts(g, k, collect_min, threads, caps);
    const std::uint64_t ell =
        ell_opt ? *ell_opt : auto_ell_from_histogram(scan.histogram, params->q);

    std::vector<BadPair> bad;
    for (const BadPair& pair : scan.collected)
        if (pair.path_count > ell) bad.push_back(pair);
    BipartiteGraph pruned = prune(g, bad);

    std::ostringstream edges;
    io::write_edge_list(edges, pruned);
    emit(out_path, edges.str());

    nlohmann::json summary;
    summary["schema_version"] = io::kSchemaVersion;
    summary["kind"] = "prune_summary";
    summary["ell"] = ell;
    summary["ell_was_auto"] = !ell_opt.has_value();
    summary["bad_pair_count"] = bad.size();
    summary["edges_before"] = g.edge_count();
    summary["edges_after"] = pruned.edge_count();
    summary["removed_vertices"] =
        (g.present_count(Side::U) - pruned.present_count(Side::U)) +
        (g.present_count(Side::V) - pruned.present_count(Side::V));
    emit(summary_path, summary.dump(2) + "\n");
    return 0;
}

void print_verdict(const Verdict& v) {
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << v.name << ": " << v.detail
              << " [measured " << v.measured << ", bound " << v.bound << "]\n";
}

/// Canonical point list for the lemma checks: the coordinate vectors of
/// ranks 0, 1, ..., m-1 in F_q^t (distinct by construction).
std::vector<std::vector<std::uint32_t>> canonical_points(std::uint64_t m, std::uint32_t t,
                                                         std::uint64_t q) {
    std::uint64_t space = 1;
    for (std::uint32_t i = 0; i < t; ++i) {
        if (space > std::numeric_limits<std::uint64_t>::max() / q)
            break; // q^t saturates; any m fits
        space *= q;
        if (space >= m) break;
    }
    if (space < m)
        throw ConfigError("m = " + std::to_string(m) + " exceeds q^t = " +
                          std::to_string(space) + " available points");
    std::vector<std::vector<std::uint32_t>> points;
    points.reserve(std::size_t(m));
    for (std::uint64_t i = 0; i < m; ++i) points.push_back(rank_to_coords(i, t, q));
    return points;
}

int cmd_verify_lemma1(std::uint32_t t, std::uint32_t d, std::uint64_t q, std::uint64_t npoints) {
    bool all_pass = true;
    for (const auto& point : canonical_points(npoints, t, q)) {
        Verdict v = verify_lemma1(t, d, q, point);
        print_verdict(v);
        all_pass = all_pass && v.pass;
    }
    return all_pass ? 0 : 1;
}

int cmd_verify_lemma2(std::uint32_t t, std::uint32_t d, std::uint64_t q, std::uint64_t m) {
    Verdict v = verify_lemma2(t, d, q, canonical_points(m, t, q));
    print_verdict(v);
    return v.pass ? 0 : 1;
}

int cmd_verify_union(std::uint32_t host, std::uint32_t k, std::uint32_t r) {
    UnionCheck check = check_union_inequality(BipartiteGraph::complete_host(host, host), r, k);
    if (check.ok) {
        std::cout << "PASS union inequality k*n <= (k-1)*m on K_{" << host << "," << host
                  << "} k=" << k << " r=" << r << ": " << check.collections_checked
                  << " collections, no violation\n";
        return 0;
    }
    const UnionWitness& w = *check.witness;
    std::cout << "FAIL union inequality: pair (" << side_char(w.w1.side) << w.w1.rank << ", "
              << side_char(w.w2.side) << w.w2.rank << ") has a collection with n="
              << w.internal_vertices << " internal vertices, m=" << w.union_edges
              << " union edges, k*n=" << k * w.internal_vertices << " > (k-1)*m="
              << (k - 1) * w.union_edges << "\n";
    return 1;
}

int cmd_verify_pmbound(std::uint32_t host, std::uint32_t k, std::uint32_t r) {
    CollectionsBound check = count_collections_bound_check(host, k, r);
    std::cout << "P_{r,m} on K_{" << host << "," << host << "} k=" << k << " r=" << r
              << ", fixed pair (" << side_char(check.w1.side) << check.w1.rank << ", "
              << side_char(check.w2.side) << check.w2.rank << "):\n";
    for (const auto& [m, count] : check.p_rm) {
        const double bound = std::pow(double(host), double((k - 1) * m) / double(k));
        std::cout << "  m=" << m << "  P=" << count << "  n^((k-1)m/k)=" << bound
                  << (double(count) <= bound ? "" : "  <-- exceeds") << "\n";
    }
    if (check.ok) {
        std::cout << "PASS collections bound: " << check.collections_checked
                  << " collections, every P_{r,m} within n^((k-1)m/k)\n";
        return 0;
    }
    std::cout << "FAIL collections bound at m=" << *check.violating_m << "\n";
    return 1;
}

int cmd_verify_markov(ExperimentConfig config, double s) {
    ExperimentReport report = run_trials(config);
    if (s <= 0) s = double(config.q) / 2.0;
    Verdict v = markov_tail_check(report, s);
    print_verdict(v);
    return v.pass ? 0 : 1;
}

int cmd_demo(std::uint64_t n, std::uint32_t k, const std::string& ell_text,
             const std::string& seed_text, const std::string& out_path,
             const std::string& edges_path, unsigned threads) {
    DemoResult result =
        theorem1_demo(n, k, parse_ell(ell_text), parse_seed(seed_text), threads, {});
    emit(out_path, io::demo_summary_json(result));
    if (!edges_path.empty()) {
        auto out = open_output(edges_path);
        io::write_edge_list(out, result.graph);
    }
    return result.certified ? 0 : 1;
}

int cmd_experiment(ExperimentConfig config, const std::string& ell_text,
                   const std::string& seed_text, const std::string& out_path,
                   const std::string& hist_dir) {
    config.ell = parse_ell(ell_text);
    config.master_seed = parse_seed(seed_text);
    ExperimentReport report = run_trials(config);
    emit(out_path, io::report_json(report));
    if (!hist_dir.empty()) {
        for (std::size_t i = 0; i < report.trials.size(); ++i) {
            auto out = open_output(hist_dir + "/trial_" + std::to_string(i) + ".csv");
            out << "path_count,pairs\n";
            for (const auto& [count, pairs] : report.trials[i].path_histogram)
                out << count << ',' << pairs << "\n";
        }
    }
    bool all_pass = true;
    for (const Verdict& v : report.verdicts) {
        print_verdict(v);
        all_pass = all_pass && v.pass;
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random algebraic bipartite graphs: construction, path statistics, pruning"};
    app.require_subcommand(1);
    app.fallthrough();

    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all hardware threads)")
        ->capture_default_str();

    std::function<int()> action;

    // construct
    auto* construct = app.add_subcommand("construct", "sample the graph, emit its edge list");
    auto construct_in = std::make_shared<GraphInput>();
    construct_in->attach(*construct);
    auto construct_out = std::make_shared<std::string>();
    auto construct_meta = std::make_shared<std::string>();
    construct->add_option("-o,--output", *construct_out, "edge-list file (default stdout)");
    construct->add_option("--meta", *construct_meta, "also write a JSON metadata blob here");
    construct->callback([&, construct_in, construct_out, construct_meta] {
        action = [=, &threads] {
            return cmd_construct(*construct_in, *construct_out, *construct_meta, threads);
        };
    });

    // analyze
    auto* analyze = app.add_subcommand(
        "analyze", "exhaustive per-pair path/walk/solution reports with conservation checks");
    auto analyze_in = std::make_shared<GraphInput>();
    analyze_in->attach(*analyze);
    auto analyze_out = std::make_shared<std::string>();
    auto analyze_hist = std::make_shared<std::string>();
    analyze->add_option("-o,--output", *analyze_out, "per-pair CSV (default stdout)");
    analyze->add_option("--histogram", *analyze_hist, "path-count histogram JSON file");
    analyze->callback([&, analyze_in, analyze_out, analyze_hist] {
        action = [=, &threads] {
            return cmd_analyze(*analyze_in, *analyze_out, *analyze_hist, threads);
        };
    });

    // prune
    auto* prune_cmd = app.add_subcommand("prune", "remove one vertex of every bad pair");
    auto prune_in = std::make_shared<GraphInput>();
    prune_in->attach(*prune_cmd);
    auto prune_ell = std::make_shared<std::string>("auto");
    auto prune_out = std::make_shared<std::string>();
    auto prune_summary = std::make_shared<std::string>();
    prune_cmd->add_option("--ell", *prune_ell, "bad-pair threshold, integer or 'auto'")
        ->capture_default_str();
    prune_cmd->add_option("-o,--output", *prune_out, "pruned edge-list file (default stdout)");
    prune_cmd->add_option("--summary", *prune_summary, "JSON summary file");
    prune_cmd->callback([&, prune_in, prune_ell, prune_out, prune_summary] {
        action = [=, &threads] {
            return cmd_prune(*prune_in, *prune_ell, *prune_out, *prune_summary, threads);
        };
    });

    // verify
    auto* verify = app.add_subcommand("verify", "exact and statistical checks");
    verify->require_subcommand(1);
    {
        auto t = std::make_shared<std::uint32_t>(1);
        auto d = std::make_shared<std::uint32_t>(1);
        auto q = std::make_shared<std::uint64_t>(3);
        auto npoints = std::make_shared<std::uint64_t>(3);
        auto* lemma1 = verify->add_subcommand(
            "lemma1", "exact vanishing probability at single points equals 1/q");
        lemma1->add_option("-t", *t, "variables")->capture_default_str();
        lemma1->add_option("-d", *d, "degree bound")->capture_default_str();
        lemma1->add_option("-q", *q, "prime field order")->capture_default_str();
        lemma1->add_option("--points", *npoints, "number of canonical points to check")
            ->capture_default_str();
        lemma1->callback([&, t, d, q, npoints] {
            action = [=] { return cmd_verify_lemma1(*t, *d, *q, *npoints); };
        });
    }
    {
        auto t = std::make_shared<std::uint32_t>(2);
        auto d = std::make_shared<std::uint32_t>(2);
        auto q = std::make_shared<std::uint64_t>(5);
        auto m = std::make_shared<std::uint64_t>(2);
        auto* lemma2 = verify->add_subcommand(
            "lemma2", "exact m-point vanishing probability equals 1/q^m when q > C(m,2)");
        lemma2->add_option("-t", *t, "variables")->capture_default_str();
        lemma2->add_option("-d", *d, "degree bound")->capture_default_str();
        lemma2->add_option("-q", *q, "prime field order")->capture_default_str();
        lemma2->add_option("-m", *m, "number of canonical points")->capture_default_str();
        lemma2->callback(
            [&, t, d, q, m] { action = [=] { return cmd_verify_lemma2(*t, *d, *q, *m); }; });
    }
    {
        auto host = std::make_shared<std::uint32_t>(3);
        auto k = std::make_shared<std::uint32_t>(2);
        auto r = std::make_shared<std::uint32_t>(2);
        auto* union_cmd = verify->add_subcommand(
            "union", "k*n <= (k-1)*m over all r-collections of paths on a complete host");
        union_cmd->add_option("--host", *host, "side size of the complete host K_{n,n}")
            ->capture_default_str();
        union_cmd->add_option("-k", *k, "path length")->capture_default_str();
        union_cmd->add_option("-r", *r, "paths per collection")->capture_default_str();
        union_cmd->callback(
            [&, host, k, r] { action = [=] { return cmd_verify_union(*host, *k, *r); }; });
    }
    {
        auto host = std::make_shared<std::uint32_t>(3);
        auto k = std::make_shared<std::uint32_t>(2);
        auto r = std::make_shared<std::uint32_t>(2);
        auto* pmbound = verify->add_subcommand(
            "pmbound", "tabulate P_{r,m} on a complete host and check P <= n^((k-1)m/k)");
        pmbound->add_option("--host", *host, "side size of the complete host K_{n,n}")
            ->capture_default_str();
        pmbound->add_option("-k", *k, "path length")->capture_default_str();
        pmbound->add_option("-r", *r, "paths per collection")->capture_default_str();
        pmbound->callback(
            [&, host, k, r] { action = [=] { return cmd_verify_pmbound(*host, *k, *r); }; });
    }
    {
        auto config = std::make_shared<ExperimentConfig>();
        auto seed = std::make_shared<std::string>("default");
        auto s = std::make_shared<double>(0);
        auto* markov = verify->add_subcommand(
            "markov", "tail bound P[|S| >= s] <= slack * kr / s^r over pooled trials");
        markov->add_option("-k", config->k, "path length")->capture_default_str();
        markov->add_option("-q", config->q, "prime field order")->capture_default_str();
        markov->add_option("--trials", config->trials, "number of seeded trials (>= 10)")
            ->capture_default_str();
        markov->add_option("-r", config->r, "moment order (0 = 2k)")->capture_default_str();
        markov->add_option("-s", *s, "tail threshold (0 = q/2)")->capture_default_str();
        markov->add_option("--seed", *seed, "master seed")->capture_default_str();
        markov->add_flag("--strict", config->strict_theory, "require q > C(kr,2)");
        markov->callback([&, config, seed, s] {
            action = [=, &threads] {
                ExperimentConfig c = *config;
                c.master_seed = parse_seed(*seed);
                c.threads = threads;
                return cmd_verify_markov(c, *s);
            };
        });
    }

    // demo
    auto* demo = app.add_subcommand(
        "demo", "end-to-end pipeline: choose prime, construct, prune, certify, report");
    auto demo_n = std::make_shared<std::uint64_t>(100);
    auto demo_k = std::make_shared<std::uint32_t>(2);
    auto demo_ell = std::make_shared<std::string>("auto");
    auto demo_seed = std::make_shared<std::string>("default");
    auto demo_out = std::make_shared<std::string>();
    auto demo_edges = std::make_shared<std::string>();
    demo->add_option("-n", *demo_n, "target vertex count")->capture_default_str();
    demo->add_option("-k", *demo_k, "path length")->capture_default_str();
    demo->add_option("--ell", *demo_ell, "bad-pair threshold, integer or 'auto'")
        ->capture_default_str();
    demo->add_option("--seed", *demo_seed, "construction seed")->capture_default_str();
    demo->add_option("-o,--output", *demo_out, "summary JSON (default stdout)");
    demo->add_option("--edges", *demo_edges, "also write the pruned edge list here");
    demo->callback([&, demo_n, demo_k, demo_ell, demo_seed, demo_out, demo_edges] {
        action = [=, &threads] {
            return cmd_demo(*demo_n, *demo_k, *demo_ell, *demo_seed, *demo_out, *demo_edges,
                            threads);
        };
    });

    // experiment
    auto* experiment = app.add_subcommand(
        "experiment", "seeded multi-trial harness with edge/moment/tail/prune verdicts");
    auto exp_config = std::make_shared<ExperimentConfig>();
    auto exp_ell = std::make_shared<std::string>("auto");
    auto exp_seed = std::make_shared<std::string>("default");
    auto exp_out = std::make_shared<std::string>();
    auto exp_hist = std::make_shared<std::string>();
    experiment->add_option("-k", exp_config->k, "path length")->capture_default_str();
    experiment->add_option("-q", exp_config->q, "prime field order")->capture_default_str();
    experiment->add_option("--trials", exp_config->trials, "number of seeded trials")
        ->capture_default_str();
    experiment->add_option("-r", exp_config->r, "moment order (0 = 2k)")->capture_default_str();
    experiment->add_option("--ell", *exp_ell, "bad-pair threshold, integer or 'auto'")
        ->capture_default_str();
    experiment->add_option("--seed", *exp_seed, "master seed")->capture_default_str();
    experiment->add_flag("--strict", exp_config->strict_theory, "require q > C(kr,2)");
    experiment->add_flag("--control-zero-polys", exp_config->control_zero_polys,
                         "negative control: all-zero polynomials (complete bipartite graph)");
    experiment->add_option("-o,--output", *exp_out, "report JSON (default stdout)");
    experiment->add_option("--hist-dir", *exp_hist,
                           "directory for per-trial histogram CSVs (trial_<i>.csv)");
    experiment->callback([&, exp_config, exp_ell, exp_seed, exp_out, exp_hist] {
        action = [=, &threads] {
            ExperimentConfig c = *exp_config;
            c.threads = threads;
            return cmd_experiment(c, *exp_ell, *exp_seed, *exp_out, *exp_hist);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        return action();
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
