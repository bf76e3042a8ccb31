// Python bindings (thetagraph._core): field arithmetic, polynomials, the
// graph construction, path statistics and the experiment harness. Rich
// reports also round-trip through their JSON forms so Python tooling can
// consume the same schema the CLI emits.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "thetagraph/construct.hpp"
#include "thetagraph/experiment.hpp"
#include "thetagraph/io.hpp"
#include "thetagraph/mpoly.hpp"
#include "thetagraph/paths.hpp"
#include "thetagraph/rng.hpp"
#include "thetagraph/u128.hpp"

namespace py = pybind11;
using namespace theta;

namespace {

std::vector<std::pair<std::string, std::uint64_t>>
labeled_breakdown(const std::vector<std::pair<DegeneracyCondition, std::uint64_t>>& breakdown) {
    std::vector<std::pair<std::string, std::uint64_t>> out;
    out.reserve(breakdown.size());
    for (const auto& [cond, count] : breakdown) out.emplace_back(cond.label(), count);
    return out;
}

std::string side_str(Side s) { return std::string(1, side_char(s)); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "dense bipartite graphs from random polynomial systems over F_q";

    // Exception hierarchy: every library error surfaces as a Python class
    // deriving from thetagraph._core.Error.
    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<NotPrimeError>(m, "NotPrimeError", base);
    py::register_exception<DivisionByZeroError>(m, "DivisionByZeroError", base);
    py::register_exception<SizeOverflowError>(m, "SizeOverflowError", base);
    py::register_exception<ArityMismatchError>(m, "ArityMismatchError", base);
    py::register_exception<DuplicatePointsError>(m, "DuplicatePointsError", base);
    py::register_exception<ParityMismatchError>(m, "ParityMismatchError", base);
    py::register_exception<SameVertexError>(m, "SameVertexError", base);
    py::register_exception<StrictTheoryViolationError>(m, "StrictTheoryViolationError", base);
    py::register_exception<TooSmallError>(m, "TooSmallError", base);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);

    m.attr("DEFAULT_SEED") = kDefaultSeed;
    m.attr("SCHEMA_VERSION") = io::kSchemaVersion;

    m.def("is_prime", &is_prime, py::arg("n"));
    m.def("mix64", &mix64, py::arg("z"));
    m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));

    py::class_<SplitMix64>(m, "SplitMix64", "deterministic 64-bit stream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next", &SplitMix64::next)
        .def("below", &SplitMix64::below, py::arg("n"));

    py::class_<Field>(m, "Field", "prime field F_q with canonical representatives")
        .def(py::init<std::uint64_t>(), py::arg("q"))
        .def_property_readonly("q", &Field::q)
        .def("add", &Field::add)
        .def("sub", &Field::sub)
        .def("neg", &Field::neg)
        .def("mul", &Field::mul)
        .def("pow", &Field::pow)
        .def("inv", &Field::inv)
        .def("reduce", &Field::reduce)
        .def(py::self == py::self)
        .def("__repr__", [](const Field& f) { return "Field(" + std::to_string(f.q()) + ")"; });

    py::class_<Rational>(m, "Rational", "exact nonnegative rational in lowest terms")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("num"), py::arg("den"))
        .def_readonly("num", &Rational::num)
        .def_readonly("den", &Rational::den)
        .def("value", &Rational::value)
        .def(py::self == py::self)
        .def("__repr__", [](const Rational& r) { return r.str(); })
        .def("__str__", &Rational::str);

    m.def("binomial", &binomial, py::arg("n"), py::arg("k"));
    m.def(
        "basis_size",
        [](std::uint32_t nvars, std::uint32_t degree) { return basis_size(nvars, degree); },
        py::arg("nvars"), py::arg("degree"));
    m.def(
        "monomial_basis",
        [](std::uint32_t nvars, std::uint32_t degree) { return monomial_basis(nvars, degree); },
        py::arg("nvars"), py::arg("degree"),
        "all exponent vectors of total degree <= degree, in canonical order");
    m.def(
        "monomial_rank",
        [](const std::vector<Exponent>& exps) {
            return monomial_rank(std::span<const Exponent>(exps));
        },
        py::arg("exps"));
    m.def("monomial_unrank", &monomial_unrank, py::arg("nvars"), py::arg("rank"));

    py::class_<MultiPoly>(m, "MultiPoly",
                          "sparse multivariate polynomial over F_q, degree-bounded")
        .def(py::init<const Field&, std::uint32_t, std::uint32_t>(), py::arg("field"),
             py::arg("nvars"), py::arg("degree"), "the zero polynomial")
        .def_static(
            "from_terms",
            [](const Field& field, std::uint32_t nvars, std::uint32_t degree,
               const std::vector<std::pair<std::vector<Exponent>, std::uint32_t>>& terms) {
                return MultiPoly::from_terms(field, nvars, degree, terms);
            },
            py::arg("field"), py::arg("nvars"), py::arg("degree"), py::arg("terms"))
        .def_static(
            "sample_uniform",
            [](const Field& field, std::uint32_t nvars, std::uint32_t degree, SplitMix64& rng) {
                return MultiPoly::sample_uniform(field, nvars, degree, rng);
            },
            py::arg("field"), py::arg("nvars"), py::arg("degree"), py::arg("rng"))
        .def_property_readonly("nvars", &MultiPoly::nvars)
        .def_property_readonly("degree", &MultiPoly::degree)
        .def_property_readonly("term_count", &MultiPoly::term_count)
        .def_property_readonly("field", &MultiPoly::field)
        .def("is_zero", &MultiPoly::is_zero)
        .def("is_constant", &MultiPoly::is_constant)
        .def(
            "coefficient",
            [](const MultiPoly& p, const std::vector<Exponent>& exps) {
                return p.coefficient(std::span<const Exponent>(exps));
            },
            py::arg("exps"))
        .def(
            "terms",
            [](const MultiPoly& p) {
                std::vector<std::pair<std::vector<Exponent>, std::uint32_t>> out;
                out.reserve(p.term_count());
                for (std::size_t i = 0; i < p.term_count(); ++i) {
                    auto t = p.term(i);
                    out.emplace_back(std::vector<Exponent>(t.exps.begin(), t.exps.end()),
                                     t.coeff);
                }
                return out;
            },
            "list of (exponent vector, coefficient) in canonical order")
        .def(
            "evaluate",
            [](const MultiPoly& p, const std::vector<std::uint32_t>& point) {
                return p.evaluate(std::span<const std::uint32_t>(point));
            },
            py::arg("point"))
        .def(
            "specialize_prefix",
            [](const MultiPoly& p, const std::vector<std::uint32_t>& prefix) {
                return p.specialize_prefix(std::span<const std::uint32_t>(prefix));
            },
            py::arg("prefix"))
        .def("specialize_first", &MultiPoly::specialize_first, py::arg("value"))
        .def("serialize", &MultiPoly::serialize)
        .def_static("parse", &MultiPoly::parse, py::arg("text"))
        .def(py::self == py::self)
        .def("__repr__", [](const MultiPoly& p) { return "MultiPoly('" + p.serialize() + "')"; });

    m.def(
        "vanish_probability_exact",
        [](std::uint32_t nvars, std::uint32_t degree, const Field& field,
           const std::vector<std::vector<std::uint32_t>>& points) {
            return vanish_probability_exact(nvars, degree, field, points);
        },
        py::arg("nvars"), py::arg("degree"), py::arg("field"), py::arg("points"),
        "exact probability a uniform degree-<=d polynomial vanishes at every point");

    py::enum_<Side>(m, "Side").value("U", Side::U).value("V", Side::V);

    py::class_<VertexRef>(m, "VertexRef")
        .def(py::init([](Side side, std::uint64_t rank) { return VertexRef{side, rank}; }),
             py::arg("side"), py::arg("rank"))
        .def_readwrite("side", &VertexRef::side)
        .def_readwrite("rank", &VertexRef::rank)
        .def(py::self == py::self)
        .def(py::self < py::self)
        .def("__repr__", [](const VertexRef& v) {
            return side_str(v.side) + std::to_string(v.rank);
        });

    m.def("rank_to_coords", &rank_to_coords, py::arg("rank"), py::arg("k"), py::arg("q"));
    m.def(
        "coords_to_rank",
        [](const std::vector<std::uint32_t>& coords, std::uint64_t q) {
            return coords_to_rank(std::span<const std::uint32_t>(coords), q);
        },
        py::arg("coords"), py::arg("q"));

    py::class_<ConstructionParams>(m, "ConstructionParams")
        .def(py::init([](std::uint32_t k, std::uint64_t q, std::uint64_t seed,
                         bool strict_theory) {
                 return ConstructionParams{k, q, seed, strict_theory};
             }),
             py::arg("k") = 2, py::arg("q") = 2, py::arg("seed") = 0,
             py::arg("strict_theory") = false)
        .def_readwrite("k", &ConstructionParams::k)
        .def_readwrite("q", &ConstructionParams::q)
        .def_readwrite("seed", &ConstructionParams::seed)
        .def_readwrite("strict_theory", &ConstructionParams::strict_theory)
        .def_property_readonly("t", &ConstructionParams::t)
        .def_property_readonly("r", &ConstructionParams::r)
        .def_property_readonly("d", &ConstructionParams::d)
        .def_property_readonly("poly_count", &ConstructionParams::poly_count)
        .def_property_readonly("side_size", &ConstructionParams::side_size)
        .def("validate", [](const ConstructionParams& p) { p.validate(); })
        .def(py::self == py::self)
        .def("__repr__", [](const ConstructionParams& p) {
            return "ConstructionParams(k=" + std::to_string(p.k) + ", q=" + std::to_string(p.q) +
                   ", seed=" + std::to_string(p.seed) +
                   (p.strict_theory ? ", strict_theory=True)" : ")");
        });

    m.def("strict_theory_min_q", &strict_theory_min_q, py::arg("k"));
    m.def("edge_probability", &edge_probability, py::arg("k"), py::arg("q"));
    m.def("choose_prime", &choose_prime, py::arg("n"), py::arg("k"),
          "largest prime q with 2*q^k <= n");

    py::class_<BipartiteGraph>(m, "BipartiteGraph")
        .def_static("complete_host", &BipartiteGraph::complete_host, py::arg("nu"),
                    py::arg("nv"))
        .def_static("from_edges", &BipartiteGraph::from_edges, py::arg("nu"), py::arg("nv"),
                    py::arg("edges"))
        .def_property_readonly("nu", &BipartiteGraph::nu)
        .def_property_readonly("nv", &BipartiteGraph::nv)
        .def_property_readonly("edge_count", &BipartiteGraph::edge_count)
        .def("present", &BipartiteGraph::present, py::arg("v"))
        .def("present_count", &BipartiteGraph::present_count, py::arg("side"))
        .def("degree", &BipartiteGraph::degree, py::arg("v"))
        .def(
            "neighbors",
            [](const BipartiteGraph& g, VertexRef v) {
                auto span = g.neighbors(v);
                return std::vector<std::uint32_t>(span.begin(), span.end());
            },
            py::arg("v"))
        .def("has_edge", &BipartiteGraph::has_edge, py::arg("u_rank"), py::arg("v_rank"))
        .def_property_readonly("params",
                               [](const BipartiteGraph& g) -> std::optional<ConstructionParams> {
                                   if (const ConstructionParams* p = g.params()) return *p;
                                   return std::nullopt;
                               })
        .def_property_readonly("polys", &BipartiteGraph::polys)
        .def("without_vertices", &BipartiteGraph::without_vertices, py::arg("removals"))
        .def("edge_list",
             [](const BipartiteGraph& g) {
                 std::ostringstream out;
                 io::write_edge_list(out, g);
                 return out.str();
             })
        .def("metadata_json",
             [](const BipartiteGraph& g) { return io::construction_metadata_json(g); })
        .def("__repr__", [](const BipartiteGraph& g) {
            return "BipartiteGraph(" + std::to_string(g.nu()) + "x" + std::to_string(g.nv()) +
                   ", edges=" + std::to_string(g.edge_count()) + ")";
        });

    m.def(
        "construct_graph",
        [](const ConstructionParams& params, unsigned threads) {
            return construct_graph(params, threads);
        },
        py::arg("params"), py::arg("threads") = 0);
    m.def(
        "construct_graph_with_polys",
        [](const ConstructionParams& params, std::vector<MultiPoly> polys, unsigned threads) {
            return construct_graph_with_polys(params, std::move(polys), threads);
        },
        py::arg("params"), py::arg("polys"), py::arg("threads") = 0);
    m.def(
        "parse_edge_list",
        [](const std::string& text) {
            std::istringstream in(text);
            return io::edge_list_to_graph(io::read_edge_list(in));
        },
        py::arg("text"), "rebuild a graph from write_edge_list output");

    m.def("parity_valid", &parity_valid, py::arg("w1"), py::arg("w2"), py::arg("k"));
    m.def(
        "count_paths",
        [](const BipartiteGraph& g, VertexRef w1, VertexRef w2, std::uint32_t k) {
            return count_paths(g, w1, w2, k);
        },
        py::arg("g"), py::arg("w1"), py::arg("w2"), py::arg("k"));
    m.def(
        "enumerate_paths",
        [](const BipartiteGraph& g, VertexRef w1, VertexRef w2, std::uint32_t k) {
            return enumerate_paths(g, w1, w2, k);
        },
        py::arg("g"), py::arg("w1"), py::arg("w2"), py::arg("k"));

    py::class_<WalkTable>(m, "WalkTable", "all-pairs length-k walk counts")
        .def(py::init([](const BipartiteGraph& g, std::uint32_t k, unsigned threads) {
                 return WalkTable(g, k, threads);
             }),
             py::arg("g"), py::arg("k"), py::arg("threads") = 0)
        .def_property_readonly("k", &WalkTable::k)
        .def("walks", &WalkTable::walks, py::arg("w1"), py::arg("w2"));

    py::class_<SolutionCount>(m, "SolutionCount")
        .def_readonly("solution_count", &SolutionCount::solution_count)
        .def_readonly("path_count", &SolutionCount::path_count)
        .def_property_readonly(
            "degenerate",
            [](const SolutionCount& s) { return labeled_breakdown(s.degenerate); })
        .def("degenerate_total", &SolutionCount::degenerate_total);

    m.def(
        "count_system_solutions",
        [](const BipartiteGraph& g, VertexRef w1, VertexRef w2, std::uint32_t k) {
            return count_system_solutions(g, w1, w2, k);
        },
        py::arg("g"), py::arg("w1"), py::arg("w2"), py::arg("k"));

    py::class_<PairPathReport>(m, "PairPathReport")
        .def_readonly("w1", &PairPathReport::w1)
        .def_readonly("w2", &PairPathReport::w2)
        .def_readonly("path_count", &PairPathReport::path_count)
        .def_readonly("walk_count", &PairPathReport::walk_count)
        .def_readonly("solution_count", &PairPathReport::solution_count)
        .def_property_readonly(
            "degenerate_breakdown",
            [](const PairPathReport& r) { return labeled_breakdown(r.degenerate_breakdown); })
        .def("degenerate_total", &PairPathReport::degenerate_total);

    m.def(
        "analyze_pair",
        [](const BipartiteGraph& g, VertexRef w1, VertexRef w2, std::uint32_t k,
           const WalkTable* walk_table) {
            return analyze_pair(g, walk_table, w1, w2, k);
        },
        py::arg("g"), py::arg("w1"), py::arg("w2"), py::arg("k"),
        py::arg("walk_table").none(true) = nullptr);

    py::class_<BadPair>(m, "BadPair")
        .def_readonly("w1", &BadPair::w1)
        .def_readonly("w2", &BadPair::w2)
        .def_readonly("path_count", &BadPair::path_count)
        .def("__repr__", [](const BadPair& b) {
            return "BadPair(" + side_str(b.w1.side) + std::to_string(b.w1.rank) + ", " +
                   side_str(b.w2.side) + std::to_string(b.w2.rank) +
                   ", paths=" + std::to_string(b.path_count) + ")";
        });

    py::class_<PathScan>(m, "PathScan")
        .def_readonly("histogram", &PathScan::histogram)
        .def_readonly("collected", &PathScan::collected)
        .def_readonly("pair_count", &PathScan::pair_count);

    m.def(
        "scan_path_counts",
        [](const BipartiteGraph& g, std::uint32_t k, std::uint64_t collect_min,
           unsigned threads) { return scan_path_counts(g, k, collect_min, threads); },
        py::arg("g"), py::arg("k"), py::arg("collect_min"), py::arg("threads") = 0);
    m.def(
        "find_bad_pairs",
        [](const BipartiteGraph& g, std::uint32_t k, std::uint64_t ell, unsigned threads) {
            return find_bad_pairs(g, k, ell, threads);
        },
        py::arg("g"), py::arg("k"), py::arg("ell"), py::arg("threads") = 0);
    m.def("prune", &prune, py::arg("g"), py::arg("bad"),
          "drop the smaller vertex of each bad pair");
    m.def(
        "theta_free_certify",
        [](const BipartiteGraph& g, std::uint32_t k, std::uint64_t ell) {
            return theta_free_certify(g, k, ell);
        },
        py::arg("g"), py::arg("k"), py::arg("ell"),
        "True iff no ell internally disjoint length-k paths share both endpoints");

    py::class_<Verdict>(m, "Verdict")
        .def_readonly("name", &Verdict::name)
        .def_readonly("pass_", &Verdict::pass)
        .def_readonly("measured", &Verdict::measured)
        .def_readonly("bound", &Verdict::bound)
        .def_readonly("detail", &Verdict::detail)
        .def("__repr__", [](const Verdict& v) {
            return std::string(v.pass ? "PASS " : "FAIL ") + v.name;
        });

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init([](std::uint32_t k, std::uint64_t q, std::uint64_t trials, std::uint32_t r,
                         std::optional<std::uint64_t> ell, std::uint64_t master_seed,
                         bool strict_theory, bool control_zero_polys, unsigned threads) {
                 ExperimentConfig c;
                 c.k = k;
                 c.q = q;
                 c.trials = trials;
                 c.r = r;
                 c.ell = ell;
                 c.master_seed = master_seed;
                 c.strict_theory = strict_theory;
                 c.control_zero_polys = control_zero_polys;
                 c.threads = threads;
                 return c;
             }),
             py::arg("k") = 2, py::arg("q") = 29, py::arg("trials") = 10, py::arg("r") = 0,
             py::arg("ell") = std::nullopt, py::arg("master_seed") = 0,
             py::arg("strict_theory") = false, py::arg("control_zero_polys") = false,
             py::arg("threads") = 0)
        .def_readwrite("k", &ExperimentConfig::k)
        .def_readwrite("q", &ExperimentConfig::q)
        .def_readwrite("trials", &ExperimentConfig::trials)
        .def_readwrite("r", &ExperimentConfig::r)
        .def_readwrite("ell", &ExperimentConfig::ell)
        .def_readwrite("master_seed", &ExperimentConfig::master_seed)
        .def_readwrite("strict_theory", &ExperimentConfig::strict_theory)
        .def_readwrite("control_zero_polys", &ExperimentConfig::control_zero_polys)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def_property_readonly("moment_order", &ExperimentConfig::moment_order);

    py::class_<TrialStats>(m, "TrialStats")
        .def_readonly("seed", &TrialStats::seed)
        .def_readonly("edge_count", &TrialStats::edge_count)
        .def_readonly("path_histogram", &TrialStats::path_histogram)
        .def_readonly("pair_count", &TrialStats::pair_count)
        .def_property_readonly(
            "moment_sum", [](const TrialStats& t) { return u128_to_string(t.moment_sum); })
        .def_readonly("empirical_moment", &TrialStats::empirical_moment)
        .def_readonly("bad_pair_count", &TrialStats::bad_pair_count)
        .def_readonly("pruned_edge_count", &TrialStats::pruned_edge_count)
        .def_readonly("pruned_vertex_count", &TrialStats::pruned_vertex_count)
        .def_readonly("max_small", &TrialStats::max_small)
        .def_readonly("min_large", &TrialStats::min_large)
        .def_readonly("prune_sound", &TrialStats::prune_sound);

    py::class_<ExperimentReport>(m, "ExperimentReport")
        .def_readonly("config", &ExperimentReport::config)
        .def_readonly("resolved_ell", &ExperimentReport::resolved_ell)
        .def_readonly("ell_was_auto", &ExperimentReport::ell_was_auto)
        .def_readonly("trials", &ExperimentReport::trials)
        .def_readonly("mean_edge_count", &ExperimentReport::mean_edge_count)
        .def_readonly("stddev_edge_count", &ExperimentReport::stddev_edge_count)
        .def_readonly("mean_empirical_moment", &ExperimentReport::mean_empirical_moment)
        .def_readonly("verdicts", &ExperimentReport::verdicts)
        .def("json", [](const ExperimentReport& r) { return io::report_json(r); });

    m.def("run_trials", &run_trials, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("parse_report_json", &io::parse_report_json, py::arg("text"));
    m.def(
        "verify_lemma1",
        [](std::uint32_t t, std::uint32_t d, std::uint64_t q,
           const std::vector<std::uint32_t>& point) { return verify_lemma1(t, d, q, point); },
        py::arg("t"), py::arg("d"), py::arg("q"), py::arg("point"));
    m.def(
        "verify_lemma2",
        [](std::uint32_t t, std::uint32_t d, std::uint64_t q,
           const std::vector<std::vector<std::uint32_t>>& points) {
            return verify_lemma2(t, d, q, points);
        },
        py::arg("t"), py::arg("d"), py::arg("q"), py::arg("points"));
    m.def("markov_tail_check", &markov_tail_check, py::arg("report"), py::arg("s"));

    py::class_<DemoResult>(m, "DemoResult")
        .def_readonly("n", &DemoResult::n)
        .def_readonly("k", &DemoResult::k)
        .def_readonly("q", &DemoResult::q)
        .def_readonly("seed", &DemoResult::seed)
        .def_readonly("side_size", &DemoResult::side_size)
        .def_readonly("ell_used", &DemoResult::ell_used)
        .def_readonly("ell_was_auto", &DemoResult::ell_was_auto)
        .def_readonly("bad_pair_count", &DemoResult::bad_pair_count)
        .def_readonly("removed_vertices", &DemoResult::removed_vertices)
        .def_readonly("padding_vertices", &DemoResult::padding_vertices)
        .def_readonly("edge_count", &DemoResult::edge_count)
        .def_readonly("edge_ratio", &DemoResult::edge_ratio)
        .def_readonly("max_path_count", &DemoResult::max_path_count)
        .def_readonly("certified", &DemoResult::certified)
        .def_readonly("graph", &DemoResult::graph)
        .def("json", [](const DemoResult& r) { return io::demo_summary_json(r); });

    m.def(
        "theorem1_demo",
        [](std::uint64_t n, std::uint32_t k, std::optional<std::uint64_t> ell,
           std::uint64_t seed, unsigned threads) {
            return theorem1_demo(n, k, ell, seed, threads);
        },
        py::arg("n"), py::arg("k") = 2, py::arg("ell") = std::nullopt,
        py::arg("seed") = kDefaultSeed, py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "check_union_inequality",
        [](const BipartiteGraph& host, std::uint32_t r, std::uint32_t k) {
            auto check = check_union_inequality(host, r, k);
            return py::make_tuple(check.ok, check.collections_checked);
        },
        py::arg("host"), py::arg("r"), py::arg("k"),
        "(ok, collections_checked) for the k*n <= (k-1)*m sweep");
    m.def(
        "count_collections_bound_check",
        [](std::uint32_t n_side, std::uint32_t k, std::uint32_t r) {
            auto check = count_collections_bound_check(n_side, k, r);
            return py::make_tuple(check.ok, check.p_rm, check.collections_checked);
        },
        py::arg("n_side"), py::arg("k"), py::arg("r"),
        "(ok, {m: P_rm}, collections_checked) on the complete host K_{n,n}");
}
