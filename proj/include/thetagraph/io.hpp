#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "thetagraph/construct.hpp"
#include "thetagraph/experiment.hpp"
#include "thetagraph/paths.hpp"

namespace theta::io {

inline constexpr int kSchemaVersion = 1;

/// Text edge list: one header comment `# k=.. q=.. seed=..`, then one
/// `u_rank v_rank` line per edge in (u, v) order. Requires construction
/// provenance (ConfigError otherwise). Byte-deterministic.
void write_edge_list(std::ostream& out, const BipartiteGraph& g);

struct EdgeListData {
    std::uint32_t k = 0;
    std::uint64_t q = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    friend bool operator==(const EdgeListData&, const EdgeListData&) = default;
};
EdgeListData read_edge_list(std::istream& in);

/// Rebuilds the graph on its q^k ranks from an exported edge list. The
/// polynomials are not part of the format, so the result carries params
/// but an empty polynomial list.
BipartiteGraph edge_list_to_graph(const EdgeListData& data);

/// JSON blob with params, the serialized polynomials and the edge count.
std::string construction_metadata_json(const BipartiteGraph& g);

/// Per-pair CSV: `w1_rank,w2_rank,paths,walks,solutions,degenerate,sides`
/// where `degenerate` totals the breakdown and `sides` is UU/VV/UV.
void write_pair_reports_csv(std::ostream& out, const std::vector<PairPathReport>& rows);

struct PairCsvRow {
    std::uint64_t w1_rank = 0, w2_rank = 0;
    std::uint64_t paths = 0, walks = 0, solutions = 0, degenerate = 0;
    Side w1_side = Side::U, w2_side = Side::U;
    friend bool operator==(const PairCsvRow&, const PairCsvRow&) = default;
};
std::vector<PairCsvRow> read_pair_reports_csv(std::istream& in);

/// Histogram JSON: path-count value -> number of pairs.
std::string histogram_json(const std::map<std::uint64_t, std::uint64_t>& histogram);
std::map<std::uint64_t, std::uint64_t> parse_histogram_json(const std::string& text);

/// Versioned experiment report; parse(report_json(r)) reproduces r.
std::string report_json(const ExperimentReport& report);
ExperimentReport parse_report_json(const std::string& text);

/// One-document summary of a theorem1_demo run (graph exported separately).
std::string demo_summary_json(const DemoResult& result);

} // namespace theta::io
