#include "thetagraph/io.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "thetagraph/errors.hpp"
#include "thetagraph/u128.hpp"

namespace theta::io {

namespace {

using nlohmann::json;

u128 parse_u128(const std::string& text) {
    if (text.empty()) throw ParseError("empty 128-bit counter");
    u128 value = 0;
    constexpr u128 max = ~u128{0};
    for (char c : text) {
        if (c < '0' || c > '9') throw ParseError("non-digit in 128-bit counter: '" + text + "'");
        if (value > (max - u128(c - '0')) / 10) throw ParseError("128-bit counter overflow");
        value = value * 10 + u128(c - '0');
    }
    return value;
}

json histogram_to_json(const std::map<std::uint64_t, std::uint64_t>& histogram) {
    json obj = json::object();
    for (const auto& [count, pairs] : histogram) obj[std::to_string(count)] = pairs;
    return obj;
}

std::map<std::uint64_t, std::uint64_t> histogram_from_json(const json& obj) {
    std::map<std::uint64_t, std::uint64_t> histogram;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        std::uint64_t count = 0;
        try {
            std::size_t used = 0;
            count = std::stoull(it.key(), &used);
            if (used != it.key().size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ParseError("bad histogram key '" + it.key() + "'");
        }
        histogram[count] = it.value().get<std::uint64_t>();
    }
    return histogram;
}

} // namespace

void write_edge_list(std::ostream& out, const BipartiteGraph& g) {
    const ConstructionParams* params = g.params();
    if (!params)
        throw ConfigError("edge-list export needs construction provenance (k, q, seed)");
    out << "# k=" << params->k << " q=" << params->q << " seed=" << params->seed << "\n";
    for (std::uint32_t u = 0; u < g.nu(); ++u)
        for (std::uint32_t v : g.neighbors({Side::U, u})) out << u << ' ' << v << "\n";
}

EdgeListData read_edge_list(std::istream& in) {
    EdgeListData data;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty edge list");
    {
        std::istringstream header(line);
        std::string hash, kpart, qpart, spart;
        if (!(header >> hash >> kpart >> qpart >> spart) || hash != "#" ||
            kpart.rfind("k=", 0) != 0 || qpart.rfind("q=", 0) != 0 ||
            spart.rfind("seed=", 0) != 0)
            throw ParseError("edge-list header must be '# k=.. q=.. seed=..', got '" + line +
                             "'");
        try {
            data.k = std::uint32_t(std::stoul(kpart.substr(2)));
            data.q = std::stoull(qpart.substr(2));
            data.seed = std::stoull(spart.substr(5));
        } catch (const std::exception&) {
            throw ParseError("malformed edge-list header numbers in '" + line + "'");
        }
        std::string extra;
        if (header >> extra) throw ParseError("unexpected header token '" + extra + "'");
    }
    std::uint64_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::uint32_t u = 0, v = 0;
        if (!(row >> u >> v))
            throw ParseError("edge line " + std::to_string(lineno) + " is not 'u v': '" + line +
                             "'");
        std::string extra;
        if (row >> extra)
            throw ParseError("unexpected token on edge line " + std::to_string(lineno) + ": '" +
                             extra + "'");
        data.edges.emplace_back(u, v);
    }
    return data;
}

BipartiteGraph edge_list_to_graph(const EdgeListData& data) {
    ConstructionParams params{data.k, data.q, data.seed, false};
    return BipartiteGraph::from_construction_edges(params, data.edges);
}

std::string construction_metadata_json(const BipartiteGraph& g) {
    const ConstructionParams* params = g.params();
    if (!params) throw ConfigError("metadata export needs construction provenance");
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "construction_metadata";
    doc["k"] = params->k;
    doc["q"] = params->q;
    doc["seed"] = params->seed;
    doc["strict_theory"] = params->strict_theory;
    doc["side_size"] = params->side_size();
    doc["edge_count"] = g.edge_count();
    doc["edge_probability"] = edge_probability(params->k, params->q).str();
    json polys = json::array();
    for (const MultiPoly& p : g.polys()) polys.push_back(p.serialize());
    doc["polys"] = polys;
    return doc.dump(2) + "\n";
}

void write_pair_reports_csv(std::ostream& out, const std::vector<PairPathReport>& rows) {
    out << "w1_rank,w2_rank,paths,walks,solutions,degenerate,sides\n";
    for (const PairPathReport& row : rows) {
        out << row.w1.rank << ',' << row.w2.rank << ',' << row.path_count << ','
            << row.walk_count << ',' << row.solution_count << ',' << row.degenerate_total()
            << ',' << side_char(row.w1.side) << side_char(row.w2.side) << "\n";
    }
}

std::vector<PairCsvRow> read_pair_reports_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        line != "w1_rank,w2_rank,paths,walks,solutions,degenerate,sides")
        throw ParseError("unexpected pair-report CSV header: '" + line + "'");
    std::vector<PairCsvRow> rows;
    std::uint64_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream split(line);
        while (std::getline(split, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7)
            throw ParseError("pair-report CSV line " + std::to_string(lineno) +
                             " has " + std::to_string(cells.size()) + " cells");
        PairCsvRow row;
        try {
            row.w1_rank = std::stoull(cells[0]);
            row.w2_rank = std::stoull(cells[1]);
            row.paths = std::stoull(cells[2]);
            row.walks = std::stoull(cells[3]);
            row.solutions = std::stoull(cells[4]);
            row.degenerate = std::stoull(cells[5]);
        } catch (const std::exception&) {
            throw ParseError("non-numeric cell on CSV line " + std::to_string(lineno));
        }
        const std::string& sides = cells[6];
        auto parse_side = [&](char c) {
            if (c == 'U') return Side::U;
            if (c == 'V') return Side::V;
            throw ParseError("bad sides cell '" + sides + "' on CSV line " +
                             std::to_string(lineno));
        };
        if (sides.size() != 2)
            throw ParseError("bad sides cell '" + sides + "' on CSV line " +
                             std::to_string(lineno));
        row.w1_side = parse_side(sides[0]);
        row.w2_side = parse_side(sides[1]);
        rows.push_back(row);
    }
    return rows;
}

std::string histogram_json(const std::map<std::uint64_t, std::uint64_t>& histogram) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "path_histogram";
    doc["histogram"] = histogram_to_json(histogram);
    return doc.dump(2) + "\n";
}

std::map<std::uint64_t, std::uint64_t> parse_histogram_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("invalid histogram JSON");
    if (!doc.contains("histogram")) throw ParseError("histogram JSON lacks 'histogram'");
    return histogram_from_json(doc["histogram"]);
}

std::string report_json(const ExperimentReport& report) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "experiment_report";

    json config;
    config["k"] = report.config.k;
    config["q"] = report.config.q;
    config["trials"] = report.config.trials;
    config["r"] = report.config.r;
    config["moment_order"] = report.config.moment_order();
    if (report.config.ell)
        config["ell"] = *report.config.ell;
    else
        config["ell"] = nullptr;
    config["master_seed"] = report.config.master_seed;
    config["strict_theory"] = report.config.strict_theory;
    config["control_zero_polys"] = report.config.control_zero_polys;
    doc["config"] = config;

    doc["resolved_ell"] = report.resolved_ell;
    doc["ell_was_auto"] = report.ell_was_auto;

    json trials = json::array();
    for (const TrialStats& stats : report.trials) {
        json t;
        t["seed"] = stats.seed;
        t["edge_count"] = stats.edge_count;
        t["pair_count"] = stats.pair_count;
        t["path_histogram"] = histogram_to_json(stats.path_histogram);
        t["moment_sum"] = u128_to_string(stats.moment_sum);
        t["empirical_moment"] = stats.empirical_moment;
        t["bad_pair_count"] = stats.bad_pair_count;
        t["pruned_edge_count"] = stats.pruned_edge_count;
        t["pruned_vertex_count"] = stats.pruned_vertex_count;
        if (stats.max_small)
            t["max_small"] = *stats.max_small;
        else
            t["max_small"] = nullptr;
        if (stats.min_large)
            t["min_large"] = *stats.min_large;
        else
            t["min_large"] = nullptr;
        t["prune_sound"] = stats.prune_sound;
        trials.push_back(t);
    }
    doc["trials"] = trials;

    json aggregates;
    aggregates["mean_edge_count"] = report.mean_edge_count;
    aggregates["stddev_edge_count"] = report.stddev_edge_count;
    aggregates["mean_empirical_moment"] = report.mean_empirical_moment;
    doc["aggregates"] = aggregates;

    json verdicts = json::array();
    for (const Verdict& v : report.verdicts) {
        json entry;
        entry["name"] = v.name;
        entry["pass"] = v.pass;
        entry["measured"] = v.measured;
        entry["bound"] = v.bound;
        entry["detail"] = v.detail;
        verdicts.push_back(entry);
    }
    doc["verdicts"] = verdicts;
    return doc.dump(2) + "\n";
}

ExperimentReport parse_report_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("invalid report JSON");
    try {
        ExperimentReport report;
        const json& config = doc.at("config");
        report.config.k = config.at("k").get<std::uint32_t>();
        report.config.q = config.at("q").get<std::uint64_t>();
        report.config.trials = config.at("trials").get<std::uint64_t>();
        report.config.r = config.at("r").get<std::uint32_t>();
        if (!config.at("ell").is_null())
            report.config.ell = config.at("ell").get<std::uint64_t>();
        report.config.master_seed = config.at("master_seed").get<std::uint64_t>();
        report.config.strict_theory = config.at("strict_theory").get<bool>();
        report.config.control_zero_polys = config.at("control_zero_polys").get<bool>();

        report.resolved_ell = doc.at("resolved_ell").get<std::uint64_t>();
        report.ell_was_auto = doc.at("ell_was_auto").get<bool>();

        for (const json& t : doc.at("trials")) {
            TrialStats stats;
            stats.seed = t.at("seed").get<std::uint64_t>();
            stats.edge_count = t.at("edge_count").get<std::uint64_t>();
            stats.pair_count = t.at("pair_count").get<std::uint64_t>();
            stats.path_histogram = histogram_from_json(t.at("path_histogram"));
            stats.moment_sum = parse_u128(t.at("moment_sum").get<std::string>());
            stats.empirical_moment = t.at("empirical_moment").get<double>();
            stats.bad_pair_count = t.at("bad_pair_count").get<std::uint64_t>();
            stats.pruned_edge_count = t.at("pruned_edge_count").get<std::uint64_t>();
            stats.pruned_vertex_count = t.at("pruned_vertex_count").get<std::uint64_t>();
            if (!t.at("max_small").is_null())
                stats.max_small = t.at("max_small").get<std::uint64_t>();
            if (!t.at("min_large").is_null())
                stats.min_large = t.at("min_large").get<std::uint64_t>();
            stats.prune_sound = t.at("prune_sound").get<bool>();
            report.trials.push_back(std::move(stats));
        }

        const json& aggregates = doc.at("aggregates");
        report.mean_edge_count = aggregates.at("mean_edge_count").get<double>();
        report.stddev_edge_count = aggregates.at("stddev_edge_count").get<double>();
        report.mean_empirical_moment = aggregates.at("mean_empirical_moment").get<double>();

        for (const json& entry : doc.at("verdicts")) {
            Verdict v;
            v.name = entry.at("name").get<std::string>();
            v.pass = entry.at("pass").get<bool>();
            v.measured = entry.at("measured").get<double>();
            v.bound = entry.at("bound").get<double>();
            v.detail = entry.at("detail").get<std::string>();
            report.verdicts.push_back(std::move(v));
        }
        return report;
    } catch (const json::exception& e) {
        throw ParseError(std::string("report JSON schema mismatch: ") + e.what());
    }
}

std::string demo_summary_json(const DemoResult& result) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "demo_summary";
    doc["n"] = result.n;
    doc["k"] = result.k;
    doc["q"] = result.q;
    doc["seed"] = result.seed;
    doc["side_size"] = result.side_size;
    doc["ell_used"] = result.ell_used;
    doc["ell_was_auto"] = result.ell_was_auto;
    doc["bad_pair_count"] = result.bad_pair_count;
    doc["removed_vertices"] = result.removed_vertices;
    doc["padding_vertices"] = result.padding_vertices;
    doc["edge_count"] = result.edge_count;
    doc["edge_ratio"] = result.edge_ratio;
    doc["max_path_count"] = result.max_path_count;
    doc["certified"] = result.certified;
    return doc.dump(2) + "\n";
}

} // namespace theta::io
