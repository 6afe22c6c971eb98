#pragma once

// Stage drivers behind the command-line tool. Every stage reads and writes
// plain files under one output directory:
//
//   detect/<period>/run_NN.csv   every run's best partition
//   detect/<period>/best.csv     highest-modularity run
//   detect/summary.json          per-run modularity, seed, sweeps
//   detect/community_counts.csv  period,mean,std,best,best_modularity
//   ari.csv                      period,mean_ari,std_ari,pairs
//   track/links.csv              every tested community pair
//   track/evolution.{dot,json}   validated evolution graph
//   enrich/records.csv           every enrichment test
//   enrich/report.csv            one row per community
//
// Later stages locate their inputs through detect/summary.json only.

#include <bipcomm/brim.hpp>
#include <bipcomm/csv.hpp>
#include <bipcomm/enrichment.hpp>
#include <bipcomm/errors.hpp>
#include <bipcomm/graph.hpp>
#include <bipcomm/metrics.hpp>
#include <bipcomm/partition.hpp>
#include <bipcomm/random.hpp>
#include <bipcomm/synth.hpp>
#include <bipcomm/tracker.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace bipcomm {

struct PipelineConfig {
    std::uint64_t seed = 0;
    unsigned threads = 1;

    // [input]
    std::filesystem::path manifest;
    std::filesystem::path attributes;
    char delimiter = ',';
    HeaderMode header = HeaderMode::detect;

    // [output]
    std::filesystem::path out_dir = "out";

    // [detect]
    std::uint32_t runs = 20;
    std::uint32_t restarts = 100;
    ModuleCountSchedule schedule;
    std::uint32_t max_sweeps = 1000;

    // [track]
    TrackerConfig tracker;
    std::vector<RootSpec> roots;
    std::vector<EvolutionFormat> formats = {EvolutionFormat::dot, EvolutionFormat::json};

    // [enrich]
    EnrichmentConfig enrich;

    // [synth]
    synth::PlantedModel model;
    synth::TemporalScript script;
    std::vector<synth::AttributeSpec> synth_attributes;
    std::vector<synth::AttributePlant> synth_plants;

    PipelineConfig() {
        model.communities = {{10, 30}, {10, 30}, {10, 30}, {10, 30}};
        model.p_in = 0.5;
        model.p_out = 0.02;
        script.periods = 5;
    }
};

// ---------------------------------------------------------------------------
// Value parsers shared by the config file and command-line flags.

namespace config {

inline std::vector<std::string> list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    for (auto& f : csv::split(s, sep))
        if (auto t = csv::trim(f); !t.empty())
            out.emplace_back(t);
    return out;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        if (!v.empty() && v.front() != '-') {
            auto x = std::stoull(v, &used, 10);
            if (used == v.size())
                return x;
        }
    } catch (const std::exception&) {
    }
    throw InputError(key + ": expected a non-negative integer, got '" + v + "'");
}

inline std::uint32_t parse_u32(const std::string& key, const std::string& v) {
    auto x = parse_u64(key, v);
    if (x > UINT32_MAX)
        throw InputError(key + ": value too large");
    return static_cast<std::uint32_t>(x);
}

inline double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        auto x = std::stod(v, &used);
        if (used == v.size() && std::isfinite(x))
            return x;
    } catch (const std::exception&) {
    }
    throw InputError(key + ": expected a number, got '" + v + "'");
}

inline double parse_probability(const std::string& key, const std::string& v) {
    auto x = parse_real(key, v);
    if (!(x > 0.0 && x <= 1.0))
        throw InputError(key + ": must lie in (0, 1]");
    return x;
}

/// "min_side", "adaptive" or "fixed:<c>".
inline ModuleCountSchedule parse_schedule(const std::string& v) {
    if (v == "min_side")
        return ModuleCountSchedule::min_side();
    if (v == "adaptive")
        return ModuleCountSchedule::adaptive();
    if (v.rfind("fixed:", 0) == 0) {
        auto c = parse_u32("schedule", v.substr(6));
        if (c == 0)
            throw InputError("schedule: fixed module count must be at least 1");
        return ModuleCountSchedule::fixed(c);
    }
    throw InputError("schedule: expected min_side, adaptive or fixed:<count>, got '" + v + "'");
}

inline std::string to_string(const ModuleCountSchedule& s) {
    switch (s.kind) {
    case ModuleCountSchedule::Kind::adaptive:
        return "adaptive";
    case ModuleCountSchedule::Kind::fixed:
        return "fixed:" + std::to_string(s.count);
    default:
        return "min_side";
    }
}

inline PopulationRule parse_population(const std::string& v) {
    if (v == "union")
        return PopulationRule::union_of_periods;
    if (v == "intersection")
        return PopulationRule::intersection;
    throw InputError("population: expected union or intersection, got '" + v + "'");
}

inline DirectionFilter parse_direction(const std::string& v) {
    if (v == "all")
        return DirectionFilter::all;
    if (v == "forward")
        return DirectionFilter::forward_only;
    throw InputError("direction: expected all or forward, got '" + v + "'");
}

inline EnrichmentConfig::DrawBasis parse_draws(const std::string& v) {
    if (v == "covered")
        return EnrichmentConfig::DrawBasis::category_covered;
    if (v == "community")
        return EnrichmentConfig::DrawBasis::community_size;
    throw InputError("draws: expected covered or community, got '" + v + "'");
}

inline HeaderMode parse_header(const std::string& v) {
    if (v == "auto")
        return HeaderMode::detect;
    if (v == "yes")
        return HeaderMode::present;
    if (v == "no")
        return HeaderMode::absent;
    throw InputError("header: expected auto, yes or no, got '" + v + "'");
}

inline char parse_delimiter(const std::string& v) {
    if (v == "tab" || v == "\\t")
        return '\t';
    if (v.size() == 1)
        return v[0];
    throw InputError("delimiter: expected a single character or 'tab'");
}

/// "<period>:<community>".
inline RootSpec parse_root(const std::string& v) {
    auto colon = v.rfind(':');
    if (colon == std::string::npos || colon == 0)
        throw InputError("root: expected <period>:<community>, got '" + v + "'");
    return {v.substr(0, colon), parse_u32("root", v.substr(colon + 1))};
}

/// "<red>x<blue>", optionally prefixed by "<n>*" to repeat.
inline std::vector<synth::CommunitySpec> parse_communities(const std::string& v) {
    std::vector<synth::CommunitySpec> out;
    for (const auto& item : list(v)) {
        std::uint32_t repeat = 1;
        std::string body = item;
        if (auto star = item.find('*'); star != std::string::npos) {
            repeat = parse_u32("communities", item.substr(0, star));
            body = item.substr(star + 1);
        }
        auto x = body.find('x');
        if (x == std::string::npos)
            throw InputError("communities: expected <red>x<blue>, got '" + item + "'");
        synth::CommunitySpec c{parse_u32("communities", body.substr(0, x)),
                               parse_u32("communities", body.substr(x + 1))};
        out.insert(out.end(), repeat, c);
    }
    return out;
}

/// "split:<period>:<community>" or "merge:<period>:<into>:<from>".
inline synth::ScriptEvent parse_event(const std::string& v) {
    auto f = csv::split(v, ':');
    if (f.size() == 3 && f[0] == "split")
        return synth::ScriptEvent::split(parse_u32("event", f[1]), parse_u32("event", f[2]));
    if (f.size() == 4 && f[0] == "merge")
        return synth::ScriptEvent::merge(parse_u32("event", f[1]), parse_u32("event", f[2]),
                                         parse_u32("event", f[3]));
    throw InputError("event: expected split:<period>:<c> or merge:<period>:<into>:<from>, got '" + v + "'");
}

/// "<category>:<red|blue>:<values>".
inline synth::AttributeSpec parse_attribute_spec(const std::string& v) {
    auto f = csv::split(v, ':');
    if (f.size() != 3)
        throw InputError("attribute: expected <category>:<side>:<values>, got '" + v + "'");
    auto side = parse_side(f[1]);
    if (!side)
        throw InputError("attribute: unknown side '" + f[1] + "'");
    return {f[0], *side, parse_u32("attribute", f[2])};
}

/// "<category>:<value>:<community>:<penetration>".
inline synth::AttributePlant parse_plant(const std::string& v) {
    auto f = csv::split(v, ':');
    if (f.size() != 4)
        throw InputError("plant: expected <category>:<value>:<community>:<penetration>, got '" + v + "'");
    auto pen = parse_real("plant", f[3]);
    if (!(pen >= 0.0 && pen <= 1.0))
        throw InputError("plant: penetration must lie in [0, 1]");
    return {f[0], f[1], parse_u32("plant", f[2]), pen};
}

} // namespace config

/// Reads an INI file. Relative paths resolve against the file's directory.
inline PipelineConfig load_config(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(path.string(), e.line(), e.message());
    }
    PipelineConfig cfg;
    const auto base = path.parent_path();
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.')))
            return std::string(csv::trim(*v));
        return std::nullopt;
    };
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    static const std::vector<std::string> known = {
        "general.seed",        "general.threads",     "input.manifest",   "input.attributes", "input.delimiter",
        "input.header",        "output.dir",          "detect.runs",      "detect.restarts",  "detect.schedule",
        "detect.max_sweeps",   "track.p_t",           "track.population", "track.direction",  "track.roots",
        "track.formats",       "enrich.p_t",          "enrich.draws",     "enrich.categories", "synth.communities",
        "synth.p_in",          "synth.p_out",         "synth.periods",    "synth.churn",      "synth.events",
        "synth.first_label",   "synth.attributes",    "synth.plants"};
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ParseError(path.string(), 0, "key '" + section + "' outside a section");
        for (const auto& [key, value] : body) {
            auto full = section + "." + key;
            if (std::find(known.begin(), known.end(), full) == known.end())
                throw ParseError(path.string(), 0, "unknown key '" + full + "'");
        }
    }

    if (auto v = get("general.seed"))
        cfg.seed = config::parse_u64("seed", *v);
    if (auto v = get("general.threads"))
        cfg.threads = config::parse_u32("threads", *v);
    if (auto v = get("input.manifest"))
        cfg.manifest = resolve(*v);
    if (auto v = get("input.attributes"))
        cfg.attributes = resolve(*v);
    if (auto v = get("input.delimiter"))
        cfg.delimiter = config::parse_delimiter(*v);
    if (auto v = get("input.header"))
        cfg.header = config::parse_header(*v);
    if (auto v = get("output.dir"))
        cfg.out_dir = resolve(*v);
    if (auto v = get("detect.runs"))
        cfg.runs = config::parse_u32("runs", *v);
    if (auto v = get("detect.restarts"))
        cfg.restarts = config::parse_u32("restarts", *v);
    if (auto v = get("detect.schedule"))
        cfg.schedule = config::parse_schedule(*v);
    if (auto v = get("detect.max_sweeps"))
        cfg.max_sweeps = config::parse_u32("max_sweeps", *v);
    if (auto v = get("track.p_t"))
        cfg.tracker.p_t = config::parse_probability("track.p_t", *v);
    if (auto v = get("track.population"))
        cfg.tracker.population = config::parse_population(*v);
    if (auto v = get("track.direction"))
        cfg.tracker.direction = config::parse_direction(*v);
    if (auto v = get("track.roots")) {
        cfg.roots.clear();
        for (const auto& r : config::list(*v))
            cfg.roots.push_back(config::parse_root(r));
    }
    if (auto v = get("track.formats")) {
        cfg.formats.clear();
        for (const auto& f : config::list(*v))
            cfg.formats.push_back(parse_evolution_format(f));
    }
    if (auto v = get("enrich.p_t"))
        cfg.enrich.p_t = config::parse_probability("enrich.p_t", *v);
    if (auto v = get("enrich.draws"))
        cfg.enrich.draws = config::parse_draws(*v);
    if (auto v = get("enrich.categories"))
        cfg.enrich.categories = config::list(*v);
    if (auto v = get("synth.communities"))
        cfg.model.communities = config::parse_communities(*v);
    if (auto v = get("synth.p_in"))
        cfg.model.p_in = config::parse_real("p_in", *v);
    if (auto v = get("synth.p_out"))
        cfg.model.p_out = config::parse_real("p_out", *v);
    if (auto v = get("synth.periods"))
        cfg.script.periods = config::parse_u32("periods", *v);
    if (auto v = get("synth.churn"))
        cfg.script.churn = config::parse_real("churn", *v);
    if (auto v = get("synth.events")) {
        cfg.script.events.clear();
        for (const auto& e : config::list(*v, ';'))
            cfg.script.events.push_back(config::parse_event(e));
    }
    if (auto v = get("synth.first_label"))
        cfg.script.first_label = static_cast<std::int64_t>(config::parse_u64("first_label", *v));
    if (auto v = get("synth.attributes")) {
        cfg.synth_attributes.clear();
        for (const auto& a : config::list(*v))
            cfg.synth_attributes.push_back(config::parse_attribute_spec(a));
    }
    if (auto v = get("synth.plants")) {
        cfg.synth_plants.clear();
        for (const auto& a : config::list(*v))
            cfg.synth_plants.push_back(config::parse_plant(a));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Stages

namespace detail {

inline void ensure_dir(const std::filesystem::path& p) {
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec)
        throw InputError("cannot create directory " + p.string() + ": " + ec.message());
}

inline std::string run_file(std::uint32_t run) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%02u.csv", run);
    return buf;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + p.string());
    out << text;
}

/// What detect/summary.json says about the detection output.
struct DetectIndex {
    std::vector<std::string> periods;
    std::uint32_t runs = 0;
};

inline DetectIndex read_detect_index(const std::filesystem::path& out_dir) {
    auto path = out_dir / "detect" / "summary.json";
    std::ifstream in(path);
    if (!in)
        throw InputError("missing " + path.string() + " (run detect first)");
    DetectIndex idx;
    try {
        auto j = nlohmann::json::parse(in);
        idx.runs = j.at("runs").get<std::uint32_t>();
        for (const auto& p : j.at("periods"))
            idx.periods.push_back(p.at("period").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed " + path.string() + ": " + e.what());
    }
    return idx;
}

inline TimedPartitionSequence read_best_partitions(const std::filesystem::path& out_dir) {
    TimedPartitionSequence seq;
    for (const auto& period : read_detect_index(out_dir).periods)
        seq.push_back({period, read_partition(out_dir / "detect" / period / "best.csv")});
    return seq;
}

} // namespace detail

struct DetectPeriodSummary {
    std::string period;
    std::vector<RunResult> runs;
    std::size_t best = 0;
};

/// Per period: `runs` BRIM runs seeded from derive_key(seed, period index).
inline std::vector<DetectPeriodSummary> cmd_detect(const PipelineConfig& cfg, std::ostream& log) {
    if (cfg.manifest.empty())
        throw InputError("no manifest given");
    EdgeListOptions opt;
    opt.delimiter = cfg.delimiter;
    opt.header = cfg.header;
    auto series = load_series(load_manifest(cfg.manifest), opt);
    MultirunConfig mr;
    mr.runs = cfg.runs;
    mr.restarts_per_run = cfg.restarts;
    mr.schedule = cfg.schedule;
    mr.max_sweeps = cfg.max_sweeps;
    mr.threads = cfg.threads;

    const auto dir = cfg.out_dir / "detect";
    detail::ensure_dir(dir);
    std::vector<DetectPeriodSummary> out;
    nlohmann::json summary;
    summary["seed"] = cfg.seed;
    summary["runs"] = cfg.runs;
    summary["restarts_per_run"] = cfg.restarts;
    summary["schedule"] = config::to_string(cfg.schedule);
    summary["periods"] = nlohmann::json::array();
    std::ostringstream counts;
    counts << "period,mean,std,best,best_modularity\n";

    std::uint32_t t = 0;
    for (const auto& pg : series) {
        DetectPeriodSummary s;
        s.period = pg.label;
        s.runs = brim_multirun(pg.graph, mr, derive_key(cfg.seed, t++));
        s.best = best_run(s.runs);
        const auto pdir = dir / pg.label;
        detail::ensure_dir(pdir);
        nlohmann::json pj;
        pj["period"] = pg.label;
        pj["best_run"] = s.best;
        pj["runs"] = nlohmann::json::array();
        std::vector<double> nc;
        for (const auto& r : s.runs) {
            write_partition(label_partition(pg.graph, r.partition), pdir / detail::run_file(r.run_id));
            pj["runs"].push_back({{"run", r.run_id},
                                  {"modularity", r.modularity},
                                  {"seed", r.seed},
                                  {"iterations", r.iterations},
                                  {"communities", r.partition.communities}});
            nc.push_back(r.partition.communities);
        }
        write_partition(label_partition(pg.graph, s.runs[s.best].partition), pdir / "best.csv");
        summary["periods"].push_back(pj);

        const double mean = stats::pairwise_sum(nc) / static_cast<double>(nc.size());
        double sd = 0.0;
        if (nc.size() > 1) {
            std::vector<double> dev;
            for (auto x : nc)
                dev.push_back((x - mean) * (x - mean));
            sd = std::sqrt(stats::pairwise_sum(dev) / static_cast<double>(nc.size() - 1));
        }
        counts << pg.label << ',' << csv::format_double(mean) << ',' << csv::format_double(sd) << ','
               << s.runs[s.best].partition.communities << ','
               << csv::format_double(s.runs[s.best].modularity) << '\n';
        log << "detect " << pg.label << ": m=" << pg.graph.edge_count() << " best Q=" << s.runs[s.best].modularity
            << " communities=" << s.runs[s.best].partition.communities << '\n';
        out.push_back(std::move(s));
    }
    detail::write_text(dir / "summary.json", summary.dump(2) + "\n");
    detail::write_text(dir / "community_counts.csv", counts.str());
    return out;
}

/// All-pairs ARI between the detection runs of every period.
inline std::vector<std::pair<std::string, AriSummary>> cmd_ari(const PipelineConfig& cfg, std::ostream& log) {
    auto idx = detail::read_detect_index(cfg.out_dir);
    if (idx.runs < 2)
        throw InputError("ARI needs at least 2 runs per period, found " + std::to_string(idx.runs));
    std::vector<std::pair<std::string, AriSummary>> out;
    std::ostringstream csv_out;
    csv_out << "period,mean_ari,std_ari,pairs\n";
    for (const auto& period : idx.periods) {
        std::vector<LabeledPartition> parts;
        for (std::uint32_t r = 0; r < idx.runs; ++r)
            parts.push_back(read_partition(cfg.out_dir / "detect" / period / detail::run_file(r)));
        auto s = all_pairs_ari(parts, cfg.threads);
        csv_out << period << ',' << csv::format_double(s.mean) << ',' << csv::format_double(s.stddev) << ','
                << s.pairs << '\n';
        log << "ari " << period << ": mean=" << s.mean << " std=" << s.stddev << '\n';
        out.emplace_back(period, s);
    }
    detail::write_text(cfg.out_dir / "ari.csv", csv_out.str());
    return out;
}

/// Links best partitions of consecutive periods and exports the evolution
/// graph.
inline EvolutionGraph cmd_track(const PipelineConfig& cfg, std::ostream& log) {
    auto seq = detail::read_best_partitions(cfg.out_dir);
    if (seq.size() < 2)
        throw InputError("tracking needs at least 2 periods, found " + std::to_string(seq.size()));
    auto tracked = track_sequence(seq, cfg.tracker);
    auto graph = assemble_evolution(seq, tracked, cfg.tracker.direction, cfg.roots);
    const auto dir = cfg.out_dir / "track";
    detail::ensure_dir(dir);
    write_link_table(seq, tracked.links, dir / "links.csv");
    for (auto f : cfg.formats)
        export_evolution(graph, f, dir / (f == EvolutionFormat::dot ? "evolution.dot" : "evolution.json"));
    log << "track: p_B=" << tracked.p_B << " validated links=" << graph.edges.size() << '\n';
    return graph;
}

/// Over-expression tests on every period's best partition.
inline std::vector<EnrichmentResult> cmd_enrich(const PipelineConfig& cfg, std::ostream& log) {
    if (cfg.attributes.empty())
        throw InputError("no attribute catalog given");
    auto catalog = read_catalog(cfg.attributes);
    auto seq = detail::read_best_partitions(cfg.out_dir);
    std::vector<EnrichmentResult> results;
    std::vector<CommunityReport> reports;
    std::vector<EnrichmentRecord> records;
    std::vector<std::string> columns;
    for (const auto& pp : seq) {
        auto r = test_overexpression(pp.partition, catalog, cfg.enrich, pp.period);
        records.insert(records.end(), r.records.begin(), r.records.end());
        auto rep = community_report(pp.partition, r, pp.period);
        for (const auto& c : rep.categories)
            if (std::find(columns.begin(), columns.end(), c) == columns.end())
                columns.push_back(c);
        std::size_t validated = 0;
        for (const auto& rec : r.records)
            validated += rec.validated;
        log << "enrich " << pp.period << ": threshold=" << r.threshold << " validated=" << validated << '\n';
        reports.push_back(std::move(rep));
        results.push_back(std::move(r));
    }
    const auto dir = cfg.out_dir / "enrich";
    detail::ensure_dir(dir);
    write_enrichment_records(records, dir / "records.csv");
    // One table across periods; a category absent from a period leaves its cell empty.
    CommunityReport merged;
    merged.categories = columns;
    for (const auto& rep : reports)
        for (const auto& row : rep.rows) {
            ReportRow r = row;
            r.attributes.assign(columns.size(), "");
            for (std::size_t k = 0; k < rep.categories.size(); ++k)
                r.attributes[std::find(columns.begin(), columns.end(), rep.categories[k]) - columns.begin()] =
                    row.attributes[k];
            merged.rows.push_back(std::move(r));
        }
    std::ostringstream text;
    write_report(merged, text);
    detail::write_text(dir / "report.csv", text.str());
    return results;
}

/// Writes a synthetic dataset to `cfg.out_dir`: manifest.csv, per-period
/// edge and node lists, ground_truth.csv, lineage.csv and, when attribute
/// categories are configured, attributes.csv. Attribute plants refer to the
/// initial communities.
inline synth::SyntheticSequence cmd_synth(const PipelineConfig& cfg, std::ostream& log) {
    auto model = cfg.model;
    model.seed = cfg.seed;
    auto seq = synth::generate_sequence(model, cfg.script);
    const auto& dir = cfg.out_dir;
    detail::ensure_dir(dir);
    std::ostringstream manifest, truth, lineage;
    manifest << "period,edge_list,node_list\n";
    truth << "node_id,period,true_community\n";
    lineage << "period_t,community,period_t1,community_t1\n";
    std::size_t t = 0;
    for (const auto& pg : seq.series) {
        auto edges = "edges_" + pg.label + ".csv";
        auto nodes = "nodes_" + pg.label + ".csv";
        write_edge_list(pg.graph, dir / edges);
        write_node_list(pg.graph, dir / nodes);
        manifest << pg.label << ',' << edges << ',' << nodes << '\n';
        const auto& p = seq.truth[t];
        const auto& ids = seq.truth_ids[t];
        for (std::size_t i = 0; i < p.red.size(); ++i)
            truth << pg.graph.red_ids()[i] << ',' << pg.label << ',' << ids[p.red[i]] << '\n';
        for (std::size_t j = 0; j < p.blue.size(); ++j)
            truth << pg.graph.blue_ids()[j] << ',' << pg.label << ',' << ids[p.blue[j]] << '\n';
        ++t;
    }
    for (const auto& e : seq.lineage)
        lineage << seq.series[e.period].label << ',' << e.from << ',' << seq.series[e.period + 1].label << ','
                << e.to << '\n';
    detail::write_text(dir / "manifest.csv", manifest.str());
    detail::write_text(dir / "ground_truth.csv", truth.str());
    detail::write_text(dir / "lineage.csv", lineage.str());
    if (!cfg.synth_attributes.empty()) {
        auto cat = synth::generate_catalog(synth::initial_membership(model), cfg.synth_attributes, cfg.synth_plants,
                                           model.seed);
        write_catalog(cat, dir / "attributes.csv");
    }
    log << "synth: " << seq.series.size() << " periods, " << seq.lineage.size() << " lineage edges\n";
    return seq;
}

/// detect, then ari (when there are at least 2 runs), track (at least 2
/// periods) and enrich (when a catalog is given).
inline void cmd_pipeline(const PipelineConfig& cfg, std::ostream& log) {
    auto detected = cmd_detect(cfg, log);
    if (cfg.runs >= 2)
        cmd_ari(cfg, log);
    else
        log << "ari: skipped (fewer than 2 runs)\n";
    if (detected.size() >= 2)
        cmd_track(cfg, log);
    else
        log << "track: skipped (fewer than 2 periods)\n";
    if (!cfg.attributes.empty())
        cmd_enrich(cfg, log);
}

} // namespace bipcomm
