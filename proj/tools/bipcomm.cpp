// bipcomm: community detection, tracking and enrichment for bipartite
// networks observed over time.
//
// Exit codes: 0 success, 1 bad input or usage, 2 internal invariant failure.

#include <bipcomm/pipeline.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace bipcomm;

/// Flag values; each one, when given, replaces the config-file value.
struct Overrides {
    std::string config_file;
    std::optional<std::string> out, seed, threads;
    std::optional<std::string> manifest, delimiter, header, runs, restarts, schedule, max_sweeps;
    std::optional<std::string> p_t, population, direction;
    std::vector<std::string> roots, formats;
    std::optional<std::string> attributes, enrich_p_t, draws;
    std::vector<std::string> categories;
    std::optional<std::string> communities, p_in, p_out, periods, churn, first_label;
    std::vector<std::string> events, synth_attributes, plants;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("-c,--config", o.config_file, "INI configuration file")->check(CLI::ExistingFile);
    app->add_option("-o,--out", o.out, "output directory");
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

void add_detect(CLI::App* app, Overrides& o) {
    app->add_option("-m,--manifest", o.manifest, "period manifest CSV (period,edge_list[,node_list])");
    app->add_option("--delimiter", o.delimiter, "edge-list field separator (character or 'tab')");
    app->add_option("--header", o.header, "edge-list header row: auto, yes, no");
    app->add_option("--runs", o.runs, "independent runs per period");
    app->add_option("--restarts", o.restarts, "random restarts per run");
    app->add_option("--schedule", o.schedule, "initial module count: min_side, adaptive, fixed:<c>");
    app->add_option("--max-sweeps", o.max_sweeps, "sweep limit per restart");
}

void add_track(CLI::App* app, Overrides& o) {
    app->add_option("--p-t", o.p_t, "univariate threshold before Bonferroni correction");
    app->add_option("--population", o.population, "node population per period pair: union, intersection");
    app->add_option("--direction", o.direction, "links kept around roots: all, forward");
    app->add_option("--root", o.roots, "evolution root <period>:<community> (repeatable)");
    app->add_option("--format", o.formats, "evolution graph format: dot, json (repeatable)");
}

void add_enrich(CLI::App* app, Overrides& o) {
    app->add_option("-a,--attributes", o.attributes, "attribute catalog CSV (node_id,category,value)");
    app->add_option("--enrich-p-t", o.enrich_p_t, "univariate threshold for over-expression");
    app->add_option("--draws", o.draws, "hypergeometric draw basis: covered, community");
    app->add_option("--category", o.categories, "category to test (repeatable; default all)");
}

void add_synth(CLI::App* app, Overrides& o) {
    app->add_option("--communities", o.communities, "planted communities, e.g. 4*10x30 or 5x10,8x20");
    app->add_option("--p-in", o.p_in, "edge probability inside a community");
    app->add_option("--p-out", o.p_out, "edge probability between communities");
    app->add_option("--periods", o.periods, "number of periods");
    app->add_option("--churn", o.churn, "per-period probability that a node changes community");
    app->add_option("--event", o.events, "split:<period>:<c> or merge:<period>:<into>:<from> (repeatable)");
    app->add_option("--first-label", o.first_label, "label of the first period");
    app->add_option("--attribute", o.synth_attributes, "attribute category <name>:<red|blue>:<values>");
    app->add_option("--plant", o.plants, "planted value <category>:<value>:<community>:<penetration>");
}

PipelineConfig resolve(const Overrides& o) {
    PipelineConfig cfg = o.config_file.empty() ? PipelineConfig{} : load_config(o.config_file);
    if (o.out)
        cfg.out_dir = *o.out;
    if (o.seed)
        cfg.seed = config::parse_u64("seed", *o.seed);
    if (o.threads)
        cfg.threads = config::parse_u32("threads", *o.threads);
    if (o.manifest)
        cfg.manifest = *o.manifest;
    if (o.delimiter)
        cfg.delimiter = config::parse_delimiter(*o.delimiter);
    if (o.header)
        cfg.header = config::parse_header(*o.header);
    if (o.runs)
        cfg.runs = config::parse_u32("runs", *o.runs);
    if (o.restarts)
        cfg.restarts = config::parse_u32("restarts", *o.restarts);
    if (o.schedule)
        cfg.schedule = config::parse_schedule(*o.schedule);
    if (o.max_sweeps)
        cfg.max_sweeps = config::parse_u32("max_sweeps", *o.max_sweeps);
    if (o.p_t)
        cfg.tracker.p_t = config::parse_probability("p_t", *o.p_t);
    if (o.population)
        cfg.tracker.population = config::parse_population(*o.population);
    if (o.direction)
        cfg.tracker.direction = config::parse_direction(*o.direction);
    if (!o.roots.empty()) {
        cfg.roots.clear();
        for (const auto& r : o.roots)
            cfg.roots.push_back(config::parse_root(r));
    }
    if (!o.formats.empty()) {
        cfg.formats.clear();
        for (const auto& f : o.formats)
            cfg.formats.push_back(parse_evolution_format(f));
    }
    if (o.attributes)
        cfg.attributes = *o.attributes;
    if (o.enrich_p_t)
        cfg.enrich.p_t = config::parse_probability("enrich_p_t", *o.enrich_p_t);
    if (o.draws)
        cfg.enrich.draws = config::parse_draws(*o.draws);
    if (!o.categories.empty())
        cfg.enrich.categories = o.categories;
    if (o.communities)
        cfg.model.communities = config::parse_communities(*o.communities);
    if (o.p_in)
        cfg.model.p_in = config::parse_real("p_in", *o.p_in);
    if (o.p_out)
        cfg.model.p_out = config::parse_real("p_out", *o.p_out);
    if (o.periods)
        cfg.script.periods = config::parse_u32("periods", *o.periods);
    if (o.churn)
        cfg.script.churn = config::parse_real("churn", *o.churn);
    if (!o.events.empty()) {
        cfg.script.events.clear();
        for (const auto& e : o.events)
            cfg.script.events.push_back(config::parse_event(e));
    }
    if (o.first_label)
        cfg.script.first_label = static_cast<std::int64_t>(config::parse_u64("first_label", *o.first_label));
    if (!o.synth_attributes.empty()) {
        cfg.synth_attributes.clear();
        for (const auto& a : o.synth_attributes)
            cfg.synth_attributes.push_back(config::parse_attribute_spec(a));
    }
    if (!o.plants.empty()) {
        cfg.synth_plants.clear();
        for (const auto& p : o.plants)
            cfg.synth_plants.push_back(config::parse_plant(p));
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Community detection, tracking and enrichment for bipartite networks over time"};
    app.require_subcommand(1);
    Overrides o;

    auto* detect = app.add_subcommand("detect", "BRIM runs per period; writes partitions and community counts");
    add_common(detect, o);
    add_detect(detect, o);

    auto* ari = app.add_subcommand("ari", "all-pairs adjusted Rand index between the detection runs");
    add_common(ari, o);

    auto* track = app.add_subcommand("track", "validated links between consecutive best partitions");
    add_common(track, o);
    add_track(track, o);

    auto* enrich = app.add_subcommand("enrich", "attribute over-expression per community");
    add_common(enrich, o);
    add_enrich(enrich, o);

    auto* synth = app.add_subcommand("synth", "write a synthetic planted-partition dataset");
    add_common(synth, o);
    add_synth(synth, o);

    auto* pipeline = app.add_subcommand("pipeline", "detect, ari, track and enrich in sequence");
    add_common(pipeline, o);
    add_detect(pipeline, o);
    add_track(pipeline, o);
    add_enrich(pipeline, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const auto cfg = resolve(o);
        if (detect->parsed())
            cmd_detect(cfg, std::cerr);
        else if (ari->parsed())
            cmd_ari(cfg, std::cerr);
        else if (track->parsed())
            cmd_track(cfg, std::cerr);
        else if (enrich->parsed())
            cmd_enrich(cfg, std::cerr);
        else if (synth->parsed())
            cmd_synth(cfg, std::cerr);
        else if (pipeline->parsed())
            cmd_pipeline(cfg, std::cerr);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const InvariantViolation& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
