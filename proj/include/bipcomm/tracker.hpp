#pragma once

#include <bipcomm/csv.hpp>
#include <bipcomm/errors.hpp>
#include <bipcomm/metrics.hpp>
#include <bipcomm/partition.hpp>
#include <bipcomm/stats.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <vector>

namespace bipcomm {

struct PeriodPartition {
    std::string period;
    LabeledPartition partition;
};

/// Chosen partitions in time order.
using TimedPartitionSequence = std::vector<PeriodPartition>;

/// Which vertices make up N^{t,t+1}.
enum class PopulationRule {
    /// Distinct identifiers present in either period; community sizes count
    /// all members.
    union_of_periods,
    /// Identifiers present in both periods; community sizes count only
    /// those shared members.
    intersection,
};

enum class DirectionFilter { all, forward_only };

struct TrackerConfig {
    double p_t = 0.01;
    PopulationRule population = PopulationRule::union_of_periods;
    DirectionFilter direction = DirectionFilter::all;
};

/// A community within the sequence: period index and label.
struct CommunityRef {
    std::size_t period = 0;
    std::uint32_t community = 0;
    auto operator<=>(const CommunityRef&) const = default;
};

struct TemporalLink {
    CommunityRef from;
    CommunityRef to;
    std::int64_t overlap = 0;
    double p_value = 1.0;
    bool validated = false;
    friend bool operator==(const TemporalLink&, const TemporalLink&) = default;
};

inline std::int64_t population_size(const LabeledPartition& a, const LabeledPartition& b, PopulationRule rule) {
    std::unordered_set<std::string_view> ids;
    for (const auto& n : a.nodes)
        ids.insert(n.id);
    if (rule == PopulationRule::union_of_periods) {
        for (const auto& n : b.nodes)
            ids.insert(n.id);
        return static_cast<std::int64_t>(ids.size());
    }
    std::int64_t shared = 0;
    for (const auto& n : b.nodes)
        shared += ids.count(n.id);
    return shared;
}

/// Tests every community pair (i of `a`, j of `b`) for over-expressed
/// overlap: p_ij = P(X >= n_ij) with X ~ H(. | population, n_i, n_j).
/// Every pair is returned; those with p_ij < threshold are validated.
/// Links are ordered by i, then j, and carry period indices t and t+1.
inline std::vector<TemporalLink> track_pair(const LabeledPartition& a, const LabeledPartition& b,
                                            std::int64_t population, double threshold,
                                            PopulationRule rule = PopulationRule::union_of_periods,
                                            std::size_t period = 0) {
    if (a.nodes.empty() || b.nodes.empty() || a.communities == 0 || b.communities == 0)
        throw InputError("track_pair: empty partition");
    std::vector<std::int64_t> size_a(a.communities, 0), size_b(b.communities, 0);
    ContingencyTable t;
    if (rule == PopulationRule::union_of_periods) {
        for (const auto& n : a.nodes)
            ++size_a[n.community];
        for (const auto& n : b.nodes)
            ++size_b[n.community];
        try {
            t = contingency(a, b);
        } catch (const InputError&) {
            t = ContingencyTable{};
            t.rows = a.communities;
            t.cols = b.communities;
            t.counts.assign(std::size_t{t.rows} * t.cols, 0);
        }
    } else {
        t = contingency(a, b);
        size_a = t.row_sums;
        size_b = t.col_sums;
    }
    for (auto s : size_a)
        if (s > population)
            throw InputError("community of period t larger than the population");
    for (auto s : size_b)
        if (s > population)
            throw InputError("community of period t+1 larger than the population");

    std::vector<TemporalLink> links;
    links.reserve(std::size_t{a.communities} * b.communities);
    for (std::uint32_t i = 0; i < a.communities; ++i) {
        for (std::uint32_t j = 0; j < b.communities; ++j) {
            TemporalLink l;
            l.from = {period, i};
            l.to = {period + 1, j};
            l.overlap = t.at(i, j);
            l.p_value = stats::overlap_pvalue(l.overlap, {population, size_a[i], size_b[j]});
            l.validated = l.overlap > 0 && l.p_value < threshold;
            links.push_back(l);
        }
    }
    return links;
}

/// p_B = p_t / sum_t N_t N_{t+1}, with N_t the community count of period t.
inline double sequence_bonferroni(const std::vector<std::uint32_t>& community_counts, double p_t) {
    if (community_counts.size() < 2)
        throw InputError("Bonferroni threshold needs at least 2 periods");
    std::uint64_t tests = 0;
    for (std::size_t t = 0; t < community_counts.size(); ++t) {
        if (community_counts[t] == 0)
            throw InputError("period " + std::to_string(t) + " has no communities");
        if (t + 1 < community_counts.size())
            tests += std::uint64_t{community_counts[t]} * community_counts[t + 1];
    }
    return stats::bonferroni_threshold(p_t, tests);
}

inline double sequence_bonferroni(const TimedPartitionSequence& seq, double p_t) {
    std::vector<std::uint32_t> counts;
    for (const auto& pp : seq)
        counts.push_back(pp.partition.communities);
    return sequence_bonferroni(counts, p_t);
}

struct SequenceLinks {
    double p_B = 0.0;
    /// All tested pairs, period by period.
    std::vector<TemporalLink> links;
};

/// Runs track_pair on every consecutive pair against the global p_B.
inline SequenceLinks track_sequence(const TimedPartitionSequence& seq, const TrackerConfig& cfg) {
    SequenceLinks out;
    out.p_B = sequence_bonferroni(seq, cfg.p_t);
    for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
        const auto& a = seq[t].partition;
        const auto& b = seq[t + 1].partition;
        auto links = track_pair(a, b, population_size(a, b, cfg.population), out.p_B, cfg.population, t);
        out.links.insert(out.links.end(), links.begin(), links.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evolution graph

struct EvolutionNode {
    CommunityRef ref;
    std::size_t size = 0;
    /// Rendered symbol size: natural log of the community size.
    double display_size() const { return std::log(static_cast<double>(size)); }
    friend bool operator==(const EvolutionNode&, const EvolutionNode&) = default;
};

/// Time-ordered DAG of validated links between consecutive periods.
struct EvolutionGraph {
    std::vector<std::string> periods;
    double p_B = 0.0;
    std::vector<EvolutionNode> nodes; // sorted by (period, community)
    std::vector<TemporalLink> edges;  // validated only, sorted by (from, to)

    std::string node_name(const CommunityRef& r) const {
        return std::to_string(r.community) + "_" + periods.at(r.period);
    }
};

/// A traversal root given by period label and community label.
struct RootSpec {
    std::string period;
    std::uint32_t community = 0;
};

/// Keeps the validated links of `links`. Without roots, every community is a
/// node. With roots, communities reachable forward in time from them are
/// kept; `forward_only` retains only links leaving reachable communities,
/// `all` also retains validated links entering them from other communities.
inline EvolutionGraph assemble_evolution(const TimedPartitionSequence& seq, const SequenceLinks& tracked,
                                         DirectionFilter direction, const std::vector<RootSpec>& roots = {}) {
    EvolutionGraph g;
    g.p_B = tracked.p_B;
    std::vector<std::vector<CommunitySize>> sizes;
    for (const auto& pp : seq) {
        g.periods.push_back(pp.period);
        sizes.push_back(pp.partition.sizes());
    }
    std::vector<TemporalLink> validated;
    for (const auto& l : tracked.links) {
        if (!l.validated)
            continue;
        if (l.to.period != l.from.period + 1)
            throw InvariantViolation("temporal link skips a period");
        validated.push_back(l);
    }
    std::sort(validated.begin(), validated.end(),
              [](const auto& x, const auto& y) { return std::tie(x.from, x.to) < std::tie(y.from, y.to); });

    std::set<CommunityRef> keep;
    if (roots.empty()) {
        for (std::size_t t = 0; t < seq.size(); ++t)
            for (std::uint32_t c = 0; c < seq[t].partition.communities; ++c)
                keep.insert({t, c});
        g.edges = validated;
    } else {
        std::map<CommunityRef, std::vector<CommunityRef>> out_edges;
        for (const auto& l : validated)
            out_edges[l.from].push_back(l.to);
        std::set<CommunityRef> reached;
        std::deque<CommunityRef> frontier;
        for (const auto& r : roots) {
            auto it = std::find(g.periods.begin(), g.periods.end(), r.period);
            if (it == g.periods.end())
                throw InputError("root period '" + r.period + "' not in the sequence");
            CommunityRef ref{static_cast<std::size_t>(it - g.periods.begin()), r.community};
            if (r.community >= seq[ref.period].partition.communities)
                throw InputError("root community " + std::to_string(r.community) + " not present in period '" +
                                 r.period + "'");
            if (reached.insert(ref).second)
                frontier.push_back(ref);
        }
        while (!frontier.empty()) {
            auto cur = frontier.front();
            frontier.pop_front();
            for (const auto& nxt : out_edges[cur])
                if (reached.insert(nxt).second)
                    frontier.push_back(nxt);
        }
        keep = reached;
        for (const auto& l : validated) {
            bool from_in = reached.count(l.from) > 0;
            bool to_in = reached.count(l.to) > 0;
            if (from_in || (direction == DirectionFilter::all && to_in)) {
                g.edges.push_back(l);
                keep.insert(l.from);
                keep.insert(l.to);
            }
        }
    }
    for (const auto& r : keep)
        g.nodes.push_back({r, sizes[r.period][r.community].total()});
    return g;
}

inline EvolutionGraph build_evolution_graph(const TimedPartitionSequence& seq, const TrackerConfig& cfg,
                                            const std::vector<RootSpec>& roots = {}) {
    return assemble_evolution(seq, track_sequence(seq, cfg), cfg.direction, roots);
}

// ---------------------------------------------------------------------------
// Export

enum class EvolutionFormat { dot, json };

inline EvolutionFormat parse_evolution_format(std::string_view token) {
    if (token == "dot")
        return EvolutionFormat::dot;
    if (token == "json")
        return EvolutionFormat::json;
    throw InputError("unsupported evolution format '" + std::string(token) + "' (expected dot or json)");
}

inline std::string to_dot(const EvolutionGraph& g) {
    std::ostringstream out;
    out << "digraph evolution {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle, fixedsize=true];\n";
    for (const auto& n : g.nodes) {
        auto name = g.node_name(n.ref);
        auto s = csv::format_double(n.display_size());
        out << "  \"" << name << "\" [label=\"" << name << "\", width=" << s << ", height=" << s
            << ", community_size=" << n.size << "];\n";
    }
    for (const auto& e : g.edges)
        out << "  \"" << g.node_name(e.from) << "\" -> \"" << g.node_name(e.to) << "\" [overlap=" << e.overlap
            << ", p_value=\"" << csv::format_double(e.p_value) << "\"];\n";
    out << "}\n";
    return out.str();
}

inline nlohmann::json to_json(const EvolutionGraph& g) {
    nlohmann::json j;
    j["periods"] = g.periods;
    j["p_B"] = g.p_B;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : g.nodes)
        j["nodes"].push_back({{"id", g.node_name(n.ref)},
                              {"period", g.periods[n.ref.period]},
                              {"community", n.ref.community},
                              {"size", n.size},
                              {"log_size", n.display_size()}});
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({{"from", g.node_name(e.from)},
                              {"to", g.node_name(e.to)},
                              {"from_period", g.periods[e.from.period]},
                              {"from_community", e.from.community},
                              {"to_period", g.periods[e.to.period]},
                              {"to_community", e.to.community},
                              {"overlap", e.overlap},
                              {"p_value", e.p_value}});
    return j;
}

inline EvolutionGraph evolution_from_json(const nlohmann::json& j) {
    EvolutionGraph g;
    try {
        g.periods = j.at("periods").get<std::vector<std::string>>();
        g.p_B = j.at("p_B").get<double>();
        auto index = [&](const std::string& p) {
            auto it = std::find(g.periods.begin(), g.periods.end(), p);
            if (it == g.periods.end())
                throw InputError("unknown period '" + p + "' in evolution JSON");
            return static_cast<std::size_t>(it - g.periods.begin());
        };
        for (const auto& n : j.at("nodes"))
            g.nodes.push_back({{index(n.at("period").get<std::string>()), n.at("community").get<std::uint32_t>()},
                               n.at("size").get<std::size_t>()});
        for (const auto& e : j.at("edges")) {
            TemporalLink l;
            l.from = {index(e.at("from_period").get<std::string>()), e.at("from_community").get<std::uint32_t>()};
            l.to = {index(e.at("to_period").get<std::string>()), e.at("to_community").get<std::uint32_t>()};
            l.overlap = e.at("overlap").get<std::int64_t>();
            l.p_value = e.at("p_value").get<double>();
            l.validated = true;
            g.edges.push_back(l);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed evolution JSON: ") + e.what());
    }
    return g;
}

inline void export_evolution(const EvolutionGraph& g, EvolutionFormat format, const std::filesystem::path& path) {
    if (g.nodes.empty())
        throw InputError("evolution graph is empty");
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    if (format == EvolutionFormat::dot)
        out << to_dot(g);
    else
        out << to_json(g).dump(2) << '\n';
}

/// CSV `period_t,comm_i,period_t1,comm_j,overlap,p_value,validated`.
inline void write_link_table(const TimedPartitionSequence& seq, const std::vector<TemporalLink>& links,
                             const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << "period_t,comm_i,period_t1,comm_j,overlap,p_value,validated\n";
    for (const auto& l : links)
        out << seq.at(l.from.period).period << ',' << l.from.community << ',' << seq.at(l.to.period).period << ','
            << l.to.community << ',' << l.overlap << ',' << csv::format_double(l.p_value) << ','
            << (l.validated ? 1 : 0) << '\n';
}

} // namespace bipcomm
