#pragma once

#include <bipcomm/brim.hpp>
#include <bipcomm/enrichment.hpp>
#include <bipcomm/errors.hpp>
#include <bipcomm/graph.hpp>
#include <bipcomm/partition.hpp>
#include <bipcomm/random.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace bipcomm::synth {

// Random streams. Every draw comes from a CounterRng whose key is derived
// from the master seed:
//   period key    P_t = derive_key(seed, t)
//   edge stream   derive_key(P_t, red_index), counter = blue_index
//   churn stream  derive_key(derive_key(P_t, churn_tag), node), counter 0 = coin, 1 = target
//   attributes    derive_key(derive_key(seed, attribute_tag), node), counter 2*category (+1)
// Nodes are numbered red first, then blue.
inline constexpr std::uint64_t churn_tag = 0x636875726eULL;      // "churn"
inline constexpr std::uint64_t attribute_tag = 0x6174747273ULL; // "attrs"

struct CommunitySpec {
    std::uint32_t red = 0;
    std::uint32_t blue = 0;
};

/// Planted-partition bipartite model: edges inside a community appear with
/// probability p_in, all other red-blue pairs with p_out.
struct PlantedModel {
    std::vector<CommunitySpec> communities;
    double p_in = 0.5;
    double p_out = 0.01;
    std::uint64_t seed = 0;

    void validate() const {
        if (communities.empty())
            throw InputError("planted model needs at least one community");
        for (const auto& c : communities)
            if (c.red == 0 || c.blue == 0)
                throw InputError("planted community sides must have at least one node");
        if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0))
            throw InputError("planted model needs 0 <= p_out <= p_in <= 1");
    }

    std::uint32_t red_total() const {
        std::uint32_t n = 0;
        for (const auto& c : communities)
            n += c.red;
        return n;
    }
    std::uint32_t blue_total() const {
        std::uint32_t n = 0;
        for (const auto& c : communities)
            n += c.blue;
        return n;
    }
};

inline std::string red_id(std::uint32_t i) { return "b" + std::to_string(i); }
inline std::string blue_id(std::uint32_t j) { return "f" + std::to_string(j); }

/// Membership by persistent community id, per node.
struct Membership {
    std::vector<std::uint32_t> red;
    std::vector<std::uint32_t> blue;
};

inline Membership initial_membership(const PlantedModel& m) {
    Membership mem;
    for (std::uint32_t c = 0; c < m.communities.size(); ++c) {
        mem.red.insert(mem.red.end(), m.communities[c].red, c);
        mem.blue.insert(mem.blue.end(), m.communities[c].blue, c);
    }
    return mem;
}

/// Draws one period's edges for a fixed membership.
inline BipartiteGraph draw_graph(const Membership& mem, double p_in, double p_out, std::uint64_t period_key) {
    GraphBuilder b;
    for (std::uint32_t i = 0; i < mem.red.size(); ++i)
        b.add_red(red_id(i));
    for (std::uint32_t j = 0; j < mem.blue.size(); ++j)
        b.add_blue(blue_id(j));
    for (std::uint32_t i = 0; i < mem.red.size(); ++i) {
        CounterRng rng(derive_key(period_key, i));
        for (std::uint32_t j = 0; j < mem.blue.size(); ++j) {
            double p = mem.red[i] == mem.blue[j] ? p_in : p_out;
            if (CounterRng::to_unit(rng.at(j)) < p)
                b.add_edge(i, j);
        }
    }
    return std::move(b).build();
}

/// Relabels persistent ids to contiguous labels (ascending id order).
/// Returns the partition and, per label, its persistent id.
inline std::pair<Partition, std::vector<std::uint32_t>> to_partition(const Membership& mem) {
    std::vector<std::uint32_t> ids(mem.red);
    ids.insert(ids.end(), mem.blue.begin(), mem.blue.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::map<std::uint32_t, std::uint32_t> label;
    for (std::uint32_t k = 0; k < ids.size(); ++k)
        label[ids[k]] = k;
    Partition p;
    p.communities = static_cast<std::uint32_t>(ids.size());
    for (auto c : mem.red)
        p.red.push_back(label[c]);
    for (auto c : mem.blue)
        p.blue.push_back(label[c]);
    return {std::move(p), std::move(ids)};
}

struct PlantedGraph {
    BipartiteGraph graph;
    Partition truth;
};

inline PlantedGraph generate_graph(const PlantedModel& m) {
    m.validate();
    auto mem = initial_membership(m);
    return {draw_graph(mem, m.p_in, m.p_out, derive_key(m.seed, 0)), to_partition(mem).first};
}

// ---------------------------------------------------------------------------
// Temporal sequences

struct ScriptEvent {
    enum class Kind { split, merge };
    Kind kind = Kind::split;
    /// Period index (>= 1) at which the event is visible.
    std::uint32_t period = 1;
    /// split: the community that splits. merge: the absorbing community.
    std::uint32_t community = 0;
    /// merge only: the community absorbed into `community`.
    std::uint32_t other = 0;

    static ScriptEvent split(std::uint32_t period, std::uint32_t c) { return {Kind::split, period, c, 0}; }
    static ScriptEvent merge(std::uint32_t period, std::uint32_t into, std::uint32_t from) {
        return {Kind::merge, period, into, from};
    }
};

struct TemporalScript {
    std::uint32_t periods = 1;
    /// Per-period probability that a node moves to another community.
    double churn = 0.0;
    std::vector<ScriptEvent> events;
    /// Period labels start here and increase by one.
    std::int64_t first_label = 0;
};

/// Ground-truth community-to-community link between consecutive periods,
/// in persistent community ids.
struct LineageEdge {
    std::uint32_t period = 0; // from period index; to is period + 1
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    auto operator<=>(const LineageEdge&) const = default;
};

struct SyntheticSequence {
    PeriodGraphSeries series;
    /// Per period: ground truth with contiguous labels, and the persistent
    /// id of every label.
    std::vector<Partition> truth;
    std::vector<std::vector<std::uint32_t>> truth_ids;
    std::vector<LineageEdge> lineage;
};

/// Evolves the planted memberships period by period: churn first (each node
/// independently, to a uniformly chosen other live community), then the
/// scripted events. A split moves the second half (by node index, per side)
/// of a community into a fresh id; a merge moves every member of `other`
/// into `community`. Edges are redrawn every period.
inline SyntheticSequence generate_sequence(const PlantedModel& m, const TemporalScript& script) {
    m.validate();
    if (script.periods == 0)
        throw InputError("script needs at least one period");
    if (!(script.churn >= 0.0 && script.churn < 1.0))
        throw InputError("churn must lie in [0, 1)");
    for (const auto& e : script.events)
        if (e.period == 0 || e.period >= script.periods)
            throw InputError("scripted event outside periods 1.." + std::to_string(script.periods - 1));

    SyntheticSequence out;
    auto mem = initial_membership(m);
    std::vector<std::uint32_t> alive(m.communities.size());
    std::iota(alive.begin(), alive.end(), 0u);
    std::uint32_t next_id = static_cast<std::uint32_t>(m.communities.size());
    const auto n_red = static_cast<std::uint32_t>(mem.red.size());

    for (std::uint32_t t = 0; t < script.periods; ++t) {
        const auto period_key = derive_key(m.seed, t);
        std::vector<LineageEdge> step;
        if (t > 0) {
            for (auto c : alive)
                step.push_back({t - 1, c, c});
            if (script.churn > 0.0 && alive.size() > 1) {
                const auto churn_key = derive_key(period_key, churn_tag);
                auto move = [&](std::uint32_t& label, std::uint32_t node) {
                    CounterRng rng(derive_key(churn_key, node));
                    if (CounterRng::to_unit(rng.at(0)) >= script.churn)
                        return;
                    auto k = CounterRng::scale(rng.at(1), alive.size() - 1);
                    auto self = std::find(alive.begin(), alive.end(), label) - alive.begin();
                    label = alive[k >= static_cast<std::uint64_t>(self) ? k + 1 : k];
                };
                for (std::uint32_t i = 0; i < mem.red.size(); ++i)
                    move(mem.red[i], i);
                for (std::uint32_t j = 0; j < mem.blue.size(); ++j)
                    move(mem.blue[j], n_red + j);
            }
            for (const auto& e : script.events) {
                if (e.period != t)
                    continue;
                auto live = [&](std::uint32_t c) { return std::find(alive.begin(), alive.end(), c) != alive.end(); };
                if (!live(e.community) || (e.kind == ScriptEvent::Kind::merge && (!live(e.other) || e.other == e.community)))
                    throw InputError("scripted event at period " + std::to_string(t) +
                                     " references a community that does not exist");
                if (e.kind == ScriptEvent::Kind::split) {
                    auto fresh = next_id++;
                    for (auto* side : {&mem.red, &mem.blue}) {
                        std::vector<std::uint32_t> members;
                        for (std::uint32_t k = 0; k < side->size(); ++k)
                            if ((*side)[k] == e.community)
                                members.push_back(k);
                        for (std::size_t k = members.size() / 2; k < members.size(); ++k)
                            (*side)[members[k]] = fresh;
                    }
                    alive.push_back(fresh);
                    step.push_back({t - 1, e.community, fresh});
                } else {
                    for (auto* side : {&mem.red, &mem.blue})
                        for (auto& l : *side)
                            if (l == e.other)
                                l = e.community;
                    alive.erase(std::find(alive.begin(), alive.end(), e.other));
                    for (auto& s : step)
                        if (s.from == e.other && s.to == e.other)
                            s.to = e.community;
                }
            }
            // Churn can empty a community; it then has no successor.
            std::vector<std::uint32_t> present;
            for (auto c : alive)
                if (std::count(mem.red.begin(), mem.red.end(), c) + std::count(mem.blue.begin(), mem.blue.end(), c) > 0)
                    present.push_back(c);
            alive = present;
            for (const auto& s : step)
                if (std::find(alive.begin(), alive.end(), s.to) != alive.end())
                    out.lineage.push_back(s);
        }
        auto [truth, ids] = to_partition(mem);
        out.series.push_back(std::to_string(script.first_label + t), draw_graph(mem, m.p_in, m.p_out, period_key));
        out.truth.push_back(std::move(truth));
        out.truth_ids.push_back(std::move(ids));
    }
    std::sort(out.lineage.begin(), out.lineage.end());
    out.lineage.erase(std::unique(out.lineage.begin(), out.lineage.end()), out.lineage.end());
    return out;
}

// ---------------------------------------------------------------------------
// Attributes

struct AttributeSpec {
    std::string category;
    Side side = Side::blue;
    /// Base values are named `<category>_<k>`, k < values, drawn uniformly.
    std::uint32_t values = 1;
};

/// Gives `value` to each member of `community` (on the category's side)
/// with probability `penetration`; other draws fall back to the base law.
struct AttributePlant {
    std::string category;
    std::string value;
    std::uint32_t community = 0;
    double penetration = 1.0;
};

inline AttributeCatalog generate_catalog(const Membership& mem, const std::vector<AttributeSpec>& specs,
                                         const std::vector<AttributePlant>& plants, std::uint64_t seed) {
    AttributeCatalog cat;
    const auto key = derive_key(seed, attribute_tag);
    const auto n_red = static_cast<std::uint32_t>(mem.red.size());
    for (std::uint32_t s = 0; s < specs.size(); ++s) {
        const auto& spec = specs[s];
        if (spec.values == 0)
            throw InputError("attribute category '" + spec.category + "' needs at least one value");
        const auto& labels = spec.side == Side::red ? mem.red : mem.blue;
        for (std::uint32_t k = 0; k < labels.size(); ++k) {
            auto node = spec.side == Side::red ? k : n_red + k;
            CounterRng rng(derive_key(key, node));
            std::string value;
            for (const auto& p : plants)
                if (p.category == spec.category && p.community == labels[k] &&
                    CounterRng::to_unit(rng.at(2 * s)) < p.penetration)
                    value = p.value;
            if (value.empty())
                value = spec.category + "_" + std::to_string(CounterRng::scale(rng.at(2 * s + 1), spec.values));
            cat.set(spec.side == Side::red ? red_id(k) : blue_id(k), spec.category, value);
        }
    }
    return cat;
}

// ---------------------------------------------------------------------------
// Exhaustive optimum

inline constexpr std::size_t exhaustive_node_cap = 12;

struct OracleResult {
    double best_modularity = 0.0;
    Partition best_partition;
};

/// Maximum bipartite modularity over every set partition of the nodes
/// (restricted growth strings, red nodes first). The first maximizer found
/// is returned. At most 12 nodes.
inline OracleResult exhaustive_modularity_oracle(const BipartiteGraph& g) {
    const auto n = g.node_count();
    if (n > exhaustive_node_cap)
        throw InputError("exhaustive search is limited to " + std::to_string(exhaustive_node_cap) + " nodes");
    if (g.edge_count() == 0)
        throw InputError("modularity undefined for a graph without edges");
    const auto p = g.red_count();
    std::vector<std::uint32_t> rgs(n, 0), maxpre(n, 0);
    Partition cur;
    cur.red.assign(p, 0);
    cur.blue.assign(g.blue_count(), 0);
    OracleResult best;
    std::int64_t best_num = 0;
    bool have = false;
    for (;;) {
        std::uint32_t used = 0;
        for (std::size_t k = 0; k < n; ++k) {
            (k < p ? cur.red[k] : cur.blue[k - p]) = rgs[k];
            used = std::max(used, rgs[k] + 1);
        }
        cur.communities = used;
        auto num = detail::modularity_numerator(g, cur);
        if (!have || num > best_num) {
            have = true;
            best_num = num;
            best.best_partition = cur;
        }
        // next restricted growth string: rgs[k] <= 1 + max(rgs[0..k-1])
        std::size_t k = n;
        while (k-- > 1) {
            if (rgs[k] <= maxpre[k]) {
                ++rgs[k];
                for (std::size_t r = k + 1; r < n; ++r) {
                    rgs[r] = 0;
                    maxpre[r] = std::max(maxpre[r - 1], rgs[r - 1]);
                }
                break;
            }
        }
        if (k == 0)
            break;
    }
    best.best_modularity = detail::to_modularity(best_num, g);
    return best;
}

} // namespace bipcomm::synth
