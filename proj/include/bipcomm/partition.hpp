#pragma once

#include <bipcomm/csv.hpp>
#include <bipcomm/errors.hpp>
#include <bipcomm/graph.hpp>

#include <algorithm>
#include <climits>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace bipcomm {

/// Community assignment of every node of one graph, by dense node index.
/// Communities may mix red and blue nodes.
struct Partition {
    std::vector<std::uint32_t> red;
    std::vector<std::uint32_t> blue;
    /// Labels lie in [0, communities).
    std::uint32_t communities = 0;

    std::uint32_t label(NodeRef n) const { return n.side == Side::red ? red[n.index] : blue[n.index]; }

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// Every node of the graph is labelled and every label is below `communities`.
inline void validate(const BipartiteGraph& g, const Partition& p) {
    if (p.red.size() != g.red_count() || p.blue.size() != g.blue_count())
        throw InputError("partition does not cover every node of the graph");
    auto bad = [&](std::uint32_t l) { return l >= p.communities; };
    if (std::any_of(p.red.begin(), p.red.end(), bad) || std::any_of(p.blue.begin(), p.blue.end(), bad))
        throw InputError("partition label out of range");
}

inline Partition single_community(const BipartiteGraph& g) {
    return {std::vector<std::uint32_t>(g.red_count(), 0), std::vector<std::uint32_t>(g.blue_count(), 0),
            g.node_count() > 0 ? 1u : 0u};
}

/// Drops empty labels, keeping the relative order of the used ones.
inline Partition compact(Partition p) {
    std::vector<std::uint32_t> remap(p.communities, 0);
    for (auto l : p.red)
        remap[l] = 1;
    for (auto l : p.blue)
        remap[l] = 1;
    std::uint32_t next = 0;
    for (auto& r : remap)
        r = r ? next++ : 0;
    for (auto& l : p.red)
        l = remap[l];
    for (auto& l : p.blue)
        l = remap[l];
    p.communities = next;
    return p;
}

/// Relabels communities by decreasing total size; ties go to the community
/// whose first member (red nodes first, then blue, by index) comes first.
inline Partition canonical(Partition p) {
    p = compact(std::move(p));
    const auto c = p.communities;
    std::vector<std::size_t> size(c, 0), first(c, SIZE_MAX);
    std::size_t pos = 0;
    for (auto l : p.red) {
        ++size[l];
        first[l] = std::min(first[l], pos++);
    }
    for (auto l : p.blue) {
        ++size[l];
        first[l] = std::min(first[l], pos++);
    }
    std::vector<std::uint32_t> order(c);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        return size[a] != size[b] ? size[a] > size[b] : first[a] < first[b];
    });
    std::vector<std::uint32_t> remap(c);
    for (std::uint32_t k = 0; k < c; ++k)
        remap[order[k]] = k;
    for (auto& l : p.red)
        l = remap[l];
    for (auto& l : p.blue)
        l = remap[l];
    return p;
}

// ---------------------------------------------------------------------------
// Identifier-keyed partitions: the on-disk and cross-period form.

struct LabeledNode {
    std::string id;
    Side side;
    std::uint32_t community;
    friend bool operator==(const LabeledNode&, const LabeledNode&) = default;
};

struct CommunitySize {
    std::size_t red = 0;
    std::size_t blue = 0;
    std::size_t total() const { return red + blue; }
};

/// Partition keyed by node identifier. Labels are contiguous 0..c-1.
struct LabeledPartition {
    std::vector<LabeledNode> nodes;
    std::uint32_t communities = 0;

    std::vector<CommunitySize> sizes() const {
        std::vector<CommunitySize> s(communities);
        for (const auto& n : nodes)
            (n.side == Side::red ? s[n.community].red : s[n.community].blue)++;
        return s;
    }

    friend bool operator==(const LabeledPartition&, const LabeledPartition&) = default;
};

inline LabeledPartition label_partition(const BipartiteGraph& g, const Partition& p) {
    validate(g, p);
    LabeledPartition out;
    out.communities = p.communities;
    out.nodes.reserve(g.node_count());
    for (std::uint32_t i = 0; i < g.red_count(); ++i)
        out.nodes.push_back({g.red_ids()[i], Side::red, p.red[i]});
    for (std::uint32_t j = 0; j < g.blue_count(); ++j)
        out.nodes.push_back({g.blue_ids()[j], Side::blue, p.blue[j]});
    return out;
}

/// Rejects duplicate identifiers and non-contiguous labels.
inline void validate(const LabeledPartition& lp) {
    std::vector<bool> used(lp.communities, false);
    std::unordered_set<std::string_view> seen;
    for (const auto& n : lp.nodes) {
        if (n.community >= lp.communities)
            throw InputError("community label out of range for node '" + n.id + "'");
        if (!seen.insert(n.id).second)
            throw InputError("node '" + n.id + "' assigned twice");
        used[n.community] = true;
    }
    if (std::find(used.begin(), used.end(), false) != used.end())
        throw InputError("community labels are not contiguous");
}

inline void write_partition(const LabeledPartition& lp, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << "node_id,side,community\n";
    for (const auto& n : lp.nodes)
        out << n.id << ',' << to_string(n.side) << ',' << n.community << '\n';
}

/// Reads `node_id,side,community` rows.
inline LabeledPartition read_partition(const std::filesystem::path& path) {
    LabeledPartition lp;
    bool first = true;
    std::uint32_t max_label = 0;
    csv::for_each_row(path.string(), ',', false, [&](const std::vector<std::string>& f, std::size_t line) {
        if (std::exchange(first, false) && !f.empty() && f[0] == "node_id")
            return;
        if (f.size() != 3)
            throw ParseError(path.string(), line, "expected node_id,side,community");
        auto side = parse_side(f[1]);
        if (!side)
            throw ParseError(path.string(), line, "unknown side '" + f[1] + "'");
        auto c = csv::parse_int(f[2], path.string(), line);
        if (c < 0 || c > UINT32_MAX - 1)
            throw ParseError(path.string(), line, "community label out of range");
        lp.nodes.push_back({f[0], *side, static_cast<std::uint32_t>(c)});
        max_label = std::max(max_label, static_cast<std::uint32_t>(c));
    });
    if (lp.nodes.empty())
        throw InputError("empty partition: " + path.string());
    lp.communities = max_label + 1;
    try {
        validate(lp);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return lp;
}

} // namespace bipcomm
