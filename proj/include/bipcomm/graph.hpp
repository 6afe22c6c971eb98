#pragma once

#include <bipcomm/csv.hpp>
#include <bipcomm/errors.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace bipcomm {

/// Red nodes are banks, blue nodes are firms.
enum class Side : std::uint8_t { red, blue };

inline std::string_view to_string(Side s) { return s == Side::red ? "red" : "blue"; }

/// Accepts red/blue and the bank/firm aliases.
inline std::optional<Side> parse_side(std::string_view s) {
    if (s == "red" || s == "bank")
        return Side::red;
    if (s == "blue" || s == "firm")
        return Side::blue;
    return std::nullopt;
}

struct Edge {
    std::uint32_t red;
    std::uint32_t blue;
    friend bool operator==(const Edge&, const Edge&) = default;
};

struct NodeRef {
    Side side;
    std::uint32_t index;
    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

/// Unweighted bipartite graph with string node identifiers. Node indices are
/// dense per side, in first-appearance order. Immutable once built; use
/// GraphBuilder to construct one.
class BipartiteGraph {
public:
    BipartiteGraph() = default;

    std::size_t red_count() const noexcept { return red_ids_.size(); }
    std::size_t blue_count() const noexcept { return blue_ids_.size(); }
    std::size_t node_count() const noexcept { return red_count() + blue_count(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const std::vector<std::string>& red_ids() const noexcept { return red_ids_; }
    const std::vector<std::string>& blue_ids() const noexcept { return blue_ids_; }
    const std::string& id(NodeRef n) const {
        return n.side == Side::red ? red_ids_[n.index] : blue_ids_[n.index];
    }

    /// Edges in first-appearance order.
    std::span<const Edge> edges() const noexcept { return edges_; }

    /// Neighbors sorted by index.
    std::span<const std::uint32_t> red_neighbors(std::uint32_t i) const {
        return {red_adj_.data() + red_off_[i], red_adj_.data() + red_off_[i + 1]};
    }
    std::span<const std::uint32_t> blue_neighbors(std::uint32_t j) const {
        return {blue_adj_.data() + blue_off_[j], blue_adj_.data() + blue_off_[j + 1]};
    }

    std::uint32_t red_degree(std::uint32_t i) const { return red_off_[i + 1] - red_off_[i]; }
    std::uint32_t blue_degree(std::uint32_t j) const { return blue_off_[j + 1] - blue_off_[j]; }

    std::optional<NodeRef> find(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    friend bool operator==(const BipartiteGraph& a, const BipartiteGraph& b) {
        return a.red_ids_ == b.red_ids_ && a.blue_ids_ == b.blue_ids_ && a.edges_ == b.edges_;
    }

private:
    friend class GraphBuilder;

    std::vector<std::string> red_ids_;
    std::vector<std::string> blue_ids_;
    std::unordered_map<std::string, NodeRef> index_;
    std::vector<Edge> edges_;
    // CSR adjacency, one per side
    std::vector<std::uint32_t> red_off_{0};
    std::vector<std::uint32_t> red_adj_;
    std::vector<std::uint32_t> blue_off_{0};
    std::vector<std::uint32_t> blue_adj_;
};

class GraphBuilder {
public:
    /// Returns the index of `id` on the red side, registering it if new.
    /// Throws InputError if `id` is already a blue node.
    std::uint32_t add_red(const std::string& id) { return add(id, Side::red); }
    std::uint32_t add_blue(const std::string& id) { return add(id, Side::blue); }

    /// Adds edge (red, blue), registering both endpoints. Returns false and
    /// counts a duplicate if the edge already exists.
    bool add_edge(const std::string& red, const std::string& blue) {
        auto i = add_red(red);
        auto j = add_blue(blue);
        return add_edge(i, j);
    }

    bool add_edge(std::uint32_t i, std::uint32_t j) {
        if (i >= g_.red_ids_.size() || j >= g_.blue_ids_.size())
            throw InputError("edge endpoint out of range");
        auto key = (static_cast<std::uint64_t>(i) << 32) | j;
        if (!seen_.insert(key).second) {
            ++duplicates_;
            return false;
        }
        g_.edges_.push_back({i, j});
        return true;
    }

    std::size_t duplicates() const noexcept { return duplicates_; }

    BipartiteGraph build() && {
        auto& g = g_;
        auto csr = [&](std::size_t n, auto&& from, auto&& to, std::vector<std::uint32_t>& off,
                       std::vector<std::uint32_t>& adj) {
            off.assign(n + 1, 0);
            for (const auto& e : g.edges_)
                ++off[from(e) + 1];
            for (std::size_t k = 0; k < n; ++k)
                off[k + 1] += off[k];
            adj.resize(g.edges_.size());
            auto fill = off;
            for (const auto& e : g.edges_)
                adj[fill[from(e)]++] = to(e);
            for (std::size_t k = 0; k < n; ++k)
                std::sort(adj.begin() + off[k], adj.begin() + off[k + 1]);
        };
        csr(g.red_ids_.size(), [](const Edge& e) { return e.red; }, [](const Edge& e) { return e.blue; },
            g.red_off_, g.red_adj_);
        csr(g.blue_ids_.size(), [](const Edge& e) { return e.blue; }, [](const Edge& e) { return e.red; },
            g.blue_off_, g.blue_adj_);
        seen_.clear();
        return std::move(g);
    }

private:
    std::uint32_t add(const std::string& id, Side side) {
        if (id.empty())
            throw InputError("empty node identifier");
        auto& ids = side == Side::red ? g_.red_ids_ : g_.blue_ids_;
        auto [it, inserted] = g_.index_.try_emplace(id, NodeRef{side, static_cast<std::uint32_t>(ids.size())});
        if (!inserted) {
            if (it->second.side != side)
                throw InputError("node '" + id + "' appears on both sides");
            return it->second.index;
        }
        ids.push_back(id);
        return it->second.index;
    }

    BipartiteGraph g_;
    std::unordered_set<std::uint64_t> seen_;
    std::size_t duplicates_ = 0;
};

// ---------------------------------------------------------------------------
// Edge-list ingestion

enum class HeaderMode { absent, present, detect };

struct EdgeListOptions {
    char delimiter = ',';
    /// `detect` skips a first row reading `red_id<delim>blue_id`.
    HeaderMode header = HeaderMode::detect;
    /// Optional `node_id,side` file. Its nodes are registered before the
    /// edges, so they come first in index order and may be isolated.
    std::optional<std::filesystem::path> node_list;
};

struct EdgeListLoad {
    BipartiteGraph graph;
    std::size_t duplicates = 0;
};

namespace detail {

inline void read_rows(const std::filesystem::path& path, char delim, HeaderMode mode, std::string_view a,
                      std::string_view b,
                      const std::function<void(const std::vector<std::string>&, std::size_t)>& row) {
    bool first = true;
    csv::for_each_row(path.string(), delim, mode == HeaderMode::present,
                      [&](const std::vector<std::string>& f, std::size_t line) {
                          if (first && mode == HeaderMode::detect) {
                              first = false;
                              if (f.size() == 2 && f[0] == a && f[1] == b)
                                  return;
                          }
                          first = false;
                          row(f, line);
                      });
}

} // namespace detail

inline void read_node_list(GraphBuilder& builder, const std::filesystem::path& path, char delim = ',',
                           HeaderMode header = HeaderMode::detect) {
    detail::read_rows(path, delim, header, "node_id", "side", [&](const auto& f, std::size_t line) {
        if (f.size() != 2)
            throw ParseError(path.string(), line, "expected 2 fields (node_id,side), got " + std::to_string(f.size()));
        auto side = parse_side(f[1]);
        if (!side)
            throw ParseError(path.string(), line, "unknown side '" + f[1] + "'");
        try {
            *side == Side::red ? builder.add_red(f[0]) : builder.add_blue(f[0]);
        } catch (const InputError& e) {
            throw ParseError(path.string(), line, e.what());
        }
    });
}

/// Loads a `red_id,blue_id` edge list. Duplicate edges collapse and are
/// counted in the result. Throws ParseError on a wrong-arity row or a node
/// seen on both sides, and InputError("empty graph") if no edges remain.
inline EdgeListLoad load_edge_list(const std::filesystem::path& path, const EdgeListOptions& options = {}) {
    GraphBuilder builder;
    if (options.node_list)
        read_node_list(builder, *options.node_list, options.delimiter, options.header);
    detail::read_rows(path, options.delimiter, options.header, "red_id", "blue_id",
                      [&](const auto& f, std::size_t line) {
                          if (f.size() != 2)
                              throw ParseError(path.string(), line,
                                               "expected 2 fields (red_id,blue_id), got " + std::to_string(f.size()));
                          try {
                              builder.add_edge(f[0], f[1]);
                          } catch (const InputError& e) {
                              throw ParseError(path.string(), line, e.what());
                          }
                      });
    auto dups = builder.duplicates();
    auto g = std::move(builder).build();
    if (g.edge_count() == 0)
        throw InputError("empty graph: " + path.string());
    return {std::move(g), dups};
}

inline void write_edge_list(const BipartiteGraph& g, const std::filesystem::path& path, char delim = ',') {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << "red_id" << delim << "blue_id\n";
    for (const auto& e : g.edges())
        out << g.red_ids()[e.red] << delim << g.blue_ids()[e.blue] << '\n';
}

inline void write_node_list(const BipartiteGraph& g, const std::filesystem::path& path, char delim = ',') {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << "node_id" << delim << "side\n";
    for (const auto& id : g.red_ids())
        out << id << delim << "red\n";
    for (const auto& id : g.blue_ids())
        out << id << delim << "blue\n";
}

// ---------------------------------------------------------------------------
// Degree and density

/// Fraction of realized links among the p*q possible ones.
inline double density(const BipartiteGraph& g) {
    if (g.red_count() == 0 || g.blue_count() == 0)
        throw InputError("density undefined: empty node set");
    return static_cast<double>(g.edge_count()) /
           (static_cast<double>(g.red_count()) * static_cast<double>(g.blue_count()));
}

struct DegreeSequences {
    std::vector<std::uint32_t> red;
    std::vector<std::uint32_t> blue;
};

inline DegreeSequences degree_sequences(const BipartiteGraph& g) {
    DegreeSequences d;
    d.red.resize(g.red_count());
    d.blue.resize(g.blue_count());
    for (std::uint32_t i = 0; i < g.red_count(); ++i)
        d.red[i] = g.red_degree(i);
    for (std::uint32_t j = 0; j < g.blue_count(); ++j)
        d.blue[j] = g.blue_degree(j);
    return d;
}

// ---------------------------------------------------------------------------
// Period series

/// Time order of period labels: numeric when both parse as integers,
/// lexicographic otherwise.
inline bool period_before(const std::string& a, const std::string& b) {
    long long x = 0, y = 0;
    auto pa = std::from_chars(a.data(), a.data() + a.size(), x);
    auto pb = std::from_chars(b.data(), b.data() + b.size(), y);
    bool na = pa.ec == std::errc{} && pa.ptr == a.data() + a.size();
    bool nb = pb.ec == std::errc{} && pb.ptr == b.data() + b.size();
    if (na && nb)
        return x < y;
    return a < b;
}

struct PeriodGraph {
    std::string label;
    BipartiteGraph graph;
};

class PeriodGraphSeries {
public:
    /// Appends a period; labels must be strictly increasing.
    void push_back(std::string label, BipartiteGraph graph) {
        if (label.empty())
            throw InputError("empty period label");
        if (!periods_.empty() && !period_before(periods_.back().label, label))
            throw InputError("period '" + label + "' does not follow '" + periods_.back().label + "'");
        periods_.push_back({std::move(label), std::move(graph)});
    }

    std::size_t size() const noexcept { return periods_.size(); }
    bool empty() const noexcept { return periods_.empty(); }
    const PeriodGraph& operator[](std::size_t t) const { return periods_[t]; }
    auto begin() const { return periods_.begin(); }
    auto end() const { return periods_.end(); }

private:
    std::vector<PeriodGraph> periods_;
};

struct ManifestEntry {
    std::string period;
    std::filesystem::path edges;
    std::optional<std::filesystem::path> nodes;
};

/// Manifest rows: `period,edge_list[,node_list]`. Relative paths resolve
/// against the manifest's directory. Row order is time order.
inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::vector<ManifestEntry> out;
    auto base = path.parent_path();
    bool first = true;
    csv::for_each_row(path.string(), ',', false, [&](const std::vector<std::string>& f, std::size_t line) {
        if (first) {
            first = false;
            if (!f.empty() && f[0] == "period")
                return;
        }
        if (f.size() != 2 && f.size() != 3)
            throw ParseError(path.string(), line, "expected period,edge_list[,node_list]");
        if (f[0].find('/') != std::string::npos || f[0].find('\\') != std::string::npos)
            throw ParseError(path.string(), line, "period label may not contain path separators");
        ManifestEntry e{f[0], base / f[1], std::nullopt};
        if (f.size() == 3 && !f[2].empty())
            e.nodes = base / f[2];
        if (!out.empty() && !period_before(out.back().period, e.period))
            throw ParseError(path.string(), line, "period '" + e.period + "' out of order or duplicated");
        out.push_back(std::move(e));
    });
    if (out.empty())
        throw InputError("empty manifest: " + path.string());
    return out;
}

inline PeriodGraphSeries load_series(const std::vector<ManifestEntry>& manifest, EdgeListOptions options = {}) {
    PeriodGraphSeries series;
    for (const auto& e : manifest) {
        options.node_list = e.nodes;
        series.push_back(e.period, load_edge_list(e.edges, options).graph);
    }
    return series;
}

} // namespace bipcomm
