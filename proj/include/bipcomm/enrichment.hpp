#pragma once

#include <bipcomm/csv.hpp>
#include <bipcomm/errors.hpp>
#include <bipcomm/partition.hpp>
#include <bipcomm/stats.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bipcomm {

/// Categorical node attributes: at most one value per (node, category).
/// Categories keep their first-appearance order.
class AttributeCatalog {
public:
    void set(const std::string& node, const std::string& category, const std::string& value) {
        if (node.empty() || category.empty() || value.empty())
            throw InputError("attribute fields must be non-empty");
        auto [it, fresh] = by_category_.try_emplace(category);
        if (fresh)
            order_.push_back(category);
        auto [slot, inserted] = it->second.try_emplace(node, value);
        if (!inserted && slot->second != value)
            throw InputError("node '" + node + "' has two values for category '" + category + "'");
    }

    const std::string* get(const std::string& node, const std::string& category) const {
        auto c = by_category_.find(category);
        if (c == by_category_.end())
            return nullptr;
        auto v = c->second.find(node);
        return v == c->second.end() ? nullptr : &v->second;
    }

    const std::vector<std::string>& categories() const noexcept { return order_; }
    bool empty() const noexcept { return order_.empty(); }

    /// (node, value) pairs of one category, sorted by node id.
    std::vector<std::pair<std::string, std::string>> entries(const std::string& category) const {
        std::vector<std::pair<std::string, std::string>> out;
        if (auto c = by_category_.find(category); c != by_category_.end())
            out.assign(c->second.begin(), c->second.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<std::string> order_;
    std::unordered_map<std::string, std::unordered_map<std::string, std::string>> by_category_;
};

/// Reads `node_id,category,value` rows.
inline AttributeCatalog read_catalog(const std::filesystem::path& path) {
    AttributeCatalog cat;
    bool first = true;
    csv::for_each_row(path.string(), ',', false, [&](const std::vector<std::string>& f, std::size_t line) {
        if (std::exchange(first, false) && f.size() == 3 && f[0] == "node_id" && f[1] == "category")
            return;
        if (f.size() != 3)
            throw ParseError(path.string(), line, "expected node_id,category,value");
        try {
            cat.set(f[0], f[1], f[2]);
        } catch (const InputError& e) {
            throw ParseError(path.string(), line, e.what());
        }
    });
    if (cat.empty())
        throw InputError("empty attribute catalog: " + path.string());
    return cat;
}

inline void write_catalog(const AttributeCatalog& cat, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << "node_id,category,value\n";
    for (const auto& c : cat.categories())
        for (const auto& [node, value] : cat.entries(c))
            out << node << ',' << c << ',' << value << '\n';
}

/// p / R_t with R_t = (total distinct attribute values) * N_t.
inline double enrichment_threshold(double p_univariate, std::span<const std::int64_t> distinct_values,
                                   std::int64_t communities) {
    std::int64_t values = 0;
    for (auto v : distinct_values) {
        if (v < 0)
            throw InputError("negative attribute value count");
        values += v;
    }
    if (values == 0)
        throw InputError("no attribute values to test");
    if (communities < 1)
        throw InputError("need at least one community");
    return stats::bonferroni_threshold(p_univariate, static_cast<std::uint64_t>(values * communities));
}

/// p / ((N_S + N_P + N_B) * N_t): sectors, prefectures, bank types.
inline double enrichment_threshold(double p_univariate, std::int64_t sectors, std::int64_t prefectures,
                                   std::int64_t bank_types, std::int64_t communities) {
    const std::int64_t counts[] = {sectors, prefectures, bank_types};
    return enrichment_threshold(p_univariate, counts, communities);
}

struct EnrichmentConfig {
    double p_t = 0.01;
    /// What the hypergeometric draw count K is for a community.
    enum class DrawBasis {
        /// Community members (on the category's side) that carry the category;
        /// the population is the side's nodes carrying it.
        category_covered,
        /// All community members on the category's side; the population is
        /// every node of that side.
        community_size,
    };
    DrawBasis draws = DrawBasis::category_covered;
    /// Categories to test; empty = every catalog category present in the
    /// partition. A listed category carried by no node is an error.
    std::vector<std::string> categories;
};

struct EnrichmentRecord {
    std::uint32_t community = 0;
    std::string period;
    std::string category;
    std::string value;
    std::int64_t count_in_community = 0;   // X
    std::int64_t community_population = 0; // K
    std::int64_t global_count = 0;         // M
    std::int64_t global_population = 0;   // N
    double p_value = 1.0;
    bool validated = false;
};

struct CategorySummary {
    std::string name;
    Side side = Side::blue;
    std::int64_t distinct_values = 0;
};

struct EnrichmentResult {
    double threshold = 0.0;
    std::vector<CategorySummary> categories;
    /// Ordered by category, community, value.
    std::vector<EnrichmentRecord> records;
};

/// Over-expression test of every (community, category, value): p = P(X >= x)
/// with X ~ H(. | N, M, K) where N is the category's population on its side,
/// M the nodes carrying the value, K the community's draw count and x the
/// community members carrying the value. Validated where p < p_t / R_t.
inline EnrichmentResult test_overexpression(const LabeledPartition& partition, const AttributeCatalog& catalog,
                                            const EnrichmentConfig& cfg, const std::string& period = {}) {
    if (partition.communities == 0)
        throw InputError("empty partition");
    const bool explicit_list = !cfg.categories.empty();
    const auto& wanted = explicit_list ? cfg.categories : catalog.categories();

    struct Work {
        CategorySummary summary;
        std::vector<const std::string*> value_of; // per partition node, nullptr if absent or off-side
    };
    std::vector<Work> work;
    for (const auto& c : wanted) {
        Work w;
        w.summary.name = c;
        w.value_of.assign(partition.nodes.size(), nullptr);
        bool on_red = false, on_blue = false;
        for (std::size_t k = 0; k < partition.nodes.size(); ++k) {
            const auto& n = partition.nodes[k];
            if (const auto* v = catalog.get(n.id, c)) {
                w.value_of[k] = v;
                (n.side == Side::red ? on_red : on_blue) = true;
            }
        }
        if (on_red && on_blue)
            throw InputError("category '" + c + "' is carried by both red and blue nodes");
        if (!on_red && !on_blue) {
            if (explicit_list)
                throw InputError("category '" + c + "' applies to no node of the partition");
            continue;
        }
        w.summary.side = on_red ? Side::red : Side::blue;
        work.push_back(std::move(w));
    }
    if (work.empty())
        throw InputError("attribute catalog covers no node of the partition");

    EnrichmentResult result;
    const auto n_comm = partition.communities;
    for (auto& w : work) {
        const auto side = w.summary.side;
        std::map<std::string, std::int64_t> global;               // M per value
        std::map<std::string, std::vector<std::int64_t>> in_comm; // X per value and community
        std::vector<std::int64_t> covered(n_comm, 0), on_side(n_comm, 0);
        std::int64_t population_covered = 0, population_side = 0;
        for (std::size_t k = 0; k < partition.nodes.size(); ++k) {
            const auto& n = partition.nodes[k];
            if (n.side != side)
                continue;
            ++population_side;
            ++on_side[n.community];
            if (const auto* v = w.value_of[k]) {
                ++population_covered;
                ++covered[n.community];
                ++global[*v];
                auto& xs = in_comm[*v];
                if (xs.empty())
                    xs.assign(n_comm, 0);
                ++xs[n.community];
            }
        }
        w.summary.distinct_values = static_cast<std::int64_t>(global.size());
        result.categories.push_back(w.summary);

        const bool covered_basis = cfg.draws == EnrichmentConfig::DrawBasis::category_covered;
        const auto population = covered_basis ? population_covered : population_side;
        for (std::uint32_t c = 0; c < n_comm; ++c) {
            const auto draws = covered_basis ? covered[c] : on_side[c];
            for (const auto& [value, m] : global) {
                EnrichmentRecord r;
                r.community = c;
                r.period = period;
                r.category = w.summary.name;
                r.value = value;
                r.count_in_community = in_comm[value][c];
                r.community_population = draws;
                r.global_count = m;
                r.global_population = population;
                r.p_value = stats::overlap_pvalue(r.count_in_community, {population, m, draws});
                result.records.push_back(std::move(r));
            }
        }
    }
    std::vector<std::int64_t> distinct;
    for (const auto& s : result.categories)
        distinct.push_back(s.distinct_values);
    result.threshold = enrichment_threshold(cfg.p_t, distinct, n_comm);
    for (auto& r : result.records)
        r.validated = r.count_in_community > 0 && r.p_value < result.threshold;
    return result;
}

inline void write_enrichment_records(const std::vector<EnrichmentRecord>& records,
                                     const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << "period,community,category,value,count_in_community,community_population,global_count,"
           "global_population,p_value,validated\n";
    for (const auto& r : records)
        out << r.period << ',' << r.community << ',' << r.category << ',' << r.value << ',' << r.count_in_community
            << ',' << r.community_population << ',' << r.global_count << ',' << r.global_population << ','
            << csv::format_double(r.p_value) << ',' << (r.validated ? 1 : 0) << '\n';
}

/// One summary row per community: red (bank) and blue (firm) counts and the
/// validated values of each category, or "--" when none.
struct ReportRow {
    std::string period;
    std::uint32_t community = 0;
    std::size_t banks = 0;
    std::size_t firms = 0;
    std::vector<std::string> attributes; // one entry per report category
};

struct CommunityReport {
    std::vector<std::string> categories;
    std::vector<ReportRow> rows;
};

/// Validated values within a cell are ordered by increasing p-value and
/// joined with ';'.
inline CommunityReport community_report(const LabeledPartition& partition, const EnrichmentResult& result,
                                        const std::string& period) {
    CommunityReport rep;
    for (const auto& c : result.categories)
        rep.categories.push_back(c.name);
    auto sizes = partition.sizes();
    std::map<std::pair<std::uint32_t, std::string_view>, std::vector<const EnrichmentRecord*>> validated;
    for (const auto& r : result.records)
        if (r.validated)
            validated[{r.community, r.category}].push_back(&r);
    for (std::uint32_t c = 0; c < partition.communities; ++c) {
        ReportRow row;
        row.period = period;
        row.community = c;
        row.banks = sizes[c].red;
        row.firms = sizes[c].blue;
        for (const auto& cat : rep.categories) {
            auto it = validated.find({c, cat});
            auto hits = it == validated.end() ? std::vector<const EnrichmentRecord*>{} : it->second;
            std::stable_sort(hits.begin(), hits.end(),
                             [](const auto* a, const auto* b) { return a->p_value < b->p_value; });
            std::string cell;
            for (const auto* h : hits)
                cell += (cell.empty() ? "" : ";") + h->value;
            row.attributes.push_back(cell.empty() ? "--" : cell);
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline void write_report(const CommunityReport& rep, std::ostream& out, bool header = true) {
    if (header) {
        out << "period,community,banks,firms";
        for (const auto& c : rep.categories)
            out << ',' << c;
        out << '\n';
    }
    for (const auto& r : rep.rows) {
        out << r.period << ',' << r.community << ',' << r.banks << ',' << r.firms;
        for (const auto& a : r.attributes)
            out << ',' << a;
        out << '\n';
    }
}

} // namespace bipcomm
