#pragma once

#include <bipcomm/errors.hpp>
#include <bipcomm/parallel.hpp>
#include <bipcomm/partition.hpp>
#include <bipcomm/stats.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bipcomm {

/// Cross-tabulation of two partitions over their shared nodes.
struct ContingencyTable {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::int64_t> counts; // row-major, rows x cols
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
    std::int64_t total = 0;
    /// Nodes present in only one of the two partitions.
    std::size_t only_a = 0;
    std::size_t only_b = 0;

    std::int64_t at(std::uint32_t i, std::uint32_t j) const { return counts[std::size_t{i} * cols + j]; }

    void add(std::uint32_t i, std::uint32_t j) {
        ++counts[std::size_t{i} * cols + j];
        ++row_sums[i];
        ++col_sums[j];
        ++total;
    }
};

namespace detail {

inline ContingencyTable empty_table(std::uint32_t rows, std::uint32_t cols) {
    ContingencyTable t;
    t.rows = rows;
    t.cols = cols;
    t.counts.assign(std::size_t{rows} * cols, 0);
    t.row_sums.assign(rows, 0);
    t.col_sums.assign(cols, 0);
    return t;
}

} // namespace detail

/// Label vectors over the same node set (position k is the same node).
inline ContingencyTable contingency(std::span<const std::uint32_t> a, std::uint32_t a_communities,
                                    std::span<const std::uint32_t> b, std::uint32_t b_communities) {
    if (a.size() != b.size())
        throw InputError("label vectors differ in length");
    if (a.empty())
        throw InputError("contingency of empty partitions");
    auto t = detail::empty_table(a_communities, b_communities);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] >= a_communities || b[k] >= b_communities)
            throw InputError("label out of range");
        t.add(a[k], b[k]);
    }
    return t;
}

/// Two partitions of the same graph.
inline ContingencyTable contingency(const Partition& a, const Partition& b) {
    if (a.red.size() != b.red.size() || a.blue.size() != b.blue.size())
        throw InputError("partitions cover different graphs");
    std::vector<std::uint32_t> la(a.red), lb(b.red);
    la.insert(la.end(), a.blue.begin(), a.blue.end());
    lb.insert(lb.end(), b.blue.begin(), b.blue.end());
    return contingency(la, a.communities, lb, b.communities);
}

/// Identifier-keyed partitions, compared on the intersection of their node
/// sets. Throws if the intersection is empty.
inline ContingencyTable contingency(const LabeledPartition& a, const LabeledPartition& b) {
    std::unordered_map<std::string_view, std::uint32_t> in_b;
    in_b.reserve(b.nodes.size());
    for (const auto& n : b.nodes)
        in_b.emplace(n.id, n.community);
    auto t = detail::empty_table(a.communities, b.communities);
    for (const auto& n : a.nodes) {
        auto it = in_b.find(n.id);
        if (it == in_b.end()) {
            ++t.only_a;
            continue;
        }
        if (n.community >= a.communities || it->second >= b.communities)
            throw InputError("label out of range");
        t.add(n.community, it->second);
    }
    if (t.total == 0)
        throw InputError("partitions share no nodes");
    t.only_b = b.nodes.size() - static_cast<std::size_t>(t.total);
    return t;
}

/// Adjusted Rand index (Hubert and Arabie) from a contingency table.
///
///   ARI = (sum C(n_ij,2) - E) / (1/2 [sum C(a_i,2) + sum C(b_j,2)] - E),
///   E   = sum C(a_i,2) sum C(b_j,2) / C(n,2)
///
/// Evaluated as a ratio of exact integers. When the denominator vanishes
/// (both partitions all singletons, or both one block) the result is 1 for
/// identical partitions and 0 otherwise.
inline double adjusted_rand_index(const ContingencyTable& t) {
    if (t.total < 2)
        throw InputError("adjusted Rand index needs at least 2 shared nodes");
    using wide = __int128;
    auto pairs = [](std::int64_t x) -> wide { return static_cast<wide>(x) * (x - 1) / 2; };
    wide index = 0, sum_a = 0, sum_b = 0;
    for (auto c : t.counts)
        index += pairs(c);
    for (auto c : t.row_sums)
        sum_a += pairs(c);
    for (auto c : t.col_sums)
        sum_b += pairs(c);
    const wide all = pairs(t.total);
    // Scale by 2 * C(n,2) to clear both fractions.
    const wide num = 2 * all * index - 2 * sum_a * sum_b;
    const wide den = all * (sum_a + sum_b) - 2 * sum_a * sum_b;
    if (den == 0)
        return (index == sum_a && index == sum_b) ? 1.0 : 0.0;
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

template <class P>
double adjusted_rand_index(const P& a, const P& b) {
    return adjusted_rand_index(contingency(a, b));
}

struct AriSummary {
    double mean = 0.0;
    /// Sample standard deviation (n - 1 denominator); 0 for a single pair.
    double stddev = 0.0;
    std::size_t pairs = 0;
};

/// ARI over all unordered distinct pairs of `partitions`.
template <class P>
AriSummary all_pairs_ari(const std::vector<P>& partitions, unsigned threads = 1) {
    const auto n = partitions.size();
    if (n < 2)
        throw InputError("all-pairs ARI needs at least 2 partitions");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pairs.emplace_back(i, j);
    std::vector<double> values(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t k) {
        values[k] = adjusted_rand_index(partitions[pairs[k].first], partitions[pairs[k].second]);
    });
    AriSummary s;
    s.pairs = values.size();
    s.mean = stats::pairwise_sum(values) / static_cast<double>(s.pairs);
    if (s.pairs > 1) {
        std::vector<double> dev(values.size());
        for (std::size_t k = 0; k < values.size(); ++k)
            dev[k] = (values[k] - s.mean) * (values[k] - s.mean);
        s.stddev = std::sqrt(stats::pairwise_sum(dev) / static_cast<double>(s.pairs - 1));
    }
    return s;
}

} // namespace bipcomm
