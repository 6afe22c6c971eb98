#pragma once

#include <bipcomm/errors.hpp>
#include <bipcomm/graph.hpp>
#include <bipcomm/parallel.hpp>
#include <bipcomm/partition.hpp>
#include <bipcomm/random.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace bipcomm {

// ---------------------------------------------------------------------------
// Bipartite modularity
//
//   Q = 1/m sum_{i red} sum_{j blue} (A_ij - k_i d_j / m) delta(g_i, g_j)
//     = (m * E_in - sum_c K_c D_c) / m^2
//
// where E_in counts intra-community edges and K_c, D_c are the red and blue
// degree totals of community c. The numerator is an integer, which makes
// comparisons between partitions exact.

namespace detail {

inline void require_edges(const BipartiteGraph& g) {
    if (g.edge_count() == 0)
        throw InputError("modularity undefined for a graph without edges");
}

/// m^2 * Q as an exact integer.
inline std::int64_t modularity_numerator(const BipartiteGraph& g, const Partition& p) {
    const auto m = static_cast<std::int64_t>(g.edge_count());
    std::int64_t inside = 0;
    for (const auto& e : g.edges())
        inside += p.red[e.red] == p.blue[e.blue];
    std::vector<std::int64_t> red_deg(p.communities, 0), blue_deg(p.communities, 0);
    for (std::uint32_t i = 0; i < g.red_count(); ++i)
        red_deg[p.red[i]] += g.red_degree(i);
    for (std::uint32_t j = 0; j < g.blue_count(); ++j)
        blue_deg[p.blue[j]] += g.blue_degree(j);
    std::int64_t null_term = 0;
    for (std::uint32_t c = 0; c < p.communities; ++c)
        null_term += red_deg[c] * blue_deg[c];
    return m * inside - null_term;
}

inline double to_modularity(std::int64_t numerator, const BipartiteGraph& g) {
    const auto m = static_cast<double>(g.edge_count());
    return static_cast<double>(numerator) / (m * m);
}

} // namespace detail

inline double bipartite_modularity(const BipartiteGraph& g, const Partition& p) {
    detail::require_edges(g);
    validate(g, p);
    return detail::to_modularity(detail::modularity_numerator(g, p), g);
}

// ---------------------------------------------------------------------------
// BRIM

/// Called after every half-step with the modularity before and after it.
using StepObserver = std::function<void(double before, double after)>;

namespace detail {

/// Reassigns every node of `side` to the label maximizing its modularity
/// contribution, holding the other side fixed. Returns the number of labels
/// changed. Ties break toward the lowest label.
inline std::size_t brim_half_step(const BipartiteGraph& g, Partition& p, Side side) {
    const auto m = static_cast<std::int64_t>(g.edge_count());
    const auto c = p.communities;
    auto& mine = side == Side::red ? p.red : p.blue;
    const auto& other = side == Side::red ? p.blue : p.red;
    const auto n_other = other.size();

    // Degree totals of the fixed side, per label.
    std::vector<std::int64_t> fixed_deg(c, 0);
    for (std::uint32_t v = 0; v < n_other; ++v)
        fixed_deg[other[v]] += side == Side::red ? g.blue_degree(v) : g.red_degree(v);

    // Labels ordered by (fixed_deg, label): the best label among those with
    // no neighbor of the node is the first one in this order not adjacent.
    std::vector<std::uint32_t> by_deg(c);
    std::iota(by_deg.begin(), by_deg.end(), 0u);
    std::stable_sort(by_deg.begin(), by_deg.end(), [&](auto a, auto b) { return fixed_deg[a] < fixed_deg[b]; });

    std::vector<std::int64_t> hits(c, 0);
    std::vector<std::uint32_t> touched;
    std::size_t changes = 0;
    const auto n_mine = mine.size();
    for (std::uint32_t u = 0; u < n_mine; ++u) {
        auto nbrs = side == Side::red ? g.red_neighbors(u) : g.blue_neighbors(u);
        const auto k = static_cast<std::int64_t>(nbrs.size());
        touched.clear();
        for (auto v : nbrs) {
            auto l = other[v];
            if (hits[l]++ == 0)
                touched.push_back(l);
        }
        // score(l) = m * hits(l) - k * fixed_deg(l)
        std::uint32_t best = UINT32_MAX;
        std::int64_t best_score = 0;
        auto consider = [&](std::uint32_t l) {
            auto s = m * hits[l] - k * fixed_deg[l];
            if (best == UINT32_MAX || s > best_score || (s == best_score && l < best)) {
                best = l;
                best_score = s;
            }
        };
        for (auto l : touched)
            consider(l);
        for (auto l : by_deg) {
            if (hits[l] != 0)
                continue;
            consider(l);
            break;
        }
        for (auto l : touched)
            hits[l] = 0;
        if (mine[u] != best) {
            mine[u] = best;
            ++changes;
        }
    }
    return changes;
}

} // namespace detail

/// One BRIM half-step: every node on `side` moves to its best community given
/// the labels on the other side. Never lowers modularity.
inline Partition brim_step(const BipartiteGraph& g, Partition p, Side side) {
    detail::require_edges(g);
    validate(g, p);
    auto before = detail::modularity_numerator(g, p);
    detail::brim_half_step(g, p, side);
    if (detail::modularity_numerator(g, p) < before)
        throw InvariantViolation("BRIM step decreased modularity");
    return p;
}

struct RunResult {
    Partition partition;
    double modularity = 0.0;
    std::uint32_t run_id = 0;
    std::uint64_t seed = 0;
    /// Full sweeps (blue step + red step) performed.
    std::uint32_t iterations = 0;
};

inline constexpr double convergence_tolerance = 1e-12;

/// Alternates blue and red half-steps until a sweep changes no label, gains
/// less than 1e-12 in modularity, or `max_sweeps` sweeps have run. Empty
/// communities are dropped after every sweep.
inline RunResult brim_converge(const BipartiteGraph& g, Partition p, std::uint32_t max_sweeps,
                               const StepObserver& observer = {}) {
    detail::require_edges(g);
    validate(g, p);
    if (max_sweeps == 0)
        throw InputError("max_sweeps must be at least 1");
    auto q = detail::modularity_numerator(g, p);
    RunResult r;
    for (r.iterations = 0; r.iterations < max_sweeps;) {
        const auto start = q;
        std::size_t changes = 0;
        for (Side side : {Side::blue, Side::red}) {
            changes += detail::brim_half_step(g, p, side);
            auto next = detail::modularity_numerator(g, p);
            if (observer)
                observer(detail::to_modularity(q, g), detail::to_modularity(next, g));
            if (next < q)
                throw InvariantViolation("BRIM step decreased modularity");
            q = next;
        }
        p = compact(std::move(p));
        ++r.iterations;
        if (changes == 0 || detail::to_modularity(q - start, g) < convergence_tolerance)
            break;
    }
    r.partition = std::move(p);
    r.modularity = detail::to_modularity(q, g);
    return r;
}

/// Each node independently uniform over `communities` labels (red nodes
/// draw first, then blue, from one stream).
inline Partition random_partition(const BipartiteGraph& g, std::uint32_t communities, std::uint64_t seed) {
    if (communities == 0)
        throw InputError("need at least one community");
    CounterRng rng(seed);
    Partition p;
    p.communities = communities;
    p.red.resize(g.red_count());
    p.blue.resize(g.blue_count());
    for (auto& l : p.red)
        l = static_cast<std::uint32_t>(rng.below(communities));
    for (auto& l : p.blue)
        l = static_cast<std::uint32_t>(rng.below(communities));
    return p;
}

/// Number-of-modules search: c = 1, 2, 4, 8, ... (capped at min(p, q))
/// while the best modularity improves, then bisection between the last
/// improving and the first non-improving count. Each candidate count is one
/// brim_converge from a random start seeded by derive_key(seed, c).
inline RunResult adapt_module_count(const BipartiteGraph& g, std::uint64_t seed, std::uint32_t max_sweeps = 1000,
                                    const StepObserver& observer = {}) {
    detail::require_edges(g);
    const auto cap = static_cast<std::uint32_t>(std::max<std::size_t>(1, std::min(g.red_count(), g.blue_count())));
    auto eval = [&](std::uint32_t c) {
        return brim_converge(g, random_partition(g, c, derive_key(seed, c)), max_sweeps, observer);
    };
    RunResult best = brim_converge(g, single_community(g), max_sweeps, observer);
    auto improves = [&](const RunResult& r) { return r.modularity > best.modularity + convergence_tolerance; };

    std::uint32_t lo = 1, hi = cap + 1;
    for (std::uint32_t c = 2; c <= cap; c *= 2) {
        auto r = eval(c);
        if (!improves(r)) {
            hi = c;
            break;
        }
        best = std::move(r);
        lo = c;
        if (c > cap / 2)
            break;
    }
    while (hi - lo > 1) {
        auto mid = lo + (hi - lo) / 2;
        auto r = eval(mid);
        if (improves(r)) {
            best = std::move(r);
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best.seed = seed;
    return best;
}

/// How each restart picks its initial number of communities.
struct ModuleCountSchedule {
    enum class Kind { min_side, fixed, adaptive };
    Kind kind = Kind::min_side;
    std::uint32_t count = 0; // used by `fixed`

    static ModuleCountSchedule min_side() { return {}; }
    static ModuleCountSchedule fixed(std::uint32_t c) { return {Kind::fixed, c}; }
    static ModuleCountSchedule adaptive() { return {Kind::adaptive, 0}; }
};

struct MultirunConfig {
    std::uint32_t runs = 20;
    std::uint32_t restarts_per_run = 100;
    ModuleCountSchedule schedule;
    std::uint32_t max_sweeps = 1000;
    /// 0 = hardware concurrency. Output does not depend on it.
    unsigned threads = 1;
    /// Not synchronized: only use with threads == 1.
    StepObserver observer;
};

inline std::uint64_t run_seed(std::uint64_t master_seed, std::uint32_t run) { return derive_key(master_seed, run); }
inline std::uint64_t restart_seed(std::uint64_t run_seed, std::uint32_t restart) {
    return derive_key(run_seed, restart);
}

/// One restart of BRIM from a random start drawn from `seed`.
inline RunResult brim_restart(const BipartiteGraph& g, const ModuleCountSchedule& schedule, std::uint64_t seed,
                              std::uint32_t max_sweeps, const StepObserver& observer = {}) {
    RunResult r;
    switch (schedule.kind) {
    case ModuleCountSchedule::Kind::adaptive:
        r = adapt_module_count(g, seed, max_sweeps, observer);
        break;
    case ModuleCountSchedule::Kind::fixed:
    case ModuleCountSchedule::Kind::min_side: {
        auto c = schedule.kind == ModuleCountSchedule::Kind::fixed
                     ? schedule.count
                     : static_cast<std::uint32_t>(std::max<std::size_t>(1, std::min(g.red_count(), g.blue_count())));
        r = brim_converge(g, random_partition(g, c, seed), max_sweeps, observer);
        break;
    }
    }
    r.seed = seed;
    return r;
}

/// `runs` independent runs of `restarts_per_run` random restarts each; every
/// run keeps its highest-modularity restart (the earliest on ties). Partitions
/// are returned in canonical labelling. Run r uses seed run_seed(master, r)
/// and restart k of it restart_seed(run_seed, k).
inline std::vector<RunResult> brim_multirun(const BipartiteGraph& g, const MultirunConfig& cfg,
                                            std::uint64_t master_seed) {
    detail::require_edges(g);
    if (cfg.runs == 0 || cfg.restarts_per_run == 0)
        throw InputError("runs and restarts per run must be at least 1");
    if (cfg.schedule.kind == ModuleCountSchedule::Kind::fixed && cfg.schedule.count == 0)
        throw InputError("fixed module count must be at least 1");
    std::vector<RunResult> results(cfg.runs);
    parallel_for(cfg.runs, cfg.observer ? 1u : cfg.threads, [&](std::size_t run) {
        const auto rs = run_seed(master_seed, static_cast<std::uint32_t>(run));
        RunResult best;
        std::int64_t best_num = 0;
        for (std::uint32_t k = 0; k < cfg.restarts_per_run; ++k) {
            auto r = brim_restart(g, cfg.schedule, restart_seed(rs, k), cfg.max_sweeps, cfg.observer);
            auto num = detail::modularity_numerator(g, r.partition);
            if (k == 0 || num > best_num) {
                best = std::move(r);
                best_num = num;
            }
        }
        best.partition = canonical(std::move(best.partition));
        best.run_id = static_cast<std::uint32_t>(run);
        results[run] = std::move(best);
    });
    return results;
}

/// Index of the highest-modularity result (lowest run id on ties).
inline std::size_t best_run(const std::vector<RunResult>& results) {
    if (results.empty())
        throw InputError("no runs");
    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].modularity > results[best].modularity)
            best = r;
    return best;
}

} // namespace bipcomm
