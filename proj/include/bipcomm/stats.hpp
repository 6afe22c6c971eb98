#pragma once

#include <bipcomm/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace bipcomm::stats {

/// Pairwise (cascade) summation; error grows as O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs)
            s += x;
        return s;
    }
    auto half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace detail {

inline constexpr std::int64_t exact_binomial_limit = 66; // C(66,33) < 2^63

inline const std::array<std::array<double, exact_binomial_limit + 1>, exact_binomial_limit + 1>& log_binomial_table() {
    static const auto table = [] {
        std::array<std::array<double, exact_binomial_limit + 1>, exact_binomial_limit + 1> t{};
        std::array<std::uint64_t, exact_binomial_limit + 1> row{};
        row[0] = 1;
        for (std::int64_t n = 0; n <= exact_binomial_limit; ++n) {
            if (n > 0)
                for (std::int64_t k = n; k > 0; --k)
                    row[k] += row[k - 1];
            for (std::int64_t k = 0; k <= n; ++k)
                t[n][k] = std::log(static_cast<double>(row[k]));
        }
        return t;
    }();
    return table;
}

/// ln(n!) - [(n + 1/2) ln n - n + ln sqrt(2 pi)], the Stirling series remainder.
/// Tabulated for n <= 15, asymptotic series above (Loader 2000).
inline double stirling_error(std::int64_t n) {
    static constexpr double small[16] = {
        0.0,
        0.08106146679532725821967,
        0.04134069595540929409382,
        0.02767792568499833914879,
        0.02079067210376509311152,
        0.01664469118982119216319,
        0.01387612882307074799875,
        0.01189670994589177009506,
        0.01041126526197209649748,
        0.009255462182712732917729,
        0.008330563433362871256469,
        0.007573675487951840794972,
        0.006942840107209529865664,
        0.00640899418800420706844,
        0.005951370112758847735624,
        0.005554733551962801371039,
    };
    constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680, s4 = 1.0 / 1188;
    if (n <= 15)
        return small[n];
    double x = static_cast<double>(n);
    double xx = x * x;
    if (n > 500)
        return (s0 - s1 / xx) / x;
    if (n > 80)
        return (s0 - (s1 - s2 / xx) / xx) / x;
    if (n > 35)
        return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
    return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

} // namespace detail

/// Natural log of the binomial coefficient C(n, k).
///
/// Exact integer table for n <= 66. Above that, the Stirling form
///   k ln(n/k) - (n-k) log1p(-k/n) + 1/2 ln(n / (k (n-k))) - ln sqrt(2 pi)
///   + s(n) - s(k) - s(n-k)
/// keeps the two dominant terms positive so nothing large cancels.
inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n)
        throw InputError("log_binomial: require 0 <= k <= n (n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                         ")");
    if (k == 0 || k == n)
        return 0.0;
    if (n <= detail::exact_binomial_limit)
        return detail::log_binomial_table()[n][k];
    k = std::min(k, n - k);
    double nn = static_cast<double>(n), kk = static_cast<double>(k), rr = static_cast<double>(n - k);
    double main = kk * std::log(nn / kk) - rr * std::log1p(-kk / nn);
    double corr = 0.5 * std::log(nn / (kk * rr)) - 0.5 * std::log(2.0 * std::numbers::pi) +
                  detail::stirling_error(n) - detail::stirling_error(k) - detail::stirling_error(n - k);
    return main + corr;
}

/// Hypergeometric law H(x | N, M, K): x successes in K draws without
/// replacement from N items of which M are successes.
struct HypergeomParams {
    std::int64_t population = 0; // N
    std::int64_t successes = 0;  // M
    std::int64_t draws = 0;      // K

    void validate() const {
        if (population < 0 || successes < 0 || draws < 0 || successes > population || draws > population)
            throw InputError("invalid hypergeometric parameters (N=" + std::to_string(population) +
                             ", M=" + std::to_string(successes) + ", K=" + std::to_string(draws) + ")");
    }

    std::int64_t support_min() const { return std::max<std::int64_t>(0, draws + successes - population); }
    std::int64_t support_max() const { return std::min(successes, draws); }

    /// floor((K+1)(M+1)/(N+2)), a mode of the distribution.
    std::int64_t mode() const {
        return static_cast<std::int64_t>((static_cast<__int128>(draws + 1) * (successes + 1)) / (population + 2));
    }
};

/// ln H(x | N, M, K); -inf outside the support.
inline double log_hypergeom_pmf(std::int64_t x, const HypergeomParams& h) {
    h.validate();
    if (x < h.support_min() || x > h.support_max())
        return -std::numeric_limits<double>::infinity();
    return log_binomial(h.successes, x) + log_binomial(h.population - h.successes, h.draws - x) -
           log_binomial(h.population, h.draws);
}

inline double hypergeom_pmf(std::int64_t x, const HypergeomParams& h) { return std::exp(log_hypergeom_pmf(x, h)); }

namespace detail {

/// Sum of pmf over [lo, hi] (inclusive), shifted by the largest log term and
/// added pairwise.
inline double pmf_range_sum(std::int64_t lo, std::int64_t hi, const HypergeomParams& h) {
    if (lo > hi)
        return 0.0;
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t x = lo; x <= hi; ++x)
        logs.push_back(log_hypergeom_pmf(x, h));
    double peak = *std::max_element(logs.begin(), logs.end());
    for (double& l : logs)
        l = std::exp(l - peak);
    return std::exp(peak) * pairwise_sum(logs);
}

} // namespace detail

/// P(X >= n) for X ~ H(. | N, M, K), i.e. 1 - sum_{x<n} H(x | N, M, K).
///
/// The tail on the far side of the mode is summed directly, so small
/// p-values keep full relative precision; below the mode the complement of
/// the lower tail is used. The result is clamped to [0, 1].
inline double overlap_pvalue(std::int64_t n, const HypergeomParams& h) {
    h.validate();
    if (n < 0)
        throw InputError("overlap_pvalue: negative overlap");
    const auto lo = h.support_min(), hi = h.support_max();
    if (n <= lo)
        return 1.0;
    if (n > hi)
        return 0.0;
    double p;
    if (n <= h.mode())
        p = 1.0 - detail::pmf_range_sum(lo, n - 1, h);
    else
        p = detail::pmf_range_sum(n, hi, h);
    return std::clamp(p, 0.0, 1.0);
}

/// Family-wise threshold p / n_tests.
inline double bonferroni_threshold(double p_univariate, std::uint64_t n_tests) {
    if (!(p_univariate > 0.0 && p_univariate <= 1.0))
        throw InputError("univariate threshold must lie in (0, 1]");
    if (n_tests == 0)
        throw InputError("Bonferroni correction needs at least one test");
    return p_univariate / static_cast<double>(n_tests);
}

} // namespace bipcomm::stats
