#pragma once

#include <cstdint>

namespace bipcomm {

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

/// Derives a child stream key from a parent key and an index:
///   child = mix64(parent ^ mix64((index + 1) * golden_gamma))
/// Nesting derive_key(derive_key(master, period), node) gives the
/// per-period, per-node streams used by the generators.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(parent ^ mix64((index + 1) * golden_gamma));
}

/// Counter-based SplitMix64: the i-th output (i = 0, 1, ...) of stream `key`
/// is mix64(key + (i + 1) * golden_gamma). Any output can be computed
/// directly with `at(i)`, so streams are reproducible without replaying.
class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type at(std::uint64_t i) const noexcept {
        return mix64(key_ + (i + 1) * golden_gamma);
    }

    constexpr result_type operator()() noexcept { return at(counter_++); }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return to_unit(operator()()); }

    /// Uniform integer in [0, n) by 128-bit multiply-high. n must be > 0.
    constexpr std::uint64_t below(std::uint64_t n) noexcept { return scale(operator()(), n); }

    static constexpr double to_unit(std::uint64_t x) noexcept {
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }
    static constexpr std::uint64_t scale(std::uint64_t x, std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * n) >> 64);
    }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace bipcomm
