#pragma once

#include <cstdint>
#include <string_view>

namespace lutbench {

/// Counter-based SplitMix64 stream.
///
/// The i-th output (i = 1, 2, ...) is mix64(key + i * 0x9E3779B97F4A7C15), where
/// mix64 is the SplitMix64 finalizer:
///
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     z =  z ^ (z >> 31)
///
/// Doubles use the top 53 bits: (u >> 11) * 2^-53, so every output lies in [0, 1).
/// Bounded integers use rejection on the multiply-high product (Lemire), which
/// is exact and portable. Independent streams come from `derive`.
class CounterRng {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter) {}

    static constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Key for a named sub-stream of `seed`. Stable across platforms.
    static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept {
        return mix64(seed ^ mix64(stream + kGamma));
    }

    static constexpr std::uint64_t derive(std::uint64_t seed, std::string_view name) noexcept {
        // FNV-1a over the name, then mixed with the seed.
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001B3ULL;
        }
        return derive(seed, h);
    }

    std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * kGamma); }

    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, bound). `bound` must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const unsigned __int128 m =
                static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(bound);
            if (static_cast<std::uint64_t>(m) >= threshold) {
                return static_cast<std::uint64_t>(m >> 64);
            }
        }
    }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Fisher-Yates shuffle of [first, last) driven by `rng`.
template <typename It>
void shuffle(It first, It last, CounterRng& rng) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = rng.below(i);
        using std::swap;
        swap(first[i - 1], first[j]);
    }
}

}  // namespace lutbench
