#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace vodsim {

/// SplitMix64 finalizer. Used to turn seeds and labels into well-spread
/// 64-bit values; the output for a given input is fixed forever.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// FNV-1a over the bytes of a label.
constexpr std::uint64_t label_hash(std::string_view label) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Order-sensitive mix of a seed with one more label value.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t label) noexcept {
    return splitmix64(splitmix64(seed) ^ label);
}

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence for a given seed is
/// fixed by the C++ standard. The distribution transforms below are written
/// out by hand because the standard library's distributions are not
/// guaranteed to produce the same values across implementations.
///
/// Sub-streams are derived by hashing the parent seed with a label, so two
/// sub-streams with different labels are independent of each other and of
/// the order in which they are created.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    RandomSource substream(std::string_view label) const;
    RandomSource substream(std::uint64_t label) const;

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    bool bernoulli(double p);
    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate);
    /// Index drawn with probability proportional to weights[i].
    std::size_t pick_weighted(std::span<const double> weights);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace vodsim
