#pragma once

// Counter-based random streams keyed by a path of integers (master seed,
// stream family, trial index, round). Output i of a stream is a pure
// function of (key, i), so any trial can be replayed in isolation and
// results do not depend on the execution schedule.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace mechcert::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t child) noexcept {
    return mix64(mix64(parent + kGolden) ^ (child * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

[[nodiscard]] constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t key = mix64(seed);
    for (auto p : path) {
        key = derive_key(key, p);
    }
    return key;
}

/// UniformRandomBitGenerator over the stream mix64(key + i * golden).
class CounterEngine {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterEngine(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept { return mix64(key_ + (++counter_) * kGolden); }

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Uniform double in [0, 1) from the top 53 bits.
[[nodiscard]] inline double uniform01(CounterEngine& e) noexcept {
    return static_cast<double>(e() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by 128-bit multiply-shift (n >= 1).
[[nodiscard]] inline std::uint64_t uniform_below(CounterEngine& e, std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(e()) * n) >> 64);
}

}  // namespace mechcert::rng
