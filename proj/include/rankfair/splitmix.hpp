// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace rankfair {

/// The splitmix64 finalizer.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// splitmix64 generator. Fully specified, so streams are identical on every
/// platform (unlike the standard distributions).
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

    constexpr std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_mix(state_);
    }

    /// Uniform on (0, 1].
    constexpr double next_unit() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection; bound must be > 0.
    constexpr std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

private:
    std::uint64_t state_;
};

}  // namespace rankfair
