#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ringqed {

// SplitMix64 finalizer; good avalanche, used to derive independent streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_id(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Counter-based seed splitting: (root, stream, counter) -> child seed.
// Children of distinct counters are independent, so Monte Carlo trials can
// be evaluated in any order or on any thread with identical results.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                    std::uint64_t counter = 0) noexcept {
    return splitmix64(splitmix64(root ^ splitmix64(stream)) + counter);
}

using Rng = std::mt19937_64;

} // namespace ringqed
