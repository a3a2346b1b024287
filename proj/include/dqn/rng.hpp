#pragma once

#include <cstdint>
#include <initializer_list>

namespace dqn {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for an independent random stream keyed by (seed, epoch, sample, qubit).
/// Evaluation order and parallelism do not affect which numbers a sample sees.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t epoch, std::uint64_t sample,
                                    std::uint64_t qubit) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t part : {epoch, sample, qubit}) h = splitmix64(h ^ splitmix64(part + 0x632be59bd9b4e019ULL));
    return h;
}

/// Derives a child seed for a named purpose (weight init, split shuffling, ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
    return splitmix64(splitmix64(seed) ^ (purpose * 0xd1b54a32d192ed03ULL));
}

}  // namespace dqn
