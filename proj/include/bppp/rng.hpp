// rng.hpp
// Seed mixing and per-stream engines. Every randomized routine takes a seed
// and derives one engine per logical stream (draw, replicate, column, ...),
// so results do not depend on thread scheduling.

#pragma once

#include <cstdint>
#include <random>

namespace bppp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

using RngEngine = std::mt19937_64;

inline RngEngine make_stream(std::uint64_t seed, std::uint64_t stream) {
    return RngEngine(mix_seed(seed, stream));
}

}  // namespace bppp
