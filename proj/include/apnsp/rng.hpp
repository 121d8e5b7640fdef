#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace apnsp {

// std::mt19937_64 output is fixed by the standard, but the std distributions are
// implementation-defined. Everything below derives values from raw 64-bit draws so
// graphs and initial weights are bit-identical across standard libraries.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over bytes.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Expands a root seed into an independent named stream ("graph-gen", "model-init", ...).
inline std::uint64_t stream_seed(std::uint64_t root, std::string_view name, std::uint64_t index = 0) {
    return splitmix64(splitmix64(root ^ fnv1a(name)) + index);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

/// Uniform integer in [0, n) by multiply-shift; n must be > 0.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(eng()) * n) >> 64);
}

} // namespace apnsp
