#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qthermo {

/// Named, reproducible random streams derived from one master seed.
/// Streams in use: "calibration", "noise", "bootstrap", "montecarlo".
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(master ^ h) + index);
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
    return std::mt19937_64(stream_seed(master, name, index));
}

}  // namespace qthermo
