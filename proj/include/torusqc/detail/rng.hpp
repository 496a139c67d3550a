// torusqc — quantum-classical correspondence for chaotic torus maps
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <random>

namespace torusqc::detail {

/// One step of the splitmix64 generator (Steele, Lea & Flood).  Used only to
/// expand a (seed, stream-index) pair into well-mixed seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-stream engine derived from (seed, index).
///
/// Every worker draws from its own substream, so results are reproducible
/// for any degree of parallelism and any work-stealing order.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    std::uint64_t c = splitmix64(s);
    std::uint64_t d = splitmix64(s);
    std::seed_seq seq{
        static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
        static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
        static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) with full 53-bit resolution.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

} // namespace torusqc::detail
