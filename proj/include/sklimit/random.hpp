#pragma once

// Seed mixing and bit-exact uniform draws.
//
// std::mt19937_64 is fully specified by the standard, but the std::*_distribution
// adaptors are not, so uniforms and bounded integers are built here directly
// from the engine's 64-bit output.

#include <cstdint>
#include <random>

namespace sklimit {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the stream feeding spectral mode `mode` (0-based):
///   mix64(master ^ mix64(0x5eed'0000'0000'0000 + mode)).
/// Streams depend only on (master, mode), so adding modes leaves existing
/// streams untouched.
[[nodiscard]] constexpr std::uint64_t mode_stream_seed(std::uint64_t master,
                                                       std::uint64_t mode) noexcept {
    return mix64(master ^ mix64(0x5eed000000000000ULL + mode));
}

/// Master seed of Monte Carlo replication `r`:
///   mix64(master ^ mix64(0x7e91'0000'0000'0000 + r)).
[[nodiscard]] constexpr std::uint64_t replication_seed(std::uint64_t master,
                                                       std::uint64_t r) noexcept {
    return mix64(master ^ mix64(0x7e91000000000000ULL + r));
}

/// Uniform on the open interval (0, 1), 53 random bits.
[[nodiscard]] inline double uniform_open(Engine& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform integer in [0, n), Lemire's multiply-shift with rejection.
[[nodiscard]] inline std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
    __extension__ using u128 = unsigned __int128;
    std::uint64_t x = rng();
    u128 m = static_cast<u128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = rng();
            m = static_cast<u128>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace sklimit
