#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spex {

/// splitmix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for substream `index` of stream `stream` under a base seed.
/// Depends only on its arguments, so results do not depend on worker scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept {
    return mix64(mix64(mix64(base) ^ (stream * 0xd1b54a32d192ed03ULL)) ^ index);
}

/// Stream tags used with derive_seed.
namespace streams {
inline constexpr std::uint64_t kLayout = 1;
inline constexpr std::uint64_t kDay = 2;
inline constexpr std::uint64_t kReplication = 3;
inline constexpr std::uint64_t kMonteCarlo = 4;
inline constexpr std::uint64_t kRestart = 5;
inline constexpr std::uint64_t kField = 6;
}  // namespace streams

/// 64-bit Mersenne twister with platform-independent real variates.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Unit-rate exponential.
    double exponential() { return -std::log1p(-uniform()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace spex
