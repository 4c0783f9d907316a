#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace mfglab {

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
// Every draw is a pure function of (key, counter), so particle loops can be
// sharded across threads in any order and still produce bit-identical
// streams. Keys encode (seed, purpose, replication); counters encode
// (particle, step, slot).

namespace detail {

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo32(kM0, ctr[0], hi0, lo0);
        detail::mulhilo32(kM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

/// Identifies an independent stream of draws.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t purpose = 0;      // distinguishes increments / initials / reference draws
    std::uint64_t replication = 0;  // Monte Carlo replication index

    std::array<std::uint32_t, 2> philox_key() const {
        std::uint64_t k = detail::splitmix64(seed ^ detail::splitmix64(purpose));
        k = detail::splitmix64(k + replication);
        return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }
};

// Purposes (arbitrary distinct constants).
namespace rng_purpose {
constexpr std::uint64_t kIncrements = 1;
constexpr std::uint64_t kInitialDraws = 2;
constexpr std::uint64_t kReferenceSample = 3;
constexpr std::uint64_t kProbe = 4;
}  // namespace rng_purpose

class CounterRng {
public:
    explicit CounterRng(StreamKey key) : key_(key.philox_key()) {}

    /// Uniform on (0,1], 53-bit resolution, pure function of the indices.
    double uniform(std::uint64_t particle, std::uint64_t step, std::uint32_t slot) const {
        const auto block = block_at(particle, step, slot);
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(block[0]) << 32) | block[1];
        return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on one Philox block.
    double normal(std::uint64_t particle, std::uint64_t step, std::uint32_t slot) const {
        const auto block = block_at(particle, step, slot);
        const std::uint64_t b1 =
            (static_cast<std::uint64_t>(block[0]) << 32) | block[1];
        const std::uint64_t b2 =
            (static_cast<std::uint64_t>(block[2]) << 32) | block[3];
        const double u1 = (static_cast<double>(b1 >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = (static_cast<double>(b2 >> 11) + 0.5) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::array<std::uint32_t, 4> block_at(std::uint64_t particle, std::uint64_t step,
                                          std::uint32_t slot) const {
        // 32-bit lanes: particle and step both get a 32+16-bit split so that
        // indices beyond 2^32 cannot collide.
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(particle),
            static_cast<std::uint32_t>(step),
            static_cast<std::uint32_t>((particle >> 32) ^ ((step >> 32) << 16)),
            slot};
        return philox4x32(ctr, key_);
    }

    std::array<std::uint32_t, 2> key_;
};

}  // namespace mfglab
