#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace dgbm {

// Counter-based generator: every draw is a pure function of (seed, stream,
// index), so any path of a Monte Carlo ensemble can be reproduced in
// isolation and parallel evaluation cannot perturb the numbers.

namespace detail {

inline constexpr std::uint32_t philox_m0 = 0xD2511F53u;
inline constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
inline constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
inline constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

inline void philox_mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                           std::uint32_t& lo) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

}  // namespace detail

/// One 4x32 block of the 10-round Philox permutation.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::philox_mulhilo(detail::philox_m0, ctr[0], hi0, lo0);
        detail::philox_mulhilo(detail::philox_m1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += detail::philox_w0;
        key[1] += detail::philox_w1;
    }
    return ctr;
}

/// 128 random bits addressed by (seed, stream, index), as two 64-bit words.
inline std::pair<std::uint64_t, std::uint64_t> random_block(std::uint64_t seed,
                                                            std::uint64_t stream,
                                                            std::uint64_t index) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const std::array<std::uint32_t, 4> out = philox4x32(ctr, key);
    return {static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32),
            static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32)};
}

/// Uniform double in (0, 1), addressed draw. The half-ulp offset keeps the
/// value away from 0 so logarithms stay finite.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t bits = random_block(seed, stream, index).first;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

struct NormalPair {
    double z0;
    double z1;
};

/// Two independent standard normals from one block, by Box-Muller.
inline NormalPair normal_pair(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t pair_index) {
    const auto [x0, x1] = random_block(seed, stream, pair_index);
    const double u1 = (static_cast<double>(x0 >> 11) + 0.5) * 0x1.0p-53;  // in (0, 1)
    const double u2 = static_cast<double>(x1 >> 11) * 0x1.0p-53;          // in [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586 * u2;
    return NormalPair{radius * std::cos(angle), radius * std::sin(angle)};
}

/// Random-access view of one path's standard-normal increments. Sequential
/// use hits the cached Box-Muller pair every other step.
class GaussianStream {
  public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    /// Normal draw for simulation step k; pure in (seed, stream, k).
    double at(std::uint64_t k) {
        const std::uint64_t pair_index = k >> 1;
        if (pair_index != cached_index_) {
            cache_ = normal_pair(seed_, stream_, pair_index);
            cached_index_ = pair_index;
        }
        return (k & 1u) == 0 ? cache_.z0 : cache_.z1;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t cached_index_ = ~std::uint64_t{0};
    NormalPair cache_{0.0, 0.0};
};

}  // namespace dgbm
