#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace octodyson {

/// Philox4x32-10 block function (Salmon et al., Random123). Stateless: the
/// same (key, counter) always yields the same block, which is what makes
/// sample streams independent of the worker schedule.
class Philox4x32 {
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Addresses one random draw: (seed; sample index, step, entry).
/// `entry` is the coordinate being drawn, `step` the time step (0 for the
/// exact time-t law), `sample` the matrix or path index.
struct DrawAddress {
    std::uint64_t sample = 0;
    std::uint32_t step = 0;
    std::uint32_t entry = 0;
};

class CounterRng {
  public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    constexpr Philox4x32::Counter block(const DrawAddress& at) const noexcept {
        return Philox4x32::generate({at.entry, at.step, static_cast<std::uint32_t>(at.sample),
                                     static_cast<std::uint32_t>(at.sample >> 32)},
                                    key_);
    }

    /// Two uniforms in the open interval (0, 1), 53 bits each.
    std::array<double, 2> uniform_pair(const DrawAddress& at) const noexcept {
        const auto b = block(at);
        const std::uint64_t u0 = (std::uint64_t{b[0]} << 32) | b[1];
        const std::uint64_t u1 = (std::uint64_t{b[2]} << 32) | b[3];
        return {to_open_unit(u0), to_open_unit(u1)};
    }

    double uniform(const DrawAddress& at) const noexcept { return uniform_pair(at)[0]; }

    /// Standard normal via Box-Muller (cosine branch).
    double normal(const DrawAddress& at) const noexcept {
        const auto [u, v] = uniform_pair(at);
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }

    /// Uniform integer in [0, bound) by 64-bit multiply-shift (bias < 2^-32 for our bounds).
    std::uint64_t below(const DrawAddress& at, std::uint64_t bound) const noexcept {
        const auto b = block(at);
        const std::uint64_t u = (std::uint64_t{b[0]} << 32) | b[1];
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(u) * bound) >> 64);
    }

  private:
    static double to_open_unit(std::uint64_t u) noexcept {
        return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
};

}  // namespace octodyson
