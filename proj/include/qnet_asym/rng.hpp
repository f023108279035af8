#pragma once

// Philox4x32-10 counter-based generator.  A draw is a pure function of
// (key, counter), so any (run, link, draw) triple can be evaluated in any
// order on any thread with the same result.

#include <array>
#include <cmath>
#include <cstdint>

namespace qnet_asym::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32_10(Counter ctr, Key key)
{
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// Independent stream for one (run, link) pair under a master seed.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t run, std::uint32_t link)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          run_lo_(static_cast<std::uint32_t>(run)),
          run_hi_(static_cast<std::uint32_t>(run >> 32)),
          link_(link)
    {
    }

    std::uint64_t next_u64()
    {
        const Counter out = philox4x32_10({draw_++, link_, run_lo_, run_hi_}, key_);
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Number of Bernoulli(p) trials up to and including the first success; p in (0, 1].
    std::uint64_t geometric(double p)
    {
        const double u = uniform();
        if (p >= 1.0) return 1;
        const double k = std::ceil(std::log(u) / std::log1p(-p));
        if (!(k < 9.0e18)) return static_cast<std::uint64_t>(9.0e18);
        return k < 1.0 ? 1 : static_cast<std::uint64_t>(k);
    }

    std::uint32_t draws() const { return draw_; }

private:
    Key key_;
    std::uint32_t run_lo_;
    std::uint32_t run_hi_;
    std::uint32_t link_;
    std::uint32_t draw_ = 0;
};

}  // namespace qnet_asym::rng
