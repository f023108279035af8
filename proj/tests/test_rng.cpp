#include "qnet_asym/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace qnet_asym::rng;

TEST_CASE("philox4x32-10 known-answer vectors")
{
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of (seed, run, link, draw)")
{
    Stream a(42, 7, 3);
    Stream b(42, 7, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Stream c(42, 7, 4);
    Stream d(42, 8, 3);
    Stream e(43, 7, 3);
    Stream f(42, 7, 3);
    const auto x = f.next_u64();
    CHECK(c.next_u64() != x);
    CHECK(d.next_u64() != x);
    CHECK(e.next_u64() != x);
}

TEST_CASE("uniforms stay inside the open unit interval")
{
    Stream s(1, 0, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("geometric draws have mean 1/p")
{
    for (double p : {0.5, 0.1, 0.01}) {
        Stream s(99, 1, 0);
        const int n = 20000;
        double sum = 0.0;
        double sq = 0.0;
        std::uint64_t lo = ~0ull;
        for (int i = 0; i < n; ++i) {
            const auto k = s.geometric(p);
            lo = std::min(lo, k);
            sum += static_cast<double>(k);
            sq += static_cast<double>(k) * static_cast<double>(k);
        }
        const double mean = sum / n;
        const double se = std::sqrt((sq / n - mean * mean) / n);
        CAPTURE(p);
        CHECK(lo >= 1);
        CHECK(std::abs(mean - 1.0 / p) < 3.0 * se);
    }
    Stream s(5, 5, 5);
    CHECK(s.geometric(1.0) == 1);
}
