#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "octodyson/rng.hpp"

using namespace octodyson;

// Published Random123 known-answer vectors for philox4x32-10.
TEST(Philox, KnownAnswerZero) {
    const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
    const auto out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                          {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
    const auto out = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                          {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, SameAddressSameDraw) {
    const CounterRng a(42), b(42);
    EXPECT_EQ(a.normal({7, 3, 11}), b.normal({7, 3, 11}));
    EXPECT_NE(a.normal({7, 3, 11}), a.normal({7, 3, 12}));
    EXPECT_NE(a.normal({7, 3, 11}), CounterRng(43).normal({7, 3, 11}));
}

TEST(CounterRng, HighSampleBitsReachCounter) {
    const CounterRng r(1);
    EXPECT_NE(r.uniform({1, 0, 0}), r.uniform({1 + (std::uint64_t{1} << 32), 0, 0}));
}

TEST(CounterRng, UniformsInOpenInterval) {
    const CounterRng r(5);
    for (std::uint64_t k = 0; k < 10000; ++k) {
        const auto [u, v] = r.uniform_pair({k, 0, 0});
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_GT(v, 0.0);
        ASSERT_LT(v, 1.0);
    }
}

TEST(CounterRng, NormalMoments) {
    const CounterRng r(9);
    const int count = 200000;
    double m1 = 0, m2 = 0, m4 = 0;
    for (int k = 0; k < count; ++k) {
        const double z = r.normal({static_cast<std::uint64_t>(k), 0, 0});
        m1 += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    m1 /= count;
    m2 /= count;
    m4 /= count;
    EXPECT_NEAR(m1, 0.0, 5 * std::sqrt(1.0 / count));
    EXPECT_NEAR(m2, 1.0, 5 * std::sqrt(2.0 / count));
    EXPECT_NEAR(m4, 3.0, 5 * std::sqrt(96.0 / count));
}

TEST(CounterRng, BelowCoversRange) {
    const CounterRng r(3);
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const auto v = r.below({k, 0, 0}, 5);
        ASSERT_LT(v, 5u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 5u);
}
