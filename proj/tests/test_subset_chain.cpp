#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "scrambling/subset_chain.hpp"

using namespace scrambling;

TEST(SubsetStep, SingletonOutcomeLaw) {
    RandomSource rng(61);
    const std::vector<Edge> matching = {{1, 2}, {3, 4}, {0, 5}};
    const int trials = 150000;
    std::map<std::vector<uint32_t>, int> counts;
    for (int k = 0; k < trials; ++k) {
        counts[step(SupportState::singleton(6, 1), matching, rng).members()]++;
    }
    ASSERT_EQ(counts.size(), 3u);
    const std::map<std::vector<uint32_t>, double> expected = {{{1, 2}, 9.0 / 15}, {{1}, 3.0 / 15}, {{2}, 3.0 / 15}};
    for (const auto& [set, p] : expected) {
        EXPECT_NEAR(counts[set] / double(trials), p, 3 * std::sqrt(p * (1 - p) / trials));
    }
}

TEST(SubsetStep, EmptyStaysEmptyAndPairsNeverVanish) {
    RandomSource rng(62);
    const std::vector<Edge> matching = {{0, 1}, {2, 3}};
    EXPECT_TRUE(step(SupportState(4), matching, rng).empty());
    SupportState s(4);
    s.insert(0);
    s.insert(1);
    for (int k = 0; k < 10000; ++k) EXPECT_FALSE(step(s, matching, rng).empty());
}

TEST(SubsetStep, RejectsInvalidMatching) {
    RandomSource rng(63);
    const std::vector<Edge> partial = {{0, 1}};
    EXPECT_THROW(step(SupportState(4), partial, rng), std::invalid_argument);
    const std::vector<Edge> reused = {{0, 1}, {1, 2}};
    EXPECT_THROW(step(SupportState(4), reused, rng), std::invalid_argument);
}

TEST(SubsetStep, UnmatchedQubitKeepsMembership) {
    RandomSource rng(64);
    const std::vector<Edge> matching = {{0, 1}};
    SupportState s(3);
    s.insert(2);
    for (int k = 0; k < 100; ++k) EXPECT_EQ(step(s, matching, rng).members(), std::vector<uint32_t>{2});
}

TEST(Growth, TwoQubitFirstStepLaw) {
    RandomSource rng(65);
    const int trials = 100000;
    int two = 0;
    for (int k = 0; k < trials; ++k) {
        const auto sizes = simulate_growth(2, 1, rng);
        ASSERT_EQ(sizes[0], 1u);
        ASSERT_TRUE(sizes[1] == 1 || sizes[1] == 2);
        two += sizes[1] == 2;
    }
    EXPECT_NEAR(two / double(trials), 0.6, 3 * std::sqrt(0.24 / trials));
}

TEST(Growth, EnvelopeNonemptyAndHalving) {
    RandomSource rng(66);
    for (int trial = 0; trial < 200; ++trial) {
        const auto sizes = simulate_growth(128, 20, rng);
        for (size_t t = 0; t < sizes.size(); ++t) {
            EXPECT_GE(sizes[t], 1u);
            EXPECT_LE(sizes[t], std::min<uint64_t>(128, uint64_t{1} << std::min<size_t>(t, 63)));
            if (t > 0) {
                EXPECT_LE(sizes[t], 2 * sizes[t - 1]);
                EXPECT_GE(sizes[t], (sizes[t - 1] + 1) / 2);
            }
        }
    }
}

TEST(Survival, Examples) {
    RandomSource rng(67);
    EXPECT_EQ(survival_probability(64, 1.0 / 64, 0, 100, rng).estimate, 1.0);
    // n=4, f=1/4, depth 1: stays singleton with probability 6/15.
    const auto e = survival_probability(4, 0.25, 1, 60000, rng);
    EXPECT_NEAR(e.estimate, 0.4, 3 * std::sqrt(0.24 / 60000));
    EXPECT_LE(e.lower, e.estimate);
    EXPECT_GE(e.upper, e.estimate);
}

TEST(Survival, NonIncreasingInDepth) {
    RandomSource rng(68);
    double prev_upper = 1.0;
    for (uint64_t depth : {2u, 4u, 6u, 8u, 12u}) {
        const auto e = survival_probability(256, 1.0 / 8, depth, 4000, rng);
        EXPECT_LE(e.lower, prev_upper) << "depth " << depth;
        prev_upper = e.upper;
    }
}

TEST(Wilson, KnownInterval) {
    const auto w = wilson_interval(50, 100);
    EXPECT_NEAR(w.estimate, 0.5, 1e-15);
    EXPECT_NEAR(w.lower, 0.4038, 1e-4);
    EXPECT_NEAR(w.upper, 0.5962, 1e-4);
    const auto z = wilson_interval(0, 10);
    EXPECT_EQ(z.lower, 0.0);
    EXPECT_GT(z.upper, 0.0);
}

TEST(Coupon, Examples) {
    RandomSource rng(69);
    EXPECT_EQ(coupon_check(32, 5, 200, 32, 0.125, rng).containment.estimate, 0.0);
    EXPECT_EQ(coupon_check(32, 5, 200, 0, 0.125, rng).containment.estimate, 1.0);
    const uint32_t n = 1024;
    const auto depth = static_cast<uint64_t>(10 * std::log2(n));
    for (uint32_t c : {8u, 16u, 32u}) {
        const auto e = coupon_check(n, depth, 400, c, 0.125, rng);
        EXPECT_LE(e.containment.lower, e.reference) << "c=" << c;
        EXPECT_LE(e.mean_conditional, e.reference + 0.02);
    }
}
