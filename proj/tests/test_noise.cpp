#include <gtest/gtest.h>

#include <set>

#include "pic/noise.hpp"
#include "support.hpp"

using namespace pic;

TEST(Rng, SameSeedSameStream) {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        (void)c;
    }
    EXPECT_NE(Rng(42).next_u64(), Rng(43).next_u64());
}

TEST(Rng, NormalMomentsAreStandard) {
    Rng rng(7);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        s += v;
        s2 += v * v;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Rng, BelowStaysInRange) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7u);
    EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(Budget, CeilingWithRepresentationGuard) {
    EXPECT_EQ(budget_count(0.1, 65536), 6554u);
    EXPECT_EQ(budget_count(0.1, 1024), 103u);
    EXPECT_EQ(budget_count(0.3, 10), 3u);  // 0.3 * 10 is 3.0000000000000004
    EXPECT_EQ(budget_count(1.0, 17), 17u);
}

TEST(SampleDistinct, ReturnsDistinctIndices) {
    Rng rng(3);
    const auto v = sample_distinct(100, 40, rng);
    EXPECT_EQ(std::set<std::size_t>(v.begin(), v.end()).size(), 40u);
}

TEST(ApplyNoise, GaussianIsSeededAndClamped) {
    const ImageGrid f(32, 32, 0.5);
    NoiseSpec s;
    s.sigma = 0.3;
    s.seed = 9;
    const auto a = apply_noise(f, s), b = apply_noise(f, s);
    EXPECT_EQ(a, b);
    for (double v : a.values()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    s.seed = 10;
    EXPECT_NE(apply_noise(f, s), a);
}

TEST(ApplyNoise, ZeroSigmaIsIdentity) {
    const auto f = testing_support::random_image(8, 8, 1);
    NoiseSpec s;
    EXPECT_EQ(apply_noise(f, s), f);
}

TEST(ApplyNoise, ImpulseCountsAreExact) {
    const ImageGrid f(20, 20, 0.5);
    NoiseSpec s;
    s.fraction = 0.05;
    s.seed = 4;
    for (auto kind : {NoiseKind::salt, NoiseKind::pepper, NoiseKind::salt_pepper}) {
        s.kind = kind;
        const auto n = apply_noise(f, s);
        std::size_t ones = 0, zeros = 0;
        for (double v : n.values()) {
            ones += v == 1.0;
            zeros += v == 0.0;
        }
        EXPECT_EQ(ones + zeros, 20u);
        if (kind == NoiseKind::salt) { EXPECT_EQ(ones, 20u); }
        if (kind == NoiseKind::pepper) { EXPECT_EQ(zeros, 20u); }
        if (kind == NoiseKind::salt_pepper) { EXPECT_EQ(ones, 10u); }
    }
    s.fraction = 0.0;
    EXPECT_EQ(apply_noise(f, s), f);
}

TEST(ApplyNoise, RejectsInvalidParameters) {
    NoiseSpec s;
    s.sigma = -1.0;
    EXPECT_THROW(apply_noise(ImageGrid(4, 4), s), std::invalid_argument);
    s.kind = NoiseKind::salt;
    s.fraction = 1.5;
    EXPECT_THROW(apply_noise(ImageGrid(4, 4), s), std::invalid_argument);
}

TEST(L2Error, UnnormalizedDistance) {
    ImageGrid a(4, 4, 0.0), b(4, 4, 0.5);
    EXPECT_DOUBLE_EQ(l2_error(a, b), 2.0);
    EXPECT_THROW(l2_error(a, ImageGrid(5, 4)), ShapeError);
}
