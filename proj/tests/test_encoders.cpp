#include <gtest/gtest.h>

#include "pic/encoders.hpp"
#include "support.hpp"

using namespace pic;

namespace {
MaskStrategy strategy(MaskKind kind, double c, double alpha, std::size_t N) {
    MaskStrategy s;
    s.kind = kind;
    s.c = c;
    s.alpha = alpha;
    s.steps = N;
    return s;
}
} // namespace

TEST(MaskKind, NamesRoundTrip) {
    for (int k = 0; k <= int(MaskKind::l2insta); ++k) EXPECT_EQ(parse_mask_kind(to_string(MaskKind(k))), MaskKind(k));
    EXPECT_EQ(parse_mask_kind("OPT_HALFTONE"), MaskKind::opt_halftone);
    EXPECT_THROW(parse_mask_kind("b-tree"), std::invalid_argument);
}

TEST(MaskStrategy, DensityDefaultsPerKind) {
    MaskStrategy s;
    s.kind = MaskKind::h1_halftone;
    EXPECT_EQ(s.density_mode(), DensityMode::direct);
    s.kind = MaskKind::opt_halftone;
    EXPECT_EQ(s.density_mode(), DensityMode::soft_threshold);
    s.density = DensityMode::direct;
    EXPECT_EQ(s.density_mode(), DensityMode::direct);
}

TEST(L2Dec, NestedChainEndsOnExactBudget) {
    const auto f = testing_support::crop(testing_support::camera(), 100, 80, 32, 32);
    const auto r = encode_l2dec(f, strategy(MaskKind::l2dec, 0.1, 1.0, 5));
    ASSERT_EQ(r.iterates.size(), 6u);
    EXPECT_EQ(r.mask.count(), 103u);
    for (std::size_t n = 1; n < r.iterates.size(); ++n) {
        EXPECT_TRUE(r.iterates[n].subset_of(r.iterates[n - 1]));
        EXPECT_LT(r.iterates[n].count(), r.iterates[n - 1].count());
    }
}

TEST(L2Dec, SingleStepIsTheBudget) {
    const auto f = testing_support::crop(testing_support::camera(), 100, 80, 32, 32);
    const auto r = encode_l2dec(f, strategy(MaskKind::l2dec, 0.1, 1.0, 1));
    EXPECT_EQ(r.mask.count(), 103u);
}

TEST(L2Inc, GrowingChainReachesNTimesIncrement) {
    const auto f = testing_support::crop(testing_support::camera(), 100, 80, 32, 32);
    const auto r = encode_l2inc(f, strategy(MaskKind::l2inc, 0.1, 1.0, 5));
    ASSERT_EQ(r.iterates.size(), 5u);
    EXPECT_EQ(r.mask.count(), 105u);
    for (std::size_t n = 1; n < r.iterates.size(); ++n) {
        EXPECT_TRUE(r.iterates[n - 1].subset_of(r.iterates[n]));
        EXPECT_EQ(r.iterates[n].count(), r.iterates[n - 1].count() + 21u);
    }
}

TEST(L2Insta, SingleStepEqualsStationaryHalftone) {
    const auto f = testing_support::natural64();
    auto s = strategy(MaskKind::l2insta, 0.1, 10.0, 1);
    const auto r = encode_l2insta(f, s);
    const auto ref = halftone_mask(criterion_stationary(f, s.dt * s.alpha), 0.1, s.density_mode());
    EXPECT_EQ(r.mask, ref);
}

TEST(L2Insta, MasksChangeBetweenStepsOnNoisyInput) {
    auto f = testing_support::crop(testing_support::camera(), 100, 80, 32, 32);
    NoiseSpec ns;
    ns.sigma = 0.1;
    ns.seed = 2;
    f = apply_noise(f, ns);
    const auto r = encode_l2insta(f, strategy(MaskKind::l2insta, 0.1, 1.0, 3));
    ASSERT_EQ(r.iterates.size(), 3u);
    EXPECT_GT(r.iterates[0].hamming(r.iterates[1]), 0u);
    for (const auto& K : r.iterates) EXPECT_NEAR(double(K.count()), 102.4, 0.02 * 102.4 + 1.0);
}

TEST(L2Sta, ReusesOneHalftone) {
    const auto f = testing_support::natural64();
    const auto r = encode_l2sta(f, strategy(MaskKind::l2sta, 0.1, 10.0, 1));
    EXPECT_EQ(r.mask, halftone_mask(criterion_stationary(f, 10.0), 0.1, DensityMode::soft_threshold));
}

TEST(Encoders, CustomEvolutionStepIsUsed) {
    const auto f = testing_support::natural64();
    std::size_t calls = 0;
    const EvolutionStep step = [&](const ImageGrid& u, const Mask&) {
        ++calls;
        return u;
    };
    encode_l2inc(f, strategy(MaskKind::l2inc, 0.1, 1.0, 4), f, step);
    EXPECT_EQ(calls, 4u);
}

TEST(BuildMask, BudgetsPerKind) {
    const auto f = testing_support::natural64();
    for (int k = 0; k <= int(MaskKind::l2insta); ++k) {
        auto s = strategy(MaskKind(k), 0.1, 3.0, 4);
        const auto m = build_mask(f, s).mask;
        const double want = 0.1 * 4096;
        switch (s.kind) {
        case MaskKind::opt_threshold:
        case MaskKind::h1_threshold:
        case MaskKind::random:
        case MaskKind::l2dec: EXPECT_EQ(m.count(), 410u); break;
        case MaskKind::l2inc: EXPECT_EQ(m.count(), 4u * 103u); break;
        default: EXPECT_NEAR(double(m.count()), want, 0.02 * want);
        }
    }
}

TEST(MaskStrategy, ValidatesBudget) {
    const auto f = testing_support::natural64();
    auto s = strategy(MaskKind::opt_threshold, 0.0, 3.0, 1);
    EXPECT_THROW(build_mask(f, s), std::invalid_argument);
    s.c = 1e-6;
    EXPECT_THROW(build_mask(f, s), std::invalid_argument);
    s = strategy(MaskKind::l2inc, 0.1, 3.0, 0);
    EXPECT_THROW(build_mask(f, s), std::invalid_argument);
}
