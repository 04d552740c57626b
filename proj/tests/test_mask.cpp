#include <gtest/gtest.h>

#include "pic/mask.hpp"
#include "support.hpp"

using namespace pic;

TEST(Criteria, StationaryCriterionFormula) {
    const auto f = testing_support::random_image(8, 7, 3);
    const auto crit = criterion_stationary(f, 2.0);
    const auto L = laplacian(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double g = f[i] - 2.0 * L[i];
        EXPECT_NEAR(crit[i], g * g, 1e-14);
    }
}

TEST(Criteria, TimeDependentReductions) {
    const auto f = testing_support::random_image(8, 7, 4);
    // u_n = 0 reduces to the stationary criterion with alpha' = dt alpha
    const auto a = criterion_timedep(f, ImageGrid(8, 7), 5.0, 0.1);
    const auto b = criterion_stationary(f, 0.5);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
    // u_n = f gives (dt alpha Lap f)^2
    const auto c = criterion_timedep(f, f, 5.0, 0.1);
    const auto h = h1_criterion(f);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(c[i], 0.25 * h[i], 1e-14);
}

TEST(Criteria, FieldRejectsNegativeValues) {
    ImageGrid g(3, 3, 0.0);
    g[4] = -1.0;
    EXPECT_THROW(CriterionField{g}, std::invalid_argument);
}

TEST(ThresholdMask, ExactCountAndRanking) {
    const auto crit = criterion_stationary(testing_support::random_image(20, 20, 1), 1.0);
    for (double c : {0.05, 0.1, 0.25}) {
        const auto m = threshold_mask(crit, c);
        EXPECT_EQ(m.count(), budget_count(c, 400));
        double kept_min = 1e300, dropped_max = -1.0;
        for (std::size_t i = 0; i < 400; ++i) {
            if (m[i]) kept_min = std::min(kept_min, crit[i]);
            else dropped_max = std::max(dropped_max, crit[i]);
        }
        EXPECT_GE(kept_min, dropped_max);
    }
}

TEST(ThresholdMask, TiesGoToSmallerIndex) {
    const CriterionField flat(ImageGrid(4, 4, 1.0));
    const auto m = threshold_mask(flat, 0.25);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(m[i], i < 4);
}

TEST(ThresholdMask, ExcludeAndIncludeOnly) {
    const auto crit = criterion_stationary(testing_support::random_image(10, 10, 2), 1.0);
    const auto first = threshold_mask(crit, 0.1);
    const auto more = threshold_mask(crit, 0.1, &first);
    EXPECT_EQ(more.count(), 10u);
    for (std::size_t i = 0; i < 100; ++i) EXPECT_FALSE(first[i] && more[i]);
    const auto inner = threshold_mask(crit, 0.05, nullptr, &first);
    EXPECT_TRUE(inner.subset_of(first));
    EXPECT_EQ(inner.count(), 5u);
    EXPECT_THROW(threshold_mask(crit, 0.0), std::invalid_argument);
}

TEST(SoftProfile, InverseRoundTrips) {
    for (double mu : {1e-6, 1e-3, 0.05, 0.3, 0.7, 0.99}) {
        const double t = detail::soft_profile(mu);
        EXPECT_NEAR(detail::soft_inverse(t), mu, 1e-12 * std::max(1.0, mu));
    }
    EXPECT_EQ(detail::soft_inverse(0.0), 0.0);
    EXPECT_EQ(detail::soft_inverse(10.0), detail::soft_mu_max);
}

TEST(DensityField, MeanIsCalibrated) {
    const auto crit = criterion_stationary(testing_support::natural64(), 3.0);
    for (auto mode : {DensityMode::direct, DensityMode::soft_threshold})
        for (double c : {0.05, 0.1, 0.25}) {
            const auto d = density_field(crit, c, mode);
            EXPECT_NEAR(d.mean(), c, 1e-6);
            for (double v : d.values()) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
}

TEST(DensityField, ZeroCriterionFallsBackToUniform) {
    const CriterionField zero(ImageGrid(8, 8, 0.0));
    const auto out = density_field(zero, 0.2, DensityMode::direct);
    for (double v : out.values()) EXPECT_DOUBLE_EQ(v, 0.2);
}

TEST(HalftoneMask, TwoRegionCriterionSelectsRightHalfOnly) {
    ImageGrid g(16, 16, 0.0);
    for (std::size_t y = 0; y < 16; ++y)
        for (std::size_t x = 8; x < 16; ++x) g(x, y) = 1.0;
    const auto m = halftone_mask(CriterionField(g), 0.25, DensityMode::direct);
    for (std::size_t y = 0; y < 16; ++y)
        for (std::size_t x = 0; x < 8; ++x) EXPECT_FALSE(m(x, y));
    EXPECT_NEAR(double(m.count()), 64.0, 0.02 * 64.0);
}

TEST(HalftoneMask, BudgetWithinTwoPercent) {
    const auto f = testing_support::camera();
    const auto crit = criterion_stationary(f, 3.0);
    for (auto mode : {DensityMode::direct, DensityMode::soft_threshold})
        for (double c : {0.05, 0.1, 0.25}) {
            const double want = c * double(f.size());
            EXPECT_NEAR(double(halftone_mask(crit, c, mode).count()), want, 0.02 * want);
        }
}

TEST(ErrorDiffusion, ConstantDensityKeepsItsMean) {
    const auto m = error_diffusion(ImageGrid(40, 40, 0.3));
    EXPECT_NEAR(double(m.count()), 480.0, 10.0);
}

TEST(RandomMask, ExactCountAndSeeded) {
    const auto a = random_mask(32, 32, 0.1, 5);
    EXPECT_EQ(a.count(), 103u);
    EXPECT_EQ(random_mask(32, 32, 0.1, 5), a);
    EXPECT_NE(random_mask(32, 32, 0.1, 6), a);
}
