#include <gtest/gtest.h>

#include <cmath>

#include "pic/bessel.hpp"

using namespace pic::bessel;

TEST(Bessel, MatchesStandardLibraryOracle) {
    for (double z = 1e-4; z < 150.0; z *= 1.11) {
        EXPECT_NEAR(I0(z) / std::cyl_bessel_i(0.0, z), 1.0, 1e-12) << z;
        EXPECT_NEAR(I1(z) / std::cyl_bessel_i(1.0, z), 1.0, 1e-12) << z;
        EXPECT_NEAR(K0(z) / std::cyl_bessel_k(0.0, z), 1.0, 1e-12) << z;
        EXPECT_NEAR(K1(z) / std::cyl_bessel_k(1.0, z), 1.0, 1e-12) << z;
    }
}

TEST(Bessel, ValuesAtZeroAndSign) {
    EXPECT_EQ(I0(0.0), 1.0);
    EXPECT_EQ(I1(0.0), 0.0);
    EXPECT_EQ(I1(-2.0), -I1(2.0));
    EXPECT_THROW(K0(0.0), std::domain_error);
    EXPECT_THROW(K1(-1.0), std::domain_error);
}

TEST(Bessel, WronskianIdentity) {
    for (double z : {1.0, 2.0, 4.0}) EXPECT_NEAR(I0(z) * K1(z) + I1(z) * K0(z), 1.0 / z, 1e-10);
}

TEST(Bessel, SmallArgumentLogLaw) {
    const double law = -std::log(0.01) + std::log(2.0) - euler_gamma;
    EXPECT_NEAR(law, 4.7211, 1e-4);
    // the next term of the expansion is (z^2/4)(1 - ln(z/2) - gamma)
    const double next = 0.25e-4 * (1.0 - std::log(0.005) - euler_gamma);
    EXPECT_NEAR(K0(0.01), law + next, 1e-8);
    EXPECT_LT(std::abs(K0(0.01) - law) / law, 1e-4);
}

TEST(Bessel, PositiveAndFinite) {
    for (double z = 1e-3; z < 600.0; z *= 1.5) {
        EXPECT_GT(I0(z), 0.0);
        EXPECT_GT(K0(z), 0.0);
        EXPECT_TRUE(std::isfinite(I0(z)));
        EXPECT_TRUE(std::isfinite(K0(z)));
    }
}
