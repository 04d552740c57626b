#include <gtest/gtest.h>

#include "pic/image.hpp"
#include "support.hpp"

using namespace pic;
using testing_support::random_image;

TEST(ImageGrid, RejectsTinyOrMismatchedShapes) {
    EXPECT_THROW(ImageGrid(2, 5), ShapeError);
    EXPECT_THROW(ImageGrid(3, 3, std::vector<double>(8)), ShapeError);
    EXPECT_NO_THROW(ImageGrid(3, 3, std::vector<double>(9)));
}

TEST(ImageGrid, RowMajorIndexing) {
    ImageGrid g(4, 3);
    g(2, 1) = 5.0;
    EXPECT_EQ(g[1 * 4 + 2], 5.0);
}

TEST(Mask, CountTracksBits) {
    Mask m(5, 4);
    m.set(3, true);
    m.set(3, true);
    m.set(7, true);
    EXPECT_EQ(m.count(), 2u);
    m.set(3, false);
    EXPECT_EQ(m.count(), 1u);
    Mask other(5, 4);
    other.set(0, true);
    m |= other;
    EXPECT_EQ(m.count(), 2u);
    EXPECT_TRUE(other.subset_of(m));
    EXPECT_FALSE(m.subset_of(other));
}

TEST(Laplacian, ConstantAndLinearFields) {
    ImageGrid c(6, 5, 0.7);
    const auto out = laplacian(c);
    for (double v : out.values()) EXPECT_EQ(v, 0.0);

    // f(x, y) = x: zero in the interior; the mirror makes the first and last
    // column see a single neighbour at distance one.
    ImageGrid f(6, 5);
    for (std::size_t y = 0; y < 5; ++y)
        for (std::size_t x = 0; x < 6; ++x) f(x, y) = double(x);
    const auto L = laplacian(f);
    for (std::size_t y = 0; y < 5; ++y) {
        for (std::size_t x = 1; x + 1 < 6; ++x) EXPECT_EQ(L(x, y), 0.0);
        EXPECT_EQ(L(0, y), 1.0);
        EXPECT_EQ(L(5, y), -1.0);
    }
}

TEST(Laplacian, MatchesMirroredGhostCellStencil) {
    const auto u = random_image(5, 5, 11);
    const auto L = laplacian(u);
    const auto at = [&](long x, long y) {
        // ghost cell mirrors the boundary pixel
        x = std::clamp(x, 0L, 4L);
        y = std::clamp(y, 0L, 4L);
        return u(std::size_t(x), std::size_t(y));
    };
    for (long y = 0; y < 5; ++y)
        for (long x = 0; x < 5; ++x) {
            const double ref = at(x - 1, y) + at(x + 1, y) + at(x, y - 1) + at(x, y + 1) - 4.0 * at(x, y);
            EXPECT_NEAR(L(std::size_t(x), std::size_t(y)), ref, 1e-15);
        }
}

TEST(Laplacian, SumsToZeroUnderNeumann) {
    const auto u = random_image(17, 9, 3);
    EXPECT_NEAR(laplacian(u).sum(), 0.0, 1e-12);
}

TEST(GaussianBlur, PreservesConstantsAndMean) {
    ImageGrid c(9, 7, 0.25);
    const auto out = gaussian_blur(c, 1.3);
    for (double v : out.values()) EXPECT_NEAR(v, 0.25, 1e-15);
    const auto u = random_image(20, 16, 5);
    EXPECT_NEAR(gaussian_blur(u, 1.0).mean(), u.mean(), 1e-12);
}

TEST(GaussianBlur, SmallSigmaIsNearIdentity) {
    const auto u = random_image(12, 12, 8);
    EXPECT_LT(testing_support::max_abs_diff(gaussian_blur(u, 0.1), u), 0.01);
}

TEST(GaussianBlur, DeltaImageGivesSeparableKernel) {
    ImageGrid d(33, 33);
    d(16, 16) = 1.0;
    const auto k = gaussian_kernel(2.0);
    const auto r = std::ptrdiff_t(k.size() / 2);
    const auto b = gaussian_blur(d, 2.0);
    EXPECT_NEAR(b(16, 16), k[std::size_t(r)] * k[std::size_t(r)], 1e-15);
    for (std::ptrdiff_t dy = -r; dy <= r; ++dy)
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
            const double want = k[std::size_t(dx + r)] * k[std::size_t(dy + r)];
            EXPECT_NEAR(b(std::size_t(16 + dx), std::size_t(16 + dy)), want, 1e-15);
            EXPECT_NEAR(b(std::size_t(16 + dx), std::size_t(16 + dy)), b(std::size_t(16 - dx), std::size_t(16 + dy)), 1e-15);
        }
}

TEST(GaussianBlur, MatchesDense2DConvolutionWithMirror) {
    const auto u = random_image(10, 8, 21);
    const double sigma = 1.4;
    const auto k = gaussian_kernel(sigma);
    const auto r = std::ptrdiff_t(k.size() / 2);
    const auto b = gaussian_blur(u, sigma);
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 10; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t dy = -r; dy <= r; ++dy)
                for (std::ptrdiff_t dx = -r; dx <= r; ++dx)
                    acc += k[std::size_t(dx + r)] * k[std::size_t(dy + r)] *
                           u(detail::reflect(std::ptrdiff_t(x) + dx, 10), detail::reflect(std::ptrdiff_t(y) + dy, 8));
            EXPECT_NEAR(b(x, y), acc, 1e-13);
        }
}

TEST(Reflect, HalfSampleSymmetric) {
    EXPECT_EQ(detail::reflect(-1, 5), 0u);
    EXPECT_EQ(detail::reflect(-2, 5), 1u);
    EXPECT_EQ(detail::reflect(5, 5), 4u);
    EXPECT_EQ(detail::reflect(6, 5), 3u);
    EXPECT_EQ(detail::reflect(13, 5), 3u);
}
