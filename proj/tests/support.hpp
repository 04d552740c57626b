#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pic/image.hpp"
#include "pic/noise.hpp"
#include "pic/pnm.hpp"

namespace testing_support {

inline std::string data_path(const std::string& name) { return std::string(PIC_TEST_DATA) + "/" + name; }

inline pic::ImageGrid camera() { return pic::read_pnm(data_path("camera256.pgm")); }

inline pic::ImageGrid crop(const pic::ImageGrid& f, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) {
    pic::ImageGrid out(w, h);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) out(x, y) = f(x0 + x, y0 + y);
    return out;
}

/// 64x64 window over the tripod and coat of the camera image.
inline pic::ImageGrid natural64() { return crop(camera(), 96, 64, 64, 64); }

inline pic::ImageGrid random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
    pic::Rng rng(seed);
    pic::ImageGrid g(w, h);
    for (auto& v : g.values()) v = rng.uniform();
    return g;
}

inline pic::Mask random_mask_p(std::size_t w, std::size_t h, double p, std::uint64_t seed) {
    pic::Rng rng(seed);
    pic::Mask m(w, h);
    for (std::size_t i = 0; i < w * h; ++i) m.set(i, rng.uniform() < p);
    return m;
}

/// Gaussian elimination with partial pivoting on a dense copy.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[p][k])) p = i;
        std::swap(A[k], A[p]);
        std::swap(b[k], b[p]);
        if (A[k][k] == 0.0) throw std::runtime_error("singular");
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = A[i][k] / A[k][k];
            for (std::size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

/// Full pixel system assembled directly from the stencil: identity rows on
/// the mask, (reaction + coeff deg) u_i - coeff sum_nb u_j = rhs_i elsewhere.
inline pic::ImageGrid dense_masked_solve(double reaction, double coeff, const pic::Mask& K, const pic::ImageGrid& rhs,
                                         const pic::ImageGrid& g) {
    const std::size_t w = rhs.width(), h = rhs.height(), n = w * h;
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const std::size_t i = y * w + x;
            if (K[i]) {
                A[i][i] = 1.0;
                b[i] = g[i];
                continue;
            }
            b[i] = rhs[i];
            A[i][i] = reaction;
            const auto nb = [&](std::size_t j) {
                A[i][i] += coeff;
                A[i][j] -= coeff;
            };
            if (x > 0) nb(i - 1);
            if (x + 1 < w) nb(i + 1);
            if (y > 0) nb(i - w);
            if (y + 1 < h) nb(i + w);
        }
    }
    return pic::ImageGrid(w, h, dense_solve(A, b));
}

inline double max_abs_diff(const pic::ImageGrid& a, const pic::ImageGrid& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testing_support
