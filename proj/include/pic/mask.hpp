#pragma once

// Saliency criteria and the mask selectors built on them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pic/image.hpp"
#include "pic/noise.hpp"

namespace pic {

/// Per-pixel nonnegative saliency. Shares ImageGrid's layout.
class CriterionField {
public:
    CriterionField() = default;
    explicit CriterionField(ImageGrid values) : values_(std::move(values)) {
        for (double v : values_.values())
            if (!(v >= 0.0)) throw std::invalid_argument("CriterionField: values must be >= 0");
    }

    const ImageGrid& values() const noexcept { return values_; }
    std::size_t width() const noexcept { return values_.width(); }
    std::size_t height() const noexcept { return values_.height(); }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    CriterionField scaled(double lambda) const {
        ImageGrid v(values_);
        for (auto& x : v.values()) x *= lambda;
        return CriterionField(std::move(v));
    }

private:
    ImageGrid values_;
};

inline ImageGrid presmooth(const ImageGrid& f, double sigma) {
    return sigma > 0.0 ? gaussian_blur(f, sigma) : f;
}

/// (f_s - alpha Lap f_s)^2 with f_s the optionally presmoothed image.
inline CriterionField criterion_stationary(const ImageGrid& f, double alpha,
                                           double presmooth_sigma = 0.0) {
    const ImageGrid fs = presmooth(f, presmooth_sigma);
    const ImageGrid lap = laplacian(fs);
    ImageGrid c(f.width(), f.height());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double g = fs[i] - alpha * lap[i];
        c[i] = g * g;
    }
    return CriterionField(std::move(c));
}

/// (f_s - dt alpha Lap f_s - u_n)^2.
inline CriterionField criterion_timedep(const ImageGrid& f, const ImageGrid& u_n, double alpha,
                                        double dt, double presmooth_sigma = 0.0) {
    require_same_shape(f, u_n, "criterion_timedep");
    const ImageGrid fs = presmooth(f, presmooth_sigma);
    const ImageGrid lap = laplacian(fs);
    ImageGrid c(f.width(), f.height());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double g = fs[i] - dt * alpha * lap[i] - u_n[i];
        c[i] = g * g;
    }
    return CriterionField(std::move(c));
}

/// (Lap f_s)^2, the homogeneous-diffusion (H1) saliency.
inline CriterionField h1_criterion(const ImageGrid& f, double presmooth_sigma = 0.0) {
    ImageGrid lap = laplacian(presmooth(f, presmooth_sigma));
    for (auto& v : lap.values()) v = v * v;
    return CriterionField(std::move(lap));
}

/// Keeps the ceil(c N) largest criterion values among the eligible pixels.
/// Eligible = include_only if given, else the complement of exclude, else all.
/// Ties go to the smaller row-major index.
inline Mask threshold_mask(const CriterionField& crit, double c,
                           const Mask* exclude = nullptr, const Mask* include_only = nullptr) {
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("threshold_mask: c must lie in (0,1]");
    if (exclude && include_only)
        throw std::invalid_argument("threshold_mask: exclude and include_only are exclusive");
    const std::size_t n = crit.size();
    const std::size_t k = budget_count(c, n);

    std::vector<std::size_t> eligible;
    eligible.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (include_only && !(*include_only)[i]) continue;
        if (exclude && (*exclude)[i]) continue;
        eligible.push_back(i);
    }
    const auto by_rank = [&](std::size_t a, std::size_t b) {
        if (crit[a] != crit[b]) return crit[a] > crit[b];
        return a < b;
    };
    const std::size_t take = std::min(k, eligible.size());
    std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(take),
                      eligible.end(), by_rank);

    Mask m(crit.width(), crit.height());
    for (std::size_t j = 0; j < take; ++j) m.set(eligible[j], true);
    return m;
}

enum class DensityMode { direct, soft_threshold };

inline DensityMode parse_density_mode(const std::string& s) {
    if (s == "direct") return DensityMode::direct;
    if (s == "soft" || s == "soft_threshold" || s == "soft-threshold") return DensityMode::soft_threshold;
    throw std::invalid_argument("unknown density mode '" + s + "'");
}

namespace detail {

inline constexpr double soft_mu_min = 1e-9;
inline constexpr double soft_mu_max = 1.0 - 1e-9;

/// mu^2 / |1 - ln mu|, increasing on (0, 1).
inline double soft_profile(double mu) { return mu * mu / std::abs(1.0 - std::log(mu)); }

/// Inverse of soft_profile on [soft_mu_min, soft_mu_max], clamped at the ends.
inline double soft_inverse(double t) {
    if (t <= soft_profile(soft_mu_min)) return t <= 0.0 ? 0.0 : soft_mu_min;
    if (t >= soft_profile(soft_mu_max)) return soft_mu_max;
    // In s = ln mu the equation is F(s) = 2s - ln(1 - s) - ln t = 0 with F
    // increasing and convex, so Newton started right of the root descends
    // monotonically onto it.
    const double lt = std::log(t);
    double s = std::log(soft_mu_max);
    for (int it = 0; it < 100; ++it) {
        const double F = 2.0 * s - std::log1p(-s) - lt;
        const double step = F / (2.0 + 1.0 / (1.0 - s));
        s -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(s))) break;
    }
    return std::clamp(std::exp(s), soft_mu_min, soft_mu_max);
}

/// Largest bracket point where `mean_at` still undershoots the target.
template <typename MeanAt>
double calibrate_scale(MeanAt mean_at, double target, double tol) {
    double lo = 1.0, hi = 1.0;
    while (mean_at(hi) < target && hi < 1e300) hi *= 4.0;
    while (mean_at(lo) > target && lo > 1e-300) lo *= 0.25;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double m = mean_at(mid);
        if (std::abs(m - target) <= tol) return mid;
        if (m < target) lo = mid;
        else hi = mid;
        if (hi / lo - 1.0 < 1e-15) break;
    }
    return std::sqrt(lo * hi);
}

} // namespace detail

/// Continuous density in [0,1] with mean c that increases with the criterion.
///   direct:         d = min(1, lambda * crit)
///   soft_threshold: d = mu with mu^2 / |1 - ln mu| = lambda * crit
/// lambda is calibrated by bisection so that mean(d) = c to 1e-6. A criterion
/// that vanishes identically falls back to the uniform density c; when too
/// few pixels are salient, the shortfall is spread uniformly over the rest.
inline ImageGrid density_field(const CriterionField& crit, double c, DensityMode mode) {
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("density_field: c must lie in (0,1)");
    const std::size_t n = crit.size();
    ImageGrid d(crit.width(), crit.height());
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i) positive += crit[i] > 0.0;

    if (positive == 0) {
        for (auto& v : d.values()) v = c;
        return d;
    }
    const double dmax = mode == DensityMode::direct ? 1.0 : detail::soft_mu_max;
    if (double(positive) * dmax <= c * double(n)) {
        const double rest = (c * double(n) - double(positive) * dmax) / double(n - positive);
        for (std::size_t i = 0; i < n; ++i) d[i] = crit[i] > 0.0 ? dmax : rest;
        return d;
    }

    const auto fill = [&](double lambda) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = lambda * crit[i];
            d[i] = mode == DensityMode::direct ? std::min(1.0, t) : detail::soft_inverse(t);
            s += d[i];
        }
        return s / double(n);
    };
    const double lambda = detail::calibrate_scale(fill, c, 1e-6);
    fill(lambda);
    return d;
}

/// Serpentine Floyd-Steinberg error diffusion (7/16, 3/16, 5/16, 1/16),
/// threshold 1/2. Rows alternate direction; the weights mirror with them.
/// Near the border the weights are renormalised over the neighbours that
/// exist, so no error leaves the image and the count tracks sum(density).
inline Mask error_diffusion(const ImageGrid& density) {
    const std::size_t w = density.width(), h = density.height();
    std::vector<double> buf(density.values().begin(), density.values().end());
    Mask m(w, h);
    struct Tap { std::ptrdiff_t dx; std::size_t dy; double weight; };
    for (std::size_t y = 0; y < h; ++y) {
        const bool ltr = (y % 2) == 0;
        const std::ptrdiff_t dir = ltr ? 1 : -1;
        const Tap taps[] = {{dir, 0, 7.0 / 16.0}, {-dir, 1, 3.0 / 16.0}, {0, 1, 5.0 / 16.0}, {dir, 1, 1.0 / 16.0}};
        for (std::size_t s = 0; s < w; ++s) {
            const std::size_t x = ltr ? s : w - 1 - s;
            const std::size_t i = y * w + x;
            const double old = buf[i];
            const double q = old >= 0.5 ? 1.0 : 0.0;
            if (q > 0.0) m.set(i, true);
            const double err = old - q;

            const auto inside = [&](const Tap& t) {
                const std::ptrdiff_t nx = std::ptrdiff_t(x) + t.dx;
                return nx >= 0 && nx < std::ptrdiff_t(w) && y + t.dy < h;
            };
            double total = 0.0;
            for (const auto& t : taps)
                if (inside(t)) total += t.weight;
            if (total == 0.0) continue;
            for (const auto& t : taps)
                if (inside(t)) buf[(y + t.dy) * w + std::size_t(std::ptrdiff_t(x) + t.dx)] += err * t.weight / total;
        }
    }
    return m;
}

inline Mask halftone_mask(const CriterionField& crit, double c, DensityMode mode) {
    return error_diffusion(density_field(crit, c, mode));
}

/// Exactly ceil(c N) distinct pixels drawn uniformly from the seeded stream.
inline Mask random_mask(std::size_t width, std::size_t height, double c, std::uint64_t seed) {
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("random_mask: c must lie in (0,1]");
    Rng rng(seed);
    Mask m(width, height);
    for (const auto i : sample_distinct(width * height, budget_count(c, width * height), rng))
        m.set(i, true);
    return m;
}

} // namespace pic
