#pragma once

// Reproducible noise and the L2 error metric.
//
// Random streams come from xoshiro256** seeded through splitmix64; normal
// variates use the Box-Muller transform on that stream. Both are specified
// bit-for-bit, so benchmark tables reproduce across platforms and compilers
// (std::normal_distribution does not give that guarantee).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "pic/image.hpp"

namespace pic {

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        for (auto& s : state_) s = splitmix64(seed);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n) by rejection (no modulo bias).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: empty range");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        for (;;) {
            const std::uint64_t v = next_u64();
            if (v < limit) return v % n;
        }
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// ceil(c * n) with a guard against representation error in c * n.
inline std::size_t budget_count(double c, std::size_t n) {
    const double raw = c * double(n);
    const double r = std::round(raw);
    const double k = std::abs(raw - r) < 1e-9 ? r : std::ceil(raw);
    return static_cast<std::size_t>(std::clamp(k, 0.0, double(n)));
}

/// First k entries of a seeded partial Fisher-Yates shuffle of 0..n-1.
inline std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

enum class NoiseKind { gaussian, salt, pepper, salt_pepper };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double sigma = 0.0;     // gaussian only
    double fraction = 0.0;  // impulse kinds only
    std::uint64_t seed = 0;

    void validate() const {
        if (kind == NoiseKind::gaussian) {
            if (!(sigma >= 0.0)) throw std::invalid_argument("NoiseSpec: sigma must be >= 0");
        } else if (!(fraction >= 0.0 && fraction <= 1.0)) {
            throw std::invalid_argument("NoiseSpec: fraction must lie in [0,1]");
        }
    }
};

inline NoiseKind parse_noise_kind(const std::string& s) {
    if (s == "gaussian") return NoiseKind::gaussian;
    if (s == "salt") return NoiseKind::salt;
    if (s == "pepper") return NoiseKind::pepper;
    if (s == "salt_pepper" || s == "salt-pepper") return NoiseKind::salt_pepper;
    throw std::invalid_argument("unknown noise kind '" + s + "'");
}

/// Gaussian: add N(0, sigma^2) per pixel, then clamp to [0,1].
/// Impulse: ceil(fraction * N) distinct pixels are forced to 1 (salt) or 0
/// (pepper); salt_pepper splits them, salt taking the odd one.
inline ImageGrid apply_noise(const ImageGrid& img, const NoiseSpec& spec) {
    spec.validate();
    ImageGrid out(img);
    Rng rng(spec.seed);
    if (spec.kind == NoiseKind::gaussian) {
        if (spec.sigma == 0.0) return out;
        for (auto& v : out.values()) v = std::clamp(v + spec.sigma * rng.normal(), 0.0, 1.0);
        return out;
    }
    const std::size_t k = budget_count(spec.fraction, img.size());
    const auto picked = sample_distinct(img.size(), k, rng);
    const std::size_t n_salt = spec.kind == NoiseKind::salt     ? k
                               : spec.kind == NoiseKind::pepper ? 0
                                                                : (k + 1) / 2;
    for (std::size_t i = 0; i < picked.size(); ++i) out[picked[i]] = i < n_salt ? 1.0 : 0.0;
    return out;
}

/// sqrt(sum (a_i - b_i)^2), the unnormalized discrete L2 distance.
inline double l2_error(const ImageGrid& a, const ImageGrid& b) {
    require_same_shape(a, b, "l2_error");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace pic
