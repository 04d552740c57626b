#pragma once

// Pixel grids, masks and the discrete operators shared by every module.
//
// Conventions: unit pixel spacing, row-major storage, and Neumann boundaries
// realized by half-sample mirror ghost cells (the ghost value equals the
// boundary pixel), so constants are in the kernel of the Laplacian and the
// Laplacian sums to zero over the grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pic {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ImageGrid {
public:
    static constexpr std::size_t min_extent = 3;

    ImageGrid() = default;

    ImageGrid(std::size_t width, std::size_t height, double fill = 0.0)
        : width_(width), height_(height), data_(width * height, fill) {
        check_extent();
    }

    ImageGrid(std::size_t width, std::size_t height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        check_extent();
        if (data_.size() != width_ * height_)
            throw ShapeError("ImageGrid: data length does not match width*height");
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
    double operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool same_shape(const ImageGrid& o) const noexcept {
        return width_ == o.width_ && height_ == o.height_;
    }

    void clamp(double lo = 0.0, double hi = 1.0) {
        for (auto& v : data_) v = std::clamp(v, lo, hi);
    }

    ImageGrid clamped(double lo = 0.0, double hi = 1.0) const {
        ImageGrid out(*this);
        out.clamp(lo, hi);
        return out;
    }

    double sum() const noexcept {
        double s = 0.0;
        for (double v : data_) s += v;
        return s;
    }
    double mean() const noexcept { return data_.empty() ? 0.0 : sum() / double(data_.size()); }
    double min() const { return *std::min_element(data_.begin(), data_.end()); }
    double max() const { return *std::max_element(data_.begin(), data_.end()); }

    friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

private:
    void check_extent() const {
        if (width_ < min_extent || height_ < min_extent)
            throw ShapeError("ImageGrid: width and height must be at least 3");
    }

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> data_;
};

/// Boolean pixel set K. The population count is kept in sync with the bits.
class Mask {
public:
    Mask() = default;
    Mask(std::size_t width, std::size_t height, bool fill = false)
        : width_(width), height_(height), bits_(width * height, fill ? 1 : 0),
          count_(fill ? width * height : 0) {}

    static Mask like(const ImageGrid& img, bool fill = false) {
        return Mask(img.width(), img.height(), fill);
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }
    std::size_t count() const noexcept { return count_; }

    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    bool operator()(std::size_t x, std::size_t y) const { return bits_[y * width_ + x] != 0; }

    void set(std::size_t i, bool on = true) {
        const unsigned char v = on ? 1 : 0;
        if (bits_[i] == v) return;
        bits_[i] = v;
        if (on) ++count_;
        else --count_;
    }
    void set(std::size_t x, std::size_t y, bool on) { set(y * width_ + x, on); }

    bool matches(const ImageGrid& img) const noexcept {
        return width_ == img.width() && height_ == img.height();
    }
    bool same_shape(const Mask& o) const noexcept {
        return width_ == o.width_ && height_ == o.height_;
    }

    /// True when every pixel of *this is also in `other`.
    bool subset_of(const Mask& other) const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] && !other.bits_[i]) return false;
        return true;
    }

    Mask& operator|=(const Mask& o) {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (o.bits_[i]) set(i, true);
        return *this;
    }

    std::size_t hamming(const Mask& o) const {
        std::size_t d = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i) d += (bits_[i] != o.bits_[i]);
        return d;
    }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<unsigned char> bits_;
    std::size_t count_ = 0;
};

struct GradPair {
    ImageGrid dx;
    ImageGrid dy;
};

inline void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what) {
    if (!a.same_shape(b)) throw ShapeError(std::string(what) + ": shape mismatch");
}

inline void require_same_shape(const ImageGrid& a, const Mask& m, const char* what) {
    if (!m.matches(a)) throw ShapeError(std::string(what) + ": mask shape mismatch");
}

namespace detail {

/// Half-sample symmetric index reflection into [0, n), valid for any offset.
inline std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
    const auto period = static_cast<std::ptrdiff_t>(2 * n);
    i %= period;
    if (i < 0) i += period;
    if (i >= static_cast<std::ptrdiff_t>(n)) i = period - 1 - i;
    return static_cast<std::size_t>(i);
}

} // namespace detail

/// 5-point Laplacian, Neumann boundary by mirror ghost cells. Equivalent to
/// summing (u_nb - u_c) over the in-grid 4-neighbours.
inline ImageGrid laplacian(const ImageGrid& img) {
    const std::size_t w = img.width(), h = img.height();
    ImageGrid out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double c = img(x, y);
            double acc = 0.0;
            if (x > 0) acc += img(x - 1, y) - c;
            if (x + 1 < w) acc += img(x + 1, y) - c;
            if (y > 0) acc += img(x, y - 1) - c;
            if (y + 1 < h) acc += img(x, y + 1) - c;
            out(x, y) = acc;
        }
    }
    return out;
}

/// Forward differences; the last column of dx and last row of dy are zero.
inline GradPair gradient(const ImageGrid& img) {
    const std::size_t w = img.width(), h = img.height();
    GradPair g{ImageGrid(w, h), ImageGrid(w, h)};
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (x + 1 < w) g.dx(x, y) = img(x + 1, y) - img(x, y);
            if (y + 1 < h) g.dy(x, y) = img(x, y + 1) - img(x, y);
        }
    }
    return g;
}

/// Normalized Gaussian taps for offsets -radius..radius, radius = ceil(3 sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be > 0");
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double s = 0.0;
    for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * double(i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        s += v;
    }
    for (auto& v : k) v /= s;
    return k;
}

/// Separable Gaussian convolution with mirror boundary. Preserves the mean.
inline ImageGrid gaussian_blur(const ImageGrid& img, double sigma) {
    const auto k = gaussian_kernel(sigma);
    const auto radius = static_cast<std::ptrdiff_t>(k.size() / 2);
    const std::size_t w = img.width(), h = img.height();

    ImageGrid tmp(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t o = -radius; o <= radius; ++o)
                acc += k[static_cast<std::size_t>(o + radius)] *
                       img(detail::reflect(std::ptrdiff_t(x) + o, w), y);
            tmp(x, y) = acc;
        }
    }
    ImageGrid out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t o = -radius; o <= radius; ++o)
                acc += k[static_cast<std::size_t>(o + radius)] *
                       tmp(x, detail::reflect(std::ptrdiff_t(y) + o, h));
            out(x, y) = acc;
        }
    }
    return out;
}

/// Squared discrete L2 norm with unit pixel area: sum of v_i^2.
inline double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

} // namespace pic
