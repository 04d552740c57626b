#pragma once

// Binary netpbm I/O: P5 (graymap), P6 (pixmap) and P4 (bitmap masks).
// Samples wider than 8 bits are big-endian 16-bit, as the format requires.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pic/image.hpp"

namespace pic {

class PnmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Three equally-shaped channels.
struct ColorImage {
    ImageGrid r, g, b;

    ColorImage() = default;
    ColorImage(ImageGrid red, ImageGrid green, ImageGrid blue)
        : r(std::move(red)), g(std::move(green)), b(std::move(blue)) {
        if (!r.same_shape(g) || !r.same_shape(b))
            throw ShapeError("ColorImage: channel shapes differ");
    }

    std::size_t width() const noexcept { return r.width(); }
    std::size_t height() const noexcept { return r.height(); }

    /// ITU-R BT.601 luma.
    ImageGrid luminance() const {
        ImageGrid y(width(), height());
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
        return y;
    }

    const ImageGrid& channel(int c) const { return c == 0 ? r : (c == 1 ? g : b); }
    ImageGrid& channel(int c) { return c == 0 ? r : (c == 1 ? g : b); }
};

namespace detail {

struct PnmHeader {
    std::string magic;
    std::size_t width = 0;
    std::size_t height = 0;
    unsigned maxval = 1;
};

inline void skip_space_and_comments(std::istream& in) {
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            in.get();
        } else {
            return;
        }
    }
}

inline unsigned long read_header_uint(std::istream& in, const char* what) {
    skip_space_and_comments(in);
    unsigned long v = 0;
    if (!(in >> v)) throw PnmError(std::string("malformed PNM header: bad ") + what);
    return v;
}

inline PnmHeader read_header(std::istream& in) {
    PnmHeader h;
    char m[2] = {0, 0};
    in.read(m, 2);
    if (in.gcount() != 2 || m[0] != 'P') throw PnmError("malformed PNM header: bad magic");
    h.magic = std::string(m, 2);
    if (h.magic != "P4" && h.magic != "P5" && h.magic != "P6")
        throw PnmError("unsupported PNM variant " + h.magic);
    h.width = read_header_uint(in, "width");
    h.height = read_header_uint(in, "height");
    if (h.magic != "P4") {
        const unsigned long mv = read_header_uint(in, "maxval");
        if (mv == 0 || mv > 65535) throw PnmError("unsupported PNM maxval " + std::to_string(mv));
        h.maxval = static_cast<unsigned>(mv);
    }
    // Exactly one whitespace byte separates the header from the raster.
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep)) throw PnmError("malformed PNM header: missing separator");
    if (h.width == 0 || h.height == 0) throw PnmError("malformed PNM header: zero extent");
    return h;
}

inline std::vector<unsigned char> read_payload(std::istream& in, std::size_t n) {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw PnmError("truncated PNM payload");
    return buf;
}

inline std::vector<double> decode_samples(const std::vector<unsigned char>& raw, unsigned maxval,
                                          std::size_t count) {
    std::vector<double> out(count);
    const double scale = double(maxval);
    if (maxval < 256) {
        for (std::size_t i = 0; i < count; ++i) out[i] = std::min(1.0, raw[i] / scale);
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const unsigned v = (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
            out[i] = std::min(1.0, v / scale);
        }
    }
    return out;
}

inline unsigned quantize(double v, unsigned maxval) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<unsigned>(std::lround(c * maxval));
}

inline void put_sample(std::vector<unsigned char>& buf, unsigned v, unsigned maxval) {
    if (maxval < 256) {
        buf.push_back(static_cast<unsigned char>(v));
    } else {
        buf.push_back(static_cast<unsigned char>(v >> 8));
        buf.push_back(static_cast<unsigned char>(v & 0xff));
    }
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PnmError("cannot open " + path);
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PnmError("cannot write " + path);
    return out;
}

} // namespace detail

inline ImageGrid read_pgm(std::istream& in) {
    const auto h = detail::read_header(in);
    if (h.magic != "P5") throw PnmError("expected P5 graymap, got " + h.magic);
    const std::size_t n = h.width * h.height;
    const auto raw = detail::read_payload(in, n * (h.maxval < 256 ? 1 : 2));
    return ImageGrid(h.width, h.height, detail::decode_samples(raw, h.maxval, n));
}

inline ColorImage read_ppm(std::istream& in) {
    const auto h = detail::read_header(in);
    if (h.magic != "P6") throw PnmError("expected P6 pixmap, got " + h.magic);
    const std::size_t n = h.width * h.height;
    const auto raw = detail::read_payload(in, 3 * n * (h.maxval < 256 ? 1 : 2));
    const auto all = detail::decode_samples(raw, h.maxval, 3 * n);
    std::vector<double> r(n), g(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = all[3 * i];
        g[i] = all[3 * i + 1];
        b[i] = all[3 * i + 2];
    }
    return ColorImage(ImageGrid(h.width, h.height, std::move(r)),
                      ImageGrid(h.width, h.height, std::move(g)),
                      ImageGrid(h.width, h.height, std::move(b)));
}

inline Mask read_pbm(std::istream& in) {
    const auto h = detail::read_header(in);
    if (h.magic != "P4") throw PnmError("expected P4 bitmap, got " + h.magic);
    const std::size_t row_bytes = (h.width + 7) / 8;
    const auto raw = detail::read_payload(in, row_bytes * h.height);
    Mask m(h.width, h.height);
    for (std::size_t y = 0; y < h.height; ++y)
        for (std::size_t x = 0; x < h.width; ++x)
            if (raw[y * row_bytes + x / 8] & (0x80u >> (x % 8))) m.set(x, y, true);
    return m;
}

inline void write_pgm(const ImageGrid& img, std::ostream& out, unsigned maxval = 255) {
    if (maxval == 0 || maxval > 65535) throw PnmError("unsupported PNM maxval");
    out << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
    std::vector<unsigned char> buf;
    buf.reserve(img.size() * 2);
    for (double v : img.values()) detail::put_sample(buf, detail::quantize(v, maxval), maxval);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw PnmError("write failed");
}

inline void write_ppm(const ColorImage& img, std::ostream& out, unsigned maxval = 255) {
    if (maxval == 0 || maxval > 65535) throw PnmError("unsupported PNM maxval");
    out << "P6\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
    std::vector<unsigned char> buf;
    buf.reserve(img.r.size() * 6);
    for (std::size_t i = 0; i < img.r.size(); ++i)
        for (int c = 0; c < 3; ++c)
            detail::put_sample(buf, detail::quantize(img.channel(c)[i], maxval), maxval);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw PnmError("write failed");
}

/// Packed P4 raster without header: rows padded to whole bytes, MSB first.
inline std::vector<unsigned char> pack_bits(const Mask& m) {
    const std::size_t row_bytes = (m.width() + 7) / 8;
    std::vector<unsigned char> raw(row_bytes * m.height(), 0);
    for (std::size_t y = 0; y < m.height(); ++y)
        for (std::size_t x = 0; x < m.width(); ++x)
            if (m(x, y)) raw[y * row_bytes + x / 8] |= static_cast<unsigned char>(0x80u >> (x % 8));
    return raw;
}

inline void write_pbm(const Mask& m, std::ostream& out) {
    out << "P4\n" << m.width() << ' ' << m.height() << '\n';
    const auto raw = pack_bits(m);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw PnmError("write failed");
}

inline ImageGrid read_pnm(const std::string& path) {
    auto in = detail::open_in(path);
    return read_pgm(in);
}

inline void write_pnm(const ImageGrid& img, const std::string& path, unsigned maxval = 255) {
    auto out = detail::open_out(path);
    write_pgm(img, out, maxval);
}

inline ColorImage read_ppm_file(const std::string& path) {
    auto in = detail::open_in(path);
    return read_ppm(in);
}

inline void write_ppm_file(const ColorImage& img, const std::string& path, unsigned maxval = 255) {
    auto out = detail::open_out(path);
    write_ppm(img, out, maxval);
}

inline Mask read_pbm_file(const std::string& path) {
    auto in = detail::open_in(path);
    return read_pbm(in);
}

inline void write_pbm_file(const Mask& m, const std::string& path) {
    auto out = detail::open_out(path);
    write_pbm(m, out);
}

/// Peeks the magic of a netpbm file ("P4", "P5", "P6", ...).
inline std::string pnm_magic(const std::string& path) {
    auto in = detail::open_in(path);
    char m[2] = {0, 0};
    in.read(m, 2);
    if (in.gcount() != 2) throw PnmError("malformed PNM header: bad magic");
    return std::string(m, 2);
}

} // namespace pic
