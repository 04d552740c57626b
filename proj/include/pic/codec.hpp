#pragma once

// End-to-end flows: encode an image to (mask, stored values), decode by
// inpainting, denoise by inpainting, and the two color strategies.
//
// Container layout ("PIC1"), all integers little-endian:
//
//   offset  size  field
//   0       4     magic "PIC1"
//   4       4     width  (u32)
//   8       4     height (u32)
//   12      1     strategy id (MaskKind ordinal)
//   13      1     decode mode (0 stationary, 1 parabolic, 2 homogeneous)
//   14      2     reserved, zero
//   16      8     alpha (IEEE-754 binary64)
//   24      8     dt    (IEEE-754 binary64)
//   32      4     decode steps (u32)
//   36      4     mask block length L (u32)
//   40      L     mask as a binary PBM (P4) file
//   40+L    4     payload length P (u32), equal to the mask population
//   44+L    P     8-bit samples of the image on the mask, row-major order

#include <array>
#include <cmath>
#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pic/encoders.hpp"
#include "pic/image.hpp"
#include "pic/pnm.hpp"
#include "pic/solver.hpp"

namespace pic {

enum class DecodeMode : std::uint8_t { stationary = 0, parabolic = 1, homogeneous = 2 };

inline const char* to_string(DecodeMode m) {
    switch (m) {
    case DecodeMode::stationary: return "stationary";
    case DecodeMode::parabolic: return "parabolic";
    case DecodeMode::homogeneous: return "homogeneous";
    }
    return "?";
}

inline DecodeMode parse_decode_mode(const std::string& s) {
    if (s == "stationary") return DecodeMode::stationary;
    if (s == "parabolic") return DecodeMode::parabolic;
    if (s == "homogeneous") return DecodeMode::homogeneous;
    throw std::invalid_argument("unknown decode mode '" + s + "'");
}

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CodecConfig {
    MaskStrategy strategy;
    SolveSpec solve;                 // alpha, dt and tolerances of the decoder
    std::size_t decode_steps = 100;  // horizon of the parabolic decoder
    DecodeMode decode_mode = DecodeMode::stationary;

    /// Decoder parameters taken from the strategy; time-dependent strategies
    /// decode parabolically, the others with the stationary problem.
    static CodecConfig for_strategy(const MaskStrategy& s) {
        CodecConfig cfg;
        cfg.strategy = s;
        cfg.solve = s.solve_spec();
        cfg.decode_mode = (is_time_dependent(s.kind) || s.kind == MaskKind::l2sta)
                              ? DecodeMode::parabolic
                              : DecodeMode::stationary;
        return cfg;
    }

    void validate() const {
        solve.validate();
        if (decode_mode == DecodeMode::parabolic && decode_steps < 1)
            throw std::invalid_argument("CodecConfig: parabolic decoding needs decode_steps >= 1");
    }
};

struct Encoded {
    std::size_t width = 0;
    std::size_t height = 0;
    MaskKind kind = MaskKind::opt_halftone;
    DecodeMode mode = DecodeMode::stationary;
    double alpha = 1.0;
    double dt = 0.1;
    std::size_t decode_steps = 100;
    Mask mask;
    std::vector<std::uint8_t> values;

    /// Stored bytes: one per kept pixel plus the packed bitmap.
    std::size_t payload_size() const { return values.size() + pack_bits(mask).size(); }

    CodecConfig config() const {
        CodecConfig cfg;
        cfg.strategy.kind = kind;
        cfg.solve.alpha = alpha;
        cfg.solve.dt = dt;
        cfg.decode_steps = decode_steps;
        cfg.decode_mode = mode;
        return cfg;
    }
};

inline std::vector<std::uint8_t> quantize_on_mask(const ImageGrid& f, const Mask& K) {
    require_same_shape(f, K, "quantize_on_mask");
    std::vector<std::uint8_t> v;
    v.reserve(K.count());
    for (std::size_t i = 0; i < f.size(); ++i)
        if (K[i]) v.push_back(static_cast<std::uint8_t>(detail::quantize(f[i], 255)));
    return v;
}

inline Encoded make_encoded(const Mask& K, std::vector<std::uint8_t> values, const CodecConfig& cfg) {
    Encoded e;
    e.width = K.width();
    e.height = K.height();
    e.kind = cfg.strategy.kind;
    e.mode = cfg.decode_mode;
    e.alpha = cfg.solve.alpha;
    e.dt = cfg.solve.dt;
    e.decode_steps = cfg.decode_steps;
    e.mask = K;
    e.values = std::move(values);
    return e;
}

inline Encoded encode(const ImageGrid& f, const CodecConfig& cfg) {
    cfg.validate();
    auto res = build_mask(f, cfg.strategy);
    auto values = quantize_on_mask(f, res.mask);
    return make_encoded(res.mask, std::move(values), cfg);
}

/// Inpaints from Dirichlet data given on K (off-mask entries of `data` are
/// ignored) and clamps the result to [0,1].
inline ImageGrid inpaint(const ImageGrid& data, const Mask& K, const CodecConfig& cfg) {
    cfg.validate();
    require_same_shape(data, K, "inpaint");
    ImageGrid u;
    switch (cfg.decode_mode) {
    case DecodeMode::stationary: u = solve_stationary(data, K, cfg.solve); break;
    case DecodeMode::homogeneous: u = solve_homogeneous(data, K, cfg.solve); break;
    case DecodeMode::parabolic: {
        u = ImageGrid(data.width(), data.height(), 0.0);
        for (std::size_t n = 0; n < cfg.decode_steps; ++n)
            u = solve_parabolic_step(u, data, K, cfg.solve);
        break;
    }
    }
    u.clamp(0.0, 1.0);
    return u;
}

inline ImageGrid decode(const Mask& K, std::span<const std::uint8_t> values, const CodecConfig& cfg) {
    if (values.size() != K.count())
        throw std::invalid_argument("decode: " + std::to_string(values.size()) +
                                    " stored values for a mask of " + std::to_string(K.count()) +
                                    " pixels");
    ImageGrid data(K.width(), K.height());
    std::size_t j = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (K[i]) data[i] = values[j++] / 255.0;
    return inpaint(data, K, cfg);
}

inline ImageGrid decode(const Encoded& e) { return decode(e.mask, e.values, e.config()); }

// ---- container ------------------------------------------------------------

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                       char((v >> 24) & 0xff)};
    out.write(b, 4);
}

inline void put_f64(std::ostream& out, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int k = 0; k < 8; ++k) out.put(char((v >> (8 * k)) & 0xff));
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) throw FormatError("truncated PIC1 container");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

inline double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (in.gcount() != 8) throw FormatError("truncated PIC1 container");
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
    return std::bit_cast<double>(v);
}

inline std::uint32_t checked_u32(std::size_t v) {
    if (v > 0xffffffffu) throw FormatError("value does not fit the PIC1 container");
    return static_cast<std::uint32_t>(v);
}

} // namespace detail

inline void write_container(const Encoded& e, std::ostream& out) {
    out.write("PIC1", 4);
    detail::put_u32(out, detail::checked_u32(e.width));
    detail::put_u32(out, detail::checked_u32(e.height));
    out.put(static_cast<char>(e.kind));
    out.put(static_cast<char>(e.mode));
    out.put(0);
    out.put(0);
    detail::put_f64(out, e.alpha);
    detail::put_f64(out, e.dt);
    detail::put_u32(out, detail::checked_u32(e.decode_steps));
    std::ostringstream pbm;
    write_pbm(e.mask, pbm);
    const std::string block = pbm.str();
    detail::put_u32(out, detail::checked_u32(block.size()));
    out.write(block.data(), static_cast<std::streamsize>(block.size()));
    detail::put_u32(out, detail::checked_u32(e.values.size()));
    out.write(reinterpret_cast<const char*>(e.values.data()),
              static_cast<std::streamsize>(e.values.size()));
    if (!out) throw FormatError("container write failed");
}

inline Encoded read_container(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string(magic, 4) != "PIC1") throw FormatError("not a PIC1 container");
    Encoded e;
    e.width = detail::get_u32(in);
    e.height = detail::get_u32(in);
    const int kind = in.get();
    const int mode = in.get();
    in.get();
    in.get();
    if (!in || kind < 0 || kind > int(MaskKind::l2insta) || mode < 0 || mode > 2)
        throw FormatError("bad PIC1 strategy or decode mode");
    e.kind = MaskKind(kind);
    e.mode = DecodeMode(mode);
    e.alpha = detail::get_f64(in);
    e.dt = detail::get_f64(in);
    e.decode_steps = detail::get_u32(in);
    const std::uint32_t mask_len = detail::get_u32(in);
    std::string block(mask_len, '\0');
    in.read(block.data(), mask_len);
    if (static_cast<std::uint32_t>(in.gcount()) != mask_len) throw FormatError("truncated PIC1 mask block");
    std::istringstream pbm(block);
    e.mask = read_pbm(pbm);
    if (e.mask.width() != e.width || e.mask.height() != e.height)
        throw FormatError("PIC1 mask dimensions disagree with the header");
    const std::uint32_t count = detail::get_u32(in);
    if (count != e.mask.count()) throw FormatError("PIC1 payload length differs from the mask population");
    e.values.resize(count);
    in.read(reinterpret_cast<char*>(e.values.data()), count);
    if (static_cast<std::uint32_t>(in.gcount()) != count) throw FormatError("truncated PIC1 payload");
    return e;
}

// ---- denoising ------------------------------------------------------------

struct DenoiseResult {
    ImageGrid u;        // decoded reconstruction
    ImageGrid state;    // u_N at the end of the encoding loop
    Mask mask;          // K_N
    std::vector<double> state_errors;  // optional trace of ||u_n - reference||
};

/// Encoding loop with evolving Dirichlet data: u^0 = f_noisy and every step
/// solves u^{n+1} - dt alpha Lap u^{n+1} = u^n off K_n with u^{n+1} = u^n on
/// K_n. The masks follow the configured time-dependent strategy. The result is
/// decoded from the final mask carrying the values of u_N.
inline DenoiseResult denoise_by_inpainting(const ImageGrid& f_noisy, const CodecConfig& cfg,
                                           const ImageGrid* reference = nullptr) {
    cfg.validate();
    const MaskStrategy& s = cfg.strategy;
    const SolveSpec spec = s.solve_spec();
    std::vector<double> trace;
    const EvolutionStep step = [&](const ImageGrid& u, const Mask& K) {
        ImageGrid next = solve_denoise_step(u, K, spec);
        if (reference) trace.push_back(l2_error(next, *reference));
        return next;
    };
    EncodeResult res;
    switch (s.kind) {
    case MaskKind::l2inc: res = encode_l2inc(f_noisy, s, f_noisy, step); break;
    case MaskKind::l2dec: res = encode_l2dec(f_noisy, s, f_noisy, step); break;
    case MaskKind::l2insta: res = encode_l2insta(f_noisy, s, f_noisy, step); break;
    case MaskKind::l2sta: {
        // Static halftone mask, reused for every step.
        const Mask K = encode_l2sta(f_noisy, s).mask;
        ImageGrid u = f_noisy;
        for (std::size_t n = 0; n < s.steps; ++n) u = step(u, K);
        res.mask = K;
        res.state = std::move(u);
        break;
    }
    default: throw std::invalid_argument("denoise_by_inpainting: needs a time-dependent strategy");
    }
    DenoiseResult out{inpaint(*res.state, res.mask, cfg), *res.state, res.mask, std::move(trace)};
    return out;
}

/// Encoder time step of the denoising loop. With unit pixel spacing the
/// compression step 0.1 diffuses far past the noise scale within N = 40 steps.
inline constexpr double denoise_encoder_dt = 0.002;

/// Denoising defaults: L2Inc encoder at denoise_encoder_dt, parabolic decoder
/// at the usual horizon (dt = 0.1, 100 steps).
inline CodecConfig denoise_config(double alpha = 18.0, double c = 0.22, std::size_t steps = 40) {
    MaskStrategy s;
    s.kind = MaskKind::l2inc;
    s.alpha = alpha;
    s.c = c;
    s.steps = steps;
    s.dt = denoise_encoder_dt;
    CodecConfig cfg = CodecConfig::for_strategy(s);
    cfg.solve.dt = 0.1;
    cfg.decode_mode = DecodeMode::parabolic;
    return cfg;
}

/// Gaussian smoothing, i.e. the heat equation run to t = sigma^2 / 2.
inline ImageGrid linear_diffusion(const ImageGrid& f, double sigma) { return gaussian_blur(f, sigma); }

// ---- color ----------------------------------------------------------------

struct ColorEncoded {
    std::array<Encoded, 3> channels;
    bool shared_mask = false;
};

/// per_channel: an independent mask per channel. Otherwise one mask is built
/// from the BT.601 luminance and reused for all three channels.
inline ColorEncoded encode_color(const ColorImage& img, const CodecConfig& cfg, bool per_channel) {
    ColorEncoded out;
    out.shared_mask = !per_channel;
    if (per_channel) {
        for (int c = 0; c < 3; ++c) out.channels[std::size_t(c)] = encode(img.channel(c), cfg);
        return out;
    }
    const Mask K = build_mask(img.luminance(), cfg.strategy).mask;
    for (int c = 0; c < 3; ++c)
        out.channels[std::size_t(c)] = make_encoded(K, quantize_on_mask(img.channel(c), K), cfg);
    return out;
}

inline ColorImage decode_color(const ColorEncoded& e) {
    return ColorImage(decode(e.channels[0]), decode(e.channels[1]), decode(e.channels[2]));
}

inline double l2_error(const ColorImage& a, const ColorImage& b) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double e = l2_error(a.channel(c), b.channel(c));
        s += e * e;
    }
    return std::sqrt(s);
}

} // namespace pic
