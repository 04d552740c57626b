#pragma once

// Desk-scale reproduction of the comparison tables: noise -> mask -> decode,
// one CSV row per (method, noise level).

#include <chrono>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "pic/codec.hpp"
#include "pic/noise.hpp"
#include "pic/parallel.hpp"

namespace pic::bench {

struct BenchRecord {
    std::string image;
    std::string noise;        // "none", "gaussian", "salt", "pepper", "salt_pepper"
    std::string method;
    double sigma = 0.0;       // gaussian deviation, or impulse fraction
    double alpha = 0.0;
    double dt = 0.0;
    double c = 0.0;
    std::size_t N = 0;
    std::size_t mask_count = 0;
    double l2_error = 0.0;        // against the (noisy) input
    double l2_error_clean = 0.0;  // against the clean image
    double wall_ms = 0.0;
};

struct MethodSpec {
    std::string name;
    MaskStrategy strategy;
    DecodeMode decode = DecodeMode::stationary;
    std::size_t decode_steps = 100;
    double decode_dt = 0.1;
};

struct BenchOptions {
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    bool timing = false;           // wall_ms stays 0 unless set, keeping CSVs byte-stable
    double noisy_presmooth = 1.0;  // criterion presmoothing whenever noise is present
};

/// Optimized, Halftoned-Optimized, H1, Halftoned-H1 and Random, all decoded
/// with the stationary problem at the same alpha.
inline std::vector<MethodSpec> mask_comparison_methods(double c = 0.1, double alpha = 3.0, std::uint64_t seed = 0) {
    const std::pair<const char*, MaskKind> kinds[] = {
        {"Optimized", MaskKind::opt_threshold}, {"Halftoned-Optimized", MaskKind::opt_halftone},
        {"H1", MaskKind::h1_threshold},         {"Halftoned-H1", MaskKind::h1_halftone},
        {"Random", MaskKind::random},
    };
    std::vector<MethodSpec> out;
    for (const auto& [name, kind] : kinds) {
        MethodSpec m;
        m.name = name;
        m.strategy.kind = kind;
        m.strategy.c = c;
        m.strategy.alpha = alpha;
        m.strategy.seed = seed;
        m.decode = DecodeMode::stationary;
        out.push_back(m);
    }
    return out;
}

/// H1, L2, L2Sta, L2Dec, L2Inc, L2Insta with the table parameters.
inline std::vector<MethodSpec> method_comparison_methods(double c = 0.1) {
    struct Row { const char* name; MaskKind kind; double alpha; std::size_t N; DecodeMode decode; };
    const Row rows[] = {
        {"H1", MaskKind::h1_halftone, 1.0, 1, DecodeMode::homogeneous},
        {"L2", MaskKind::opt_halftone, 3.61, 1, DecodeMode::stationary},
        {"L2Sta", MaskKind::l2sta, 10.0, 1, DecodeMode::parabolic},
        {"L2Dec", MaskKind::l2dec, 30.0, 35, DecodeMode::parabolic},
        {"L2Inc", MaskKind::l2inc, 8.0, 40, DecodeMode::parabolic},
        {"L2Insta", MaskKind::l2insta, 10.0, 10, DecodeMode::parabolic},
    };
    std::vector<MethodSpec> out;
    for (const auto& r : rows) {
        MethodSpec m;
        m.name = r.name;
        m.strategy.kind = r.kind;
        m.strategy.c = c;
        m.strategy.alpha = r.alpha;
        m.strategy.steps = r.N;
        m.strategy.dt = 0.1;
        m.decode = r.decode;
        out.push_back(m);
    }
    return out;
}

inline MethodSpec find_method(const std::vector<MethodSpec>& methods, const std::string& name) {
    for (const auto& m : methods)
        if (m.name == name) return m;
    throw std::invalid_argument("unknown method '" + name + "'");
}

/// Noise, mask on the noisy image, decode, measure. Deterministic in opts.seed.
inline BenchRecord run_pipeline(const std::string& image_id, const ImageGrid& f, const NoiseSpec& noise,
                                const MethodSpec& method, const BenchOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const ImageGrid fn = apply_noise(f, noise);
    const bool noisy = noise.kind == NoiseKind::gaussian ? noise.sigma > 0.0 : noise.fraction > 0.0;

    MaskStrategy s = method.strategy;
    if (noisy) s.presmooth_sigma = opts.noisy_presmooth;
    CodecConfig cfg = CodecConfig::for_strategy(s);
    cfg.decode_mode = method.decode;
    cfg.decode_steps = method.decode_steps;
    cfg.solve.dt = method.decode_dt;

    const Mask K = build_mask(fn, s).mask;
    const ImageGrid u = inpaint(fn, K, cfg);

    BenchRecord r;
    r.image = image_id;
    r.noise = !noisy ? "none"
              : noise.kind == NoiseKind::gaussian ? "gaussian"
              : noise.kind == NoiseKind::salt     ? "salt"
              : noise.kind == NoiseKind::pepper   ? "pepper"
                                                  : "salt_pepper";
    r.method = method.name;
    r.sigma = noise.kind == NoiseKind::gaussian ? noise.sigma : noise.fraction;
    r.alpha = s.alpha;
    r.dt = s.dt;
    r.c = s.c;
    r.N = is_time_dependent(s.kind) ? s.steps : 1;
    r.mask_count = K.count();
    r.l2_error = l2_error(u, fn);
    r.l2_error_clean = l2_error(u, f);
    if (opts.timing)
        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

namespace detail {

/// Rows ordered by (method, noise) in the order given, whatever the thread count.
inline std::vector<BenchRecord> run_grid(const std::string& image_id, const ImageGrid& f,
                                         const std::vector<NoiseSpec>& noises,
                                         const std::vector<MethodSpec>& methods, const BenchOptions& opts) {
    return parallel_map(methods.size() * noises.size(), opts.threads, [&](std::size_t i) {
        return run_pipeline(image_id, f, noises[i % noises.size()], methods[i / noises.size()], opts);
    });
}

inline std::vector<NoiseSpec> gaussian_levels(const std::vector<double>& sigmas, std::uint64_t seed) {
    std::vector<NoiseSpec> out;
    for (double s : sigmas) {
        NoiseSpec n;
        n.kind = NoiseKind::gaussian;
        n.sigma = s;
        n.seed = seed;
        out.push_back(n);
    }
    return out;
}

} // namespace detail

inline std::vector<BenchRecord> run_mask_comparison(const std::string& image_id, const ImageGrid& f,
                                                    const std::vector<double>& sigmas,
                                                    const std::vector<MethodSpec>& methods,
                                                    const BenchOptions& opts = {}) {
    if (methods.empty() || sigmas.empty()) return {};
    return detail::run_grid(image_id, f, detail::gaussian_levels(sigmas, opts.seed), methods, opts);
}

inline std::vector<BenchRecord> run_method_comparison(const std::string& image_id, const ImageGrid& f,
                                                      const std::vector<double>& sigmas,
                                                      const std::vector<MethodSpec>& methods,
                                                      const BenchOptions& opts = {}) {
    if (methods.empty() || sigmas.empty()) return {};
    return detail::run_grid(image_id, f, detail::gaussian_levels(sigmas, opts.seed), methods, opts);
}

/// Salt and pepper runs at the same impulse fraction, one row each per method.
inline std::vector<BenchRecord> run_saltpepper(const std::string& image_id, const ImageGrid& f, double fraction,
                                               const std::vector<MethodSpec>& methods,
                                               const BenchOptions& opts = {}) {
    if (methods.empty()) return {};
    std::vector<NoiseSpec> noises;
    for (auto kind : {NoiseKind::salt, NoiseKind::pepper}) {
        NoiseSpec n;
        n.kind = kind;
        n.fraction = fraction;
        n.seed = opts.seed;
        noises.push_back(n);
    }
    return detail::run_grid(image_id, f, noises, methods, opts);
}

// ---- CSV ---------------------------------------------------------------------

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string csv_number(double v, const char* fmt = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline constexpr const char* csv_header =
    "image,noise,method,sigma,alpha,dt,c,N,mask_count,l2_error,l2_error_clean,wall_ms";

inline void write_csv(const std::vector<BenchRecord>& rows, std::ostream& out) {
    out << csv_header << "\r\n";
    for (const auto& r : rows) {
        out << csv_field(r.image) << ',' << csv_field(r.noise) << ',' << csv_field(r.method) << ','
            << csv_number(r.sigma) << ',' << csv_number(r.alpha) << ',' << csv_number(r.dt) << ','
            << csv_number(r.c) << ',' << r.N << ',' << r.mask_count << ',' << csv_number(r.l2_error, "%.6f")
            << ',' << csv_number(r.l2_error_clean, "%.6f") << ',' << csv_number(r.wall_ms, "%.3f") << "\r\n";
    }
}

} // namespace pic::bench
