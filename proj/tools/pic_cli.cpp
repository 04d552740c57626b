// pic: command-line front end for masks, codec, denoising, benchmarks and
// numerical validation.
//
// Exit status: 0 ok, 1 usage, 2 I/O, 3 solver non-convergence, 4 a
// validation tolerance failed.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pic/pic.hpp"

namespace {

enum Exit { ok = 0, usage = 1, io = 2, nonconvergence = 3, validation = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StrategyFlags {
    std::string method = "opt-halftone";
    double c = 0.1;
    double alpha = 3.0;
    double dt = 0.1;
    std::size_t n_steps = 10;
    double presmooth = 0.0;
    std::string density;  // empty: per-method default
    bool u0_is_f = false;

    void attach(CLI::App* app) {
        app->add_option("--method", method,
                        "opt-threshold | opt-halftone | h1-threshold | h1-halftone | random | "
                        "l2sta | l2dec | l2inc | l2insta")
            ->capture_default_str();
        app->add_option("--c", c, "fraction of pixels kept")->capture_default_str();
        app->add_option("--alpha", alpha, "diffusivity weight")->capture_default_str();
        app->add_option("--dt", dt, "time step of the implicit scheme")->capture_default_str();
        app->add_option("--n-steps", n_steps, "N of the time-dependent encoders")->capture_default_str();
        app->add_option("--presmooth", presmooth, "Gaussian presmoothing of the criterion")->capture_default_str();
        app->add_option("--density", density, "direct | soft (default: direct for H1, soft otherwise)");
        app->add_flag("--u0-is-f", u0_is_f, "start the encoders from u0 = f instead of 0");
    }

    pic::MaskStrategy strategy(std::uint64_t seed) const {
        pic::MaskStrategy s;
        s.kind = pic::parse_mask_kind(method);
        s.c = c;
        s.alpha = alpha;
        s.dt = dt;
        s.steps = n_steps;
        s.presmooth_sigma = presmooth;
        if (!density.empty()) s.density = pic::parse_density_mode(density);
        s.seed = seed;
        s.u0_is_f = u0_is_f;
        return s;
    }
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("PIC_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("PIC_SEED is not an unsigned integer: ") + env);
    }
    return 0;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pic::PnmError("cannot write " + path);
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pic::PnmError("cannot open " + path);
    return in;
}

// ---- validate --------------------------------------------------------------

struct Check {
    std::string name;
    double value;
    double limit;
    bool pass;
};

void report(std::ostream& out, const std::vector<Check>& checks) {
    out << "check,value,limit,pass\n";
    char buf[64];
    for (const auto& c : checks) {
        out << c.name << ',';
        std::snprintf(buf, sizeof buf, "%.6e", c.value);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.6e", c.limit);
        out << buf << ',' << (c.pass ? "yes" : "no") << '\n';
    }
}

std::vector<Check> suite_bessel() {
    using namespace pic::bessel;
    std::vector<Check> out;
    for (double z : {1.0, 2.0, 4.0}) {
        const double e = std::abs(I0(z) * K1(z) + I1(z) * K0(z) - 1.0 / z);
        out.push_back({"wronskian_z" + std::to_string(int(z)), e, 1e-10, e < 1e-10});
    }
    const double law = -std::log(0.01) + std::log(2.0) - euler_gamma;
    const double rel = std::abs(K0(0.01) - law) / law;
    out.push_back({"k0_small_z_rel", rel, 1e-4, rel < 1e-4});
    return out;
}

std::vector<Check> suite_disc() {
    std::vector<Check> out;
    const auto grid = pic::asym::solve_disc_radial(0.1, 1.0, 1.0);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i <= grid.nr; ++i) {
        err = std::max(err, std::abs(grid.w[i] - pic::asym::disc_closed_form(grid.r[i], 0.1, 1.0, 1.0)));
        scale = std::max(scale, std::abs(grid.w[i]));
    }
    out.push_back({"disc_closed_form_rel", err / scale, 1e-6, err / scale < 1e-6});
    out.push_back({"disc_fd_residual", grid.residual, 1e-10, grid.residual < 1e-10});
    const auto h = pic::asym::verify_homogeneous_disc(0.2, 1.0);
    out.push_back({"homogeneous_residual", h.max_residual, 1e-6, h.max_residual < 1e-6});
    out.push_back({"homogeneous_boundary", h.boundary_value, 1e-12, h.boundary_value < 1e-12});
    const double dev = std::abs(h.small_r_ratio - 1.0);
    out.push_back({"homogeneous_log_ratio_dev", dev, 0.05, dev < 0.05});
    return out;
}

std::vector<Check> suite_topograd(double alpha, std::size_t threads) {
    const pic::asym::Quadratic f{1.0, 0.3, -0.2, 0.5, 0.1, 0.25};
    const auto sweep = pic::asym::epsilon_sweep_topograd(f, alpha, {1e-2, 5e-3, 2e-3, 1e-3}, threads);
    std::vector<Check> out;
    out.push_back({"loglog_slope", sweep.slope, 4.0, sweep.slope >= 3.7 && sweep.slope <= 4.3});
    const double dev = std::abs(sweep.ratio - 1.0);
    out.push_back({"leading_ratio_dev", dev, 0.15, dev <= 0.15});
    return out;
}

std::vector<Check> suite_theta(double alpha, std::size_t resolution, std::size_t threads) {
    std::vector<Check> out;
    const auto th = pic::asym::theta_experiment({0.05, 0.1, 0.2, 0.3}, {1, 2}, alpha, resolution, threads);
    for (const auto& fit : th.fits) {
        out.push_back({"theta_r2_k" + std::to_string(fit.k), fit.r2, 0.95, fit.r2 > 0.95});
        out.push_back({"theta_monotone_k" + std::to_string(fit.k), fit.monotone ? 1.0 : 0.0, 1.0, fit.monotone});
    }
    const std::size_t nm = 4;
    for (std::size_t j = 0; j < nm; ++j) {
        const double a = th.cells[j].F, b = th.cells[nm + j].F;
        const double rel = std::abs(a - b) / std::max(a, b);
        char name[64];
        std::snprintf(name, sizeof name, "theta_k1_vs_k2_m%.2f", th.cells[j].m);
        out.push_back({name, rel, 0.10, rel <= 0.10});
    }
    for (double m : {0.05, 0.1, 0.2, 0.3}) {
        const auto a = pic::asym::annulus_check(m, alpha);
        char name[64];
        std::snprintf(name, sizeof name, "annulus_derived_k_m%.2f", m);
        out.push_back({name, a.err_derived, 1e-4, a.err_derived < 1e-4});
    }
    return out;
}

// ---- subcommands -------------------------------------------------------------

struct Globals {
    std::optional<std::uint64_t> seed;
    std::size_t threads = pic::default_threads();
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mask-based image compression and denoising by PDE inpainting"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "random seed (fallback: PIC_SEED, then 0)");
    app.add_option("--threads", g.threads, "worker threads for bench and validate")->capture_default_str();

    // noise
    auto* noise = app.add_subcommand("noise", "add Gaussian or impulse noise to a PGM");
    std::string noise_in, noise_out, noise_kind = "gaussian";
    double noise_sigma = 0.05, noise_fraction = 0.01;
    noise->add_option("input", noise_in, "input PGM")->required();
    noise->add_option("output", noise_out, "output PGM")->required();
    noise->add_option("--kind", noise_kind, "gaussian | salt | pepper | salt_pepper")->capture_default_str();
    noise->add_option("--sigma", noise_sigma, "Gaussian deviation")->capture_default_str();
    noise->add_option("--fraction", noise_fraction, "impulse fraction")->capture_default_str();

    // mask
    auto* mask = app.add_subcommand("mask", "build an inpainting mask");
    StrategyFlags mask_flags;
    std::string mask_in, mask_out;
    mask->add_option("input", mask_in, "input PGM")->required();
    mask->add_option("output", mask_out, "output PBM")->required();
    mask_flags.attach(mask);

    // encode
    auto* encode = app.add_subcommand("encode", "encode a PGM (or PPM) into a PIC1 container");
    StrategyFlags enc_flags;
    std::string enc_in, enc_out, enc_mode, enc_color = "luminance";
    std::size_t enc_decode_steps = 100;
    double enc_decode_dt = 0.1;
    encode->add_option("input", enc_in, "input PGM or PPM")->required();
    encode->add_option("output", enc_out, "output container")->required();
    enc_flags.attach(encode);
    encode->add_option("--decode-mode", enc_mode,
                       "stationary | parabolic | homogeneous (default: parabolic for time-dependent methods)");
    encode->add_option("--decode-steps", enc_decode_steps, "parabolic decoding steps")->capture_default_str();
    encode->add_option("--decode-dt", enc_decode_dt, "parabolic decoding time step")->capture_default_str();
    encode->add_option("--color", enc_color, "color inputs: luminance (one shared mask) | per-channel")
        ->capture_default_str();

    // decode
    auto* decode = app.add_subcommand("decode", "decode a PIC1 container to PGM (or PPM)");
    std::string dec_in, dec_out;
    decode->add_option("input", dec_in, "input container")->required();
    decode->add_option("output", dec_out, "output PGM or PPM")->required();

    // denoise
    auto* denoise = app.add_subcommand("denoise", "denoise by inpainting with evolving Dirichlet data");
    std::string dn_in, dn_out, dn_method = "l2inc", dn_clean;
    double dn_alpha = 18.0, dn_c = 0.22, dn_dt = pic::denoise_encoder_dt, dn_presmooth = 0.0;
    std::size_t dn_steps = 40, dn_decode_steps = 100;
    denoise->add_option("input", dn_in, "noisy PGM")->required();
    denoise->add_option("output", dn_out, "output PGM")->required();
    denoise->add_option("--method", dn_method, "l2inc | l2dec | l2insta | l2sta")->capture_default_str();
    denoise->add_option("--alpha", dn_alpha, "diffusivity weight")->capture_default_str();
    denoise->add_option("--c", dn_c, "fraction of pixels kept")->capture_default_str();
    denoise->add_option("--n-steps", dn_steps, "encoder steps N")->capture_default_str();
    denoise->add_option("--dt", dn_dt, "encoder time step")->capture_default_str();
    denoise->add_option("--presmooth", dn_presmooth, "criterion presmoothing")->capture_default_str();
    denoise->add_option("--decode-steps", dn_decode_steps, "parabolic decoding steps at dt 0.1")
        ->capture_default_str();
    denoise->add_option("--clean", dn_clean, "clean reference PGM; prints the errors");

    // bench
    auto* bench = app.add_subcommand("bench", "comparison tables as CSV");
    std::string b_suite = "masks", b_image, b_out, b_id;
    std::vector<double> b_sigmas{0.0, 0.1};
    std::vector<std::string> b_methods;
    double b_c = 0.1, b_alpha = 3.0, b_fraction = 0.01;
    bool b_timing = false;
    bench->add_option("--suite", b_suite, "masks | methods | saltpepper")->capture_default_str();
    bench->add_option("--image", b_image, "input PGM")->required();
    bench->add_option("--image-id", b_id, "image label in the CSV (default: file name)");
    bench->add_option("--out", b_out, "CSV path (default: stdout)");
    bench->add_option("--sigma", b_sigmas, "Gaussian noise levels")->delimiter(',')->capture_default_str();
    bench->add_option("--methods", b_methods, "subset of method names")->delimiter(',');
    bench->add_option("--c", b_c, "fraction of pixels kept")->capture_default_str();
    bench->add_option("--alpha", b_alpha, "alpha of the masks suite")->capture_default_str();
    bench->add_option("--fraction", b_fraction, "impulse fraction of the saltpepper suite")->capture_default_str();
    bench->add_flag("--timing", b_timing, "fill wall_ms (otherwise 0 for byte-stable output)");

    // validate
    auto* validate = app.add_subcommand("validate", "numerical checks of the asymptotic analysis");
    std::string v_suite = "all", v_out;
    double v_alpha_topo = 1.0, v_alpha_theta = 10.0;
    std::size_t v_res = 512;
    validate->add_option("--suite", v_suite, "bessel | disc | topograd | theta | all")->capture_default_str();
    validate->add_option("--alpha-topograd", v_alpha_topo, "alpha of the eps sweep")->capture_default_str();
    validate->add_option("--alpha-theta", v_alpha_theta, "alpha of the lattice experiment")->capture_default_str();
    validate->add_option("--resolution", v_res, "grid of the lattice experiment")->capture_default_str();
    validate->add_option("--out", v_out, "CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        const std::uint64_t seed = resolve_seed(g.seed);
        if (g.threads < 1) throw UsageError("--threads must be >= 1");

        if (*noise) {
            pic::NoiseSpec spec;
            spec.kind = pic::parse_noise_kind(noise_kind);
            spec.sigma = noise_sigma;
            spec.fraction = noise_fraction;
            spec.seed = seed;
            spec.validate();
            const auto f = pic::read_pnm(noise_in);
            const auto fn = pic::apply_noise(f, spec);
            pic::write_pnm(fn, noise_out);
            std::printf("noise: ||f_n - f|| = %.6f\n", pic::l2_error(fn, f));
        } else if (*mask) {
            const auto s = mask_flags.strategy(seed);
            const auto f = pic::read_pnm(mask_in);
            const auto res = pic::build_mask(f, s);
            pic::write_pbm_file(res.mask, mask_out);
            std::printf("mask: %zu of %zu pixels\n", res.mask.count(), res.mask.size());
        } else if (*encode) {
            const auto s = enc_flags.strategy(seed);
            auto cfg = pic::CodecConfig::for_strategy(s);
            if (!enc_mode.empty()) cfg.decode_mode = pic::parse_decode_mode(enc_mode);
            cfg.decode_steps = enc_decode_steps;
            if (cfg.decode_mode == pic::DecodeMode::parabolic) cfg.solve.dt = enc_decode_dt;
            if (enc_color != "luminance" && enc_color != "per-channel")
                throw UsageError("--color must be luminance or per-channel");
            auto out = open_output(enc_out);
            if (pic::pnm_magic(enc_in) == "P6") {
                const auto img = pic::read_ppm_file(enc_in);
                const auto e = pic::encode_color(img, cfg, enc_color == "per-channel");
                std::size_t bytes = 0;
                for (const auto& ch : e.channels) {
                    pic::write_container(ch, out);
                    bytes += ch.payload_size();
                }
                std::printf("encode: 3 channels, %zu payload bytes\n", bytes);
            } else {
                const auto f = pic::read_pnm(enc_in);
                const auto e = pic::encode(f, cfg);
                pic::write_container(e, out);
                std::printf("encode: %zu of %zu pixels, %zu payload bytes\n", e.mask.count(), e.mask.size(),
                            e.payload_size());
            }
        } else if (*decode) {
            auto in = open_input(dec_in);
            std::vector<pic::Encoded> parts;
            parts.push_back(pic::read_container(in));
            if (in.peek() != std::char_traits<char>::eof()) {
                parts.push_back(pic::read_container(in));
                parts.push_back(pic::read_container(in));
                pic::ColorEncoded ce;
                for (int c = 0; c < 3; ++c) ce.channels[std::size_t(c)] = parts[std::size_t(c)];
                pic::write_ppm_file(pic::decode_color(ce), dec_out);
            } else {
                pic::write_pnm(pic::decode(parts[0]), dec_out);
            }
            std::printf("decode: %zu channel(s)\n", parts.size());
        } else if (*denoise) {
            auto cfg = pic::denoise_config(dn_alpha, dn_c, dn_steps);
            cfg.strategy.kind = pic::parse_mask_kind(dn_method);
            cfg.strategy.dt = dn_dt;
            cfg.strategy.presmooth_sigma = dn_presmooth;
            cfg.strategy.seed = seed;
            cfg.decode_steps = dn_decode_steps;
            const auto fn = pic::read_pnm(dn_in);
            std::optional<pic::ImageGrid> clean;
            if (!dn_clean.empty()) clean = pic::read_pnm(dn_clean);
            const auto res = pic::denoise_by_inpainting(fn, cfg);
            pic::write_pnm(res.u, dn_out);
            std::printf("denoise: %zu mask pixels\n", res.mask.count());
            if (clean)
                std::printf("denoise: ||f_n - f|| = %.6f  ||u - f|| = %.6f\n", pic::l2_error(fn, *clean),
                            pic::l2_error(res.u, *clean));
        } else if (*bench) {
            const auto f = pic::read_pnm(b_image);
            if (b_id.empty()) b_id = std::filesystem::path(b_image).stem().string();
            pic::bench::BenchOptions opts;
            opts.seed = seed;
            opts.threads = g.threads;
            opts.timing = b_timing;
            std::vector<pic::bench::MethodSpec> all;
            if (b_suite == "masks") all = pic::bench::mask_comparison_methods(b_c, b_alpha, seed);
            else if (b_suite == "methods" || b_suite == "saltpepper") all = pic::bench::method_comparison_methods(b_c);
            else throw UsageError("--suite must be masks, methods or saltpepper");
            std::vector<pic::bench::MethodSpec> methods;
            if (b_methods.empty()) methods = all;
            for (const auto& name : b_methods) methods.push_back(pic::bench::find_method(all, name));
            std::vector<pic::bench::BenchRecord> rows;
            if (b_suite == "masks") rows = pic::bench::run_mask_comparison(b_id, f, b_sigmas, methods, opts);
            else if (b_suite == "methods") rows = pic::bench::run_method_comparison(b_id, f, b_sigmas, methods, opts);
            else rows = pic::bench::run_saltpepper(b_id, f, b_fraction, methods, opts);
            if (b_out.empty()) {
                pic::bench::write_csv(rows, std::cout);
            } else {
                auto out = open_output(b_out);
                pic::bench::write_csv(rows, out);
            }
        } else if (*validate) {
            std::vector<Check> checks;
            const bool all = v_suite == "all";
            if (!all && v_suite != "bessel" && v_suite != "disc" && v_suite != "topograd" && v_suite != "theta")
                throw UsageError("--suite must be bessel, disc, topograd, theta or all");
            const auto add = [&](std::vector<Check> more) { checks.insert(checks.end(), more.begin(), more.end()); };
            if (all || v_suite == "bessel") add(suite_bessel());
            if (all || v_suite == "disc") add(suite_disc());
            if (all || v_suite == "topograd") add(suite_topograd(v_alpha_topo, g.threads));
            if (all || v_suite == "theta") add(suite_theta(v_alpha_theta, v_res, g.threads));
            if (v_out.empty()) {
                report(std::cout, checks);
            } else {
                auto out = open_output(v_out);
                report(out, checks);
            }
            for (const auto& c : checks)
                if (!c.pass) {
                    std::fprintf(stderr, "validate: %s failed\n", c.name.c_str());
                    return validation;
                }
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return usage;
    } catch (const pic::NonConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return nonconvergence;
    } catch (const pic::PnmError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return io;
    } catch (const pic::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return io;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return io;
    }
    return ok;
}
