#pragma once

// Mask construction strategies: the stationary hard-threshold and halftoned
// masks, the H1 and random baselines, and the four time-dependent encoders
// that alternate mask selection with implicit diffusion steps.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pic/image.hpp"
#include "pic/mask.hpp"
#include "pic/solver.hpp"

namespace pic {

enum class MaskKind {
    opt_threshold,
    opt_halftone,
    h1_threshold,
    h1_halftone,
    random,
    l2sta,
    l2dec,
    l2inc,
    l2insta,
};

inline const char* to_string(MaskKind k) {
    switch (k) {
    case MaskKind::opt_threshold: return "opt-threshold";
    case MaskKind::opt_halftone: return "opt-halftone";
    case MaskKind::h1_threshold: return "h1-threshold";
    case MaskKind::h1_halftone: return "h1-halftone";
    case MaskKind::random: return "random";
    case MaskKind::l2sta: return "l2sta";
    case MaskKind::l2dec: return "l2dec";
    case MaskKind::l2inc: return "l2inc";
    case MaskKind::l2insta: return "l2insta";
    }
    return "?";
}

inline MaskKind parse_mask_kind(std::string s) {
    for (auto& ch : s) {
        if (ch == '_') ch = '-';
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    for (int k = 0; k <= int(MaskKind::l2insta); ++k)
        if (s == to_string(MaskKind(k))) return MaskKind(k);
    throw std::invalid_argument("unknown mask method '" + s + "'");
}

inline bool is_time_dependent(MaskKind k) {
    return k == MaskKind::l2dec || k == MaskKind::l2inc || k == MaskKind::l2insta;
}

struct MaskStrategy {
    MaskKind kind = MaskKind::opt_halftone;
    double c = 0.1;              // fraction of pixels to keep
    double alpha = 3.0;
    double dt = 0.1;
    std::size_t steps = 10;      // N of the time-dependent encoders
    double presmooth_sigma = 0.0;
    std::optional<DensityMode> density;  // default: direct for H1, soft threshold otherwise
    std::uint64_t seed = 0;
    bool u0_is_f = false;        // initial state of the encoders; u0 = 0 otherwise
    double tol = 1e-8;

    void validate(std::size_t pixels) const {
        if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("MaskStrategy: c must lie in (0,1]");
        if (c * double(pixels) < 1.0) throw std::invalid_argument("MaskStrategy: budget below one pixel");
        if (!(alpha > 0.0) || !(dt > 0.0)) throw std::invalid_argument("MaskStrategy: alpha, dt must be > 0");
        if (is_time_dependent(kind) && steps < 1)
            throw std::invalid_argument("MaskStrategy: time-dependent kinds need steps >= 1");
        if (presmooth_sigma < 0.0) throw std::invalid_argument("MaskStrategy: presmooth sigma must be >= 0");
    }

    DensityMode density_mode() const {
        if (density) return *density;
        return kind == MaskKind::h1_halftone ? DensityMode::direct : DensityMode::soft_threshold;
    }

    SolveSpec solve_spec() const {
        SolveSpec s;
        s.alpha = alpha;
        s.dt = dt;
        s.tol = tol;
        return s;
    }
};

struct EncodeResult {
    Mask mask;
    std::vector<Mask> iterates;        // K_0 .. K_last for the time-dependent encoders
    CriterionField criterion_final;    // the criterion the last mask was selected from
    std::optional<ImageGrid> state;    // last diffusion state u^n, when the encoder has one
};

namespace detail {

/// Halftoning needs a budget strictly inside (0,1); a full budget keeps everything.
inline Mask halftone_or_full(const CriterionField& crit, double c, DensityMode mode) {
    if (c >= 1.0) return Mask(crit.width(), crit.height(), true);
    return halftone_mask(crit, c, mode);
}

inline ImageGrid initial_state(const ImageGrid& f, const MaskStrategy& s) {
    return s.u0_is_f ? f : ImageGrid(f.width(), f.height(), 0.0);
}

} // namespace detail

/// Single halftone of the stationary criterion, reused for every time step.
inline EncodeResult encode_l2sta(const ImageGrid& f, const MaskStrategy& s) {
    s.validate(f.size());
    auto crit = criterion_stationary(f, s.alpha, s.presmooth_sigma);
    Mask m = detail::halftone_or_full(crit, s.c, s.density_mode());
    return EncodeResult{m, {m}, std::move(crit), std::nullopt};
}

/// Implicit diffusion step used by the time-dependent encoders: given u^n and
/// K_n it returns u^{n+1}. The compression encoders impose f on K_n; the
/// denoising variant imposes u^n itself.
using EvolutionStep = std::function<ImageGrid(const ImageGrid&, const Mask&)>;

namespace detail {

inline EvolutionStep compression_step(const ImageGrid& f, const SolveSpec& spec) {
    return [&f, spec](const ImageGrid& u, const Mask& K) {
        return solve_parabolic_step(u, f, K, spec);
    };
}

} // namespace detail

/// Shrinking nested masks. With dc = (1 - c)/(N + 1), K_n keeps
/// 1 - (n + 1) dc of the pixels for n = 0..N, each selected inside K_{n-1},
/// so K_N holds exactly ceil(c N_pixels) pixels.
inline EncodeResult encode_l2dec(const ImageGrid& f, const MaskStrategy& s, ImageGrid u,
                                 const EvolutionStep& step) {
    s.validate(f.size());
    const std::size_t N = s.steps;
    const double dc = (1.0 - s.c) / double(N + 1);

    EncodeResult res;
    for (std::size_t n = 0; n <= N; ++n) {
        const double budget = n == N ? s.c : 1.0 - double(n + 1) * dc;
        res.criterion_final = criterion_timedep(f, u, s.alpha, s.dt, s.presmooth_sigma);
        Mask K = res.iterates.empty()
                     ? threshold_mask(res.criterion_final, budget)
                     : threshold_mask(res.criterion_final, budget, nullptr, &res.iterates.back());
        u = step(u, K);
        res.iterates.push_back(std::move(K));
    }
    res.mask = res.iterates.back();
    res.state = std::move(u);
    return res;
}

/// Growing nested masks. K_0 keeps ceil(c/N N_pixels) pixels and each of the
/// following N - 1 steps adds that many more from outside the current mask,
/// so |K_{N-1}| = N ceil(c/N N_pixels).
inline EncodeResult encode_l2inc(const ImageGrid& f, const MaskStrategy& s, ImageGrid u,
                                 const EvolutionStep& step) {
    s.validate(f.size());
    const double dc = s.c / double(s.steps);

    EncodeResult res;
    Mask K(f.width(), f.height());
    for (std::size_t n = 0; n < s.steps; ++n) {
        res.criterion_final = criterion_timedep(f, u, s.alpha, s.dt, s.presmooth_sigma);
        K |= threshold_mask(res.criterion_final, dc, &K);
        u = step(u, K);
        res.iterates.push_back(K);
    }
    res.mask = std::move(K);
    res.state = std::move(u);
    return res;
}

/// Fresh halftone at budget c on every step; no nesting.
inline EncodeResult encode_l2insta(const ImageGrid& f, const MaskStrategy& s, ImageGrid u,
                                   const EvolutionStep& step) {
    s.validate(f.size());
    EncodeResult res;
    for (std::size_t n = 0; n < s.steps; ++n) {
        res.criterion_final = criterion_timedep(f, u, s.alpha, s.dt, s.presmooth_sigma);
        Mask K = detail::halftone_or_full(res.criterion_final, s.c, s.density_mode());
        u = step(u, K);
        res.iterates.push_back(std::move(K));
    }
    res.mask = res.iterates.back();
    res.state = std::move(u);
    return res;
}

inline EncodeResult encode_l2dec(const ImageGrid& f, const MaskStrategy& s) {
    return encode_l2dec(f, s, detail::initial_state(f, s), detail::compression_step(f, s.solve_spec()));
}

inline EncodeResult encode_l2inc(const ImageGrid& f, const MaskStrategy& s) {
    return encode_l2inc(f, s, detail::initial_state(f, s), detail::compression_step(f, s.solve_spec()));
}

inline EncodeResult encode_l2insta(const ImageGrid& f, const MaskStrategy& s) {
    return encode_l2insta(f, s, detail::initial_state(f, s),
                          detail::compression_step(f, s.solve_spec()));
}

/// Dispatches on strategy.kind.
inline EncodeResult build_mask(const ImageGrid& f, const MaskStrategy& s) {
    s.validate(f.size());
    switch (s.kind) {
    case MaskKind::opt_threshold: {
        auto crit = criterion_stationary(f, s.alpha, s.presmooth_sigma);
        Mask m = threshold_mask(crit, s.c);
        return EncodeResult{std::move(m), {}, std::move(crit), std::nullopt};
    }
    case MaskKind::opt_halftone: {
        auto crit = criterion_stationary(f, s.alpha, s.presmooth_sigma);
        Mask m = detail::halftone_or_full(crit, s.c, s.density_mode());
        return EncodeResult{std::move(m), {}, std::move(crit), std::nullopt};
    }
    case MaskKind::h1_threshold: {
        auto crit = h1_criterion(f, s.presmooth_sigma);
        Mask m = threshold_mask(crit, s.c);
        return EncodeResult{std::move(m), {}, std::move(crit), std::nullopt};
    }
    case MaskKind::h1_halftone: {
        auto crit = h1_criterion(f, s.presmooth_sigma);
        Mask m = detail::halftone_or_full(crit, s.c, s.density_mode());
        return EncodeResult{std::move(m), {}, std::move(crit), std::nullopt};
    }
    case MaskKind::random: {
        Mask m = random_mask(f.width(), f.height(), s.c, s.seed);
        return EncodeResult{std::move(m), {}, CriterionField(ImageGrid(f.width(), f.height())),
                            std::nullopt};
    }
    case MaskKind::l2sta: return encode_l2sta(f, s);
    case MaskKind::l2dec: return encode_l2dec(f, s);
    case MaskKind::l2inc: return encode_l2inc(f, s);
    case MaskKind::l2insta: return encode_l2insta(f, s);
    }
    throw std::logic_error("build_mask: unhandled kind");
}

} // namespace pic
