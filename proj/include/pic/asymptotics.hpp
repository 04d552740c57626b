#pragma once

// Numerical experiments around the small-hole asymptotics:
//   * radial disc problems w - alpha (w'' + w'/r) = g with w = 0 on r = eps,
//   * the homogeneous Bessel solution of w - dt Lap w = 0 with a log pole,
//   * the eps-sweep of the cost change when a small disc leaves the mask,
//   * the lattice-of-balls energy F(m) and its logarithmic growth.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "pic/bessel.hpp"
#include "pic/image.hpp"
#include "pic/parallel.hpp"
#include "pic/solver.hpp"

namespace pic::asym {

/// Nodes r_i = i eps / nr, i = 0..nr, with w(r_nr) = 0.
struct RadialGrid {
    double epsilon = 0.0;
    double alpha = 1.0;
    std::size_t nr = 0;
    std::vector<double> r;
    std::vector<double> w;
    double residual = 0.0;  // max-norm residual of the discrete equations
};

inline std::size_t radial_resolution(double eps) {
    const double n = std::max(256.0, 64.0 / eps * 0.01);
    return static_cast<std::size_t>(std::min(n, 2e5));
}

namespace detail {

/// Solves a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i].
inline std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                  std::vector<double> d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        d[i] -= m * d[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    return x;
}

} // namespace detail

/// Second-order finite differences in r; the centre row uses Lap w = 4 (w_1 - w_0)/h^2.
inline RadialGrid solve_disc_radial(double eps, double alpha, const std::function<double(double)>& g,
                                    std::size_t nr = 0) {
    if (!(eps > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("solve_disc_radial: eps, alpha must be > 0");
    if (nr == 0) nr = radial_resolution(eps);
    if (nr < 64) throw std::invalid_argument("solve_disc_radial: nr must be >= 64");
    const double h = eps / double(nr);
    const double k = alpha / (h * h);

    // unknowns w_0 .. w_{nr-1}
    std::vector<double> a(nr, 0.0), b(nr, 0.0), c(nr, 0.0), d(nr, 0.0), r(nr + 1);
    for (std::size_t i = 0; i <= nr; ++i) r[i] = double(i) * h;
    b[0] = 1.0 + 4.0 * k;
    c[0] = -4.0 * k;
    d[0] = g(0.0);
    for (std::size_t i = 1; i < nr; ++i) {
        const double drift = alpha / (2.0 * r[i] * h);
        a[i] = -k + drift;
        b[i] = 1.0 + 2.0 * k;
        c[i] = -k - drift;
        d[i] = g(r[i]);
    }
    RadialGrid out;
    out.epsilon = eps;
    out.alpha = alpha;
    out.nr = nr;
    out.r = r;
    out.w = detail::thomas(a, b, c, d);
    out.w.push_back(0.0);

    double res = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
        double lhs = b[i] * out.w[i] + c[i] * out.w[i + 1];
        if (i > 0) lhs += a[i] * out.w[i - 1];
        res = std::max(res, std::abs(lhs - d[i]));
        scale = std::max(scale, std::abs(d[i]));
    }
    out.residual = scale > 0.0 ? res / scale : res;
    return out;
}

inline RadialGrid solve_disc_radial(double eps, double alpha, double g0, std::size_t nr = 0) {
    return solve_disc_radial(eps, alpha, [g0](double) { return g0; }, nr);
}

/// g0 (1 - I0(r/sqrt(alpha)) / I0(eps/sqrt(alpha))): the constant-source disc solution.
inline double disc_closed_form(double r, double eps, double alpha, double g0) {
    const double s = std::sqrt(alpha);
    return g0 * (1.0 - bessel::I0(r / s) / bessel::I0(eps / s));
}

/// Trapezoidal 2 pi int_0^eps r w(r) weight(r) dr.
inline double disc_integral(const RadialGrid& grid, const std::function<double(double)>& weight) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.nr; ++i) {
        const double a = grid.r[i] * grid.w[i] * weight(grid.r[i]);
        const double b = grid.r[i + 1] * grid.w[i + 1] * weight(grid.r[i + 1]);
        s += 0.5 * (a + b) * (grid.r[i + 1] - grid.r[i]);
    }
    return 2.0 * std::numbers::pi * s;
}

inline double disc_integral(const RadialGrid& grid) {
    return disc_integral(grid, [](double) { return 1.0; });
}

// ---- homogeneous disc with a logarithmic pole ------------------------------

/// (1/2pi) [K0(r/sqrt dt) - K0(eps/sqrt dt)/I0(eps/sqrt dt) I0(r/sqrt dt)]
inline double homogeneous_disc(double r, double eps, double dt) {
    const double s = std::sqrt(dt);
    const double ratio = bessel::K0(eps / s) / bessel::I0(eps / s);
    return (bessel::K0(r / s) - ratio * bessel::I0(r / s)) / (2.0 * std::numbers::pi);
}

struct HomogeneousDiscReport {
    double epsilon = 0.0;
    double dt = 0.0;
    double max_residual = 0.0;      // max |w - dt (w'' + w'/r)| / (|w| + dt |w''| + dt |w'/r|)
    double max_abs_residual = 0.0;  // unnormalised
    double boundary_value = 0.0;    // |w(eps)|
    double small_r_ratio = 0.0;     // w(r) / ((1/2pi) ln(eps/r)) at r = eps 1e-3
};

/// Residual of the radial ODE by sixth-order central differences, sampled
/// log-uniformly over [eps/100, eps (1 - 1e-6)].
inline HomogeneousDiscReport verify_homogeneous_disc(double eps, double dt, std::size_t samples = 200) {
    if (!(eps > 0.0) || !(dt > 0.0)) throw std::invalid_argument("verify_homogeneous_disc: eps, dt must be > 0");
    const auto w = [&](double r) { return homogeneous_disc(r, eps, dt); };
    HomogeneousDiscReport rep;
    rep.epsilon = eps;
    rep.dt = dt;
    const double lo = std::log(eps / 100.0), hi = std::log(eps * (1.0 - 1e-6));
    for (std::size_t j = 0; j < samples; ++j) {
        const double r = std::exp(lo + (hi - lo) * double(j) / double(samples - 1));
        const double h = 0.01 * r;
        const double f0 = w(r);
        const double p1 = w(r + h), m1 = w(r - h);
        const double p2 = w(r + 2 * h), m2 = w(r - 2 * h);
        const double p3 = w(r + 3 * h), m3 = w(r - 3 * h);
        const double d1 = (45.0 * (p1 - m1) - 9.0 * (p2 - m2) + (p3 - m3)) / (60.0 * h);
        const double d2 = (270.0 * (p1 + m1) - 27.0 * (p2 + m2) + 2.0 * (p3 + m3) - 490.0 * f0) / (180.0 * h * h);
        const double res = f0 - dt * (d2 + d1 / r);
        const double scale = std::abs(f0) + dt * std::abs(d2) + dt * std::abs(d1 / r);
        rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(res));
        rep.max_residual = std::max(rep.max_residual, std::abs(res) / scale);
    }
    rep.boundary_value = std::abs(w(eps));
    const double r0 = eps * 1e-3;
    rep.small_r_ratio = w(r0) / (std::log(eps / r0) / (2.0 * std::numbers::pi));
    return rep;
}

// ---- eps sweep of the cost change ------------------------------------------

/// f(x, y) = c0 + cx x + cy y + cxx x^2 + cxy x y + cyy y^2 around x0 = 0.
struct Quadratic {
    double c0 = 0.0, cx = 0.0, cy = 0.0, cxx = 0.0, cxy = 0.0, cyy = 0.0;

    double laplacian() const { return 2.0 * (cxx + cyy); }
    /// f - alpha Lap f averaged over the circle of radius r around x0.
    double residual_circle_mean(double r, double alpha) const {
        return c0 - alpha * laplacian() + 0.5 * (cxx + cyy) * r * r;
    }
};

struct EpsSweepResult {
    std::vector<double> epsilons;   // strictly decreasing
    std::vector<double> integrals;  // int_B w
    std::vector<double> jdiffs;     // j(K_eps) - j(K)
    double reference = 0.0;         // (f(x0) - alpha Lap f(x0))^2 pi
    double A = 0.0;                 // fit of jdiff ~ A eps^4 ln eps on the two smallest eps
    double ratio = 0.0;             // A / reference
    double fit_residual = 0.0;      // max relative misfit of the two-point fit
    bool outside_asymptotic_regime = false;  // fit_residual > 10%
    double slope = 0.0;             // log-log slope of |jdiff| over eps in [1e-3, 1e-2]
};

/// For each eps the local problem w - alpha Lap w = -(f - alpha Lap f) in
/// B(x0, eps), w = 0 on the circle, is solved radially with the source
/// replaced by its circle mean; then jdiff = 1/2 int_B w (f - alpha Lap f).
inline EpsSweepResult epsilon_sweep_topograd(const Quadratic& f, double alpha, std::vector<double> eps_list,
                                             std::size_t threads = 1) {
    if (eps_list.size() < 2) throw std::invalid_argument("epsilon_sweep_topograd: need at least two eps values");
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
    if (std::adjacent_find(eps_list.begin(), eps_list.end()) != eps_list.end())
        throw std::invalid_argument("epsilon_sweep_topograd: eps values must be distinct");

    EpsSweepResult out;
    out.epsilons = eps_list;
    const auto source = [&](double r) { return -f.residual_circle_mean(r, alpha); };
    const auto weight = [&](double r) { return f.residual_circle_mean(r, alpha); };
    struct Cell { double integral, jdiff; };
    const auto cells = parallel_map(eps_list.size(), threads, [&](std::size_t i) {
        const auto grid = solve_disc_radial(eps_list[i], alpha, source);
        return Cell{disc_integral(grid), 0.5 * disc_integral(grid, weight)};
    });
    for (const auto& c : cells) {
        out.integrals.push_back(c.integral);
        out.jdiffs.push_back(c.jdiff);
    }

    const double g = f.c0 - alpha * f.laplacian();
    out.reference = g * g * std::numbers::pi;

    const std::size_t n = eps_list.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = n - 2; i < n; ++i) {
        const double e = eps_list[i];
        const double x = e * e * e * e * std::log(e);
        sxy += x * out.jdiffs[i];
        sxx += x * x;
    }
    out.A = sxy / sxx;
    out.ratio = out.reference > 0.0 ? out.A / out.reference : 0.0;
    for (std::size_t i = n - 2; i < n; ++i) {
        const double e = eps_list[i];
        const double model = out.A * e * e * e * e * std::log(e);
        if (out.jdiffs[i] != 0.0)
            out.fit_residual = std::max(out.fit_residual, std::abs(model - out.jdiffs[i]) / std::abs(out.jdiffs[i]));
    }
    out.outside_asymptotic_regime = out.fit_residual > 0.10;

    double sx = 0, sy = 0, sxx2 = 0, sxy2 = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = eps_list[i];
        if (e < 1e-3 * (1 - 1e-12) || e > 1e-2 * (1 + 1e-12) || out.jdiffs[i] == 0.0) continue;
        const double x = std::log(e), y = std::log(std::abs(out.jdiffs[i]));
        sx += x; sy += y; sxx2 += x * x; sxy2 += x * y;
        ++m;
    }
    if (m >= 2) out.slope = (double(m) * sxy2 - sx * sy) / (double(m) * sxx2 - sx * sx);
    return out;
}

// ---- lattice of balls ------------------------------------------------------

/// Pixels of a res x res grid on the unit square whose centres lie within
/// m/k of the centre of one of the k^2 lattice cells.
inline Mask lattice_ball_mask(std::size_t res, std::size_t k, double m) {
    if (k < 1) throw std::invalid_argument("lattice_ball_mask: k must be >= 1");
    Mask mask(res, res);
    const double h = 1.0 / double(res);
    const double rad2 = (m / double(k)) * (m / double(k));
    for (std::size_t y = 0; y < res; ++y) {
        for (std::size_t x = 0; x < res; ++x) {
            const double px = (double(x) + 0.5) * h, py = (double(y) + 0.5) * h;
            const double cx = (std::floor(px * double(k)) + 0.5) / double(k);
            const double cy = (std::floor(py * double(k)) + 0.5) / double(k);
            if ((px - cx) * (px - cx) + (py - cy) * (py - cy) <= rad2) mask.set(x, y, true);
        }
    }
    return mask;
}

struct ThetaCell {
    double m = 0.0;
    std::size_t k = 0;
    double F = 0.0;  // k^2 sum v h^2
    std::size_t iterations = 0;
};

struct ThetaFit {
    std::size_t k = 0;
    double slope = 0.0;      // dF / d|ln m|
    double intercept = 0.0;
    double r2 = 0.0;
    bool monotone = true;    // F non-increasing in m
};

struct ThetaResult {
    double alpha = 0.0;
    std::size_t resolution = 0;
    std::vector<ThetaCell> cells;  // ordered by (k, m)
    std::vector<ThetaFit> fits;
};

/// Solves -alpha Lap v + v = 1 off the balls, v = 0 on them, Neumann on the
/// square, for every (m, k), and fits F against |ln m| per k.
inline ThetaResult theta_experiment(std::vector<double> ms, const std::vector<std::size_t>& ks, double alpha,
                                    std::size_t resolution = 512, std::size_t threads = 1, double tol = 1e-8) {
    if (ms.empty() || ks.empty()) throw std::invalid_argument("theta_experiment: empty m or k list");
    std::sort(ms.begin(), ms.end());
    const double h = 1.0 / double(resolution);
    ThetaResult out;
    out.alpha = alpha;
    out.resolution = resolution;
    out.cells = parallel_map(ms.size() * ks.size(), threads, [&](std::size_t idx) {
        const std::size_t k = ks[idx / ms.size()];
        const double m = ms[idx % ms.size()];
        const Mask balls = lattice_ball_mask(resolution, k, m);
        LinearOperatorSpec op{alpha / (h * h), 1.0, balls, ImageGrid(resolution, resolution, 1.0),
                              ImageGrid(resolution, resolution, 0.0)};
        auto sol = solve_linear_report(op, tol, 50 * resolution + 1000);
        if (!sol.report.converged) throw NonConvergence(sol.report);
        return ThetaCell{m, k, double(k * k) * sol.u.sum() * h * h, sol.report.iterations};
    });
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        ThetaFit fit;
        fit.k = ks[ki];
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = double(ms.size());
        for (std::size_t j = 0; j < ms.size(); ++j) {
            const auto& c = out.cells[ki * ms.size() + j];
            const double x = std::abs(std::log(c.m));
            sx += x; sy += c.F; sxx += x * x; sxy += x * c.F;
            if (j > 0 && c.F > out.cells[ki * ms.size() + j - 1].F) fit.monotone = false;
        }
        const double den = n * sxx - sx * sx;
        fit.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
        fit.intercept = (sy - fit.slope * sx) / n;
        double ss_res = 0, ss_tot = 0;
        for (std::size_t j = 0; j < ms.size(); ++j) {
            const auto& c = out.cells[ki * ms.size() + j];
            const double pred = fit.intercept + fit.slope * std::abs(std::log(c.m));
            ss_res += (c.F - pred) * (c.F - pred);
            ss_tot += (c.F - sy / n) * (c.F - sy / n);
        }
        fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
        out.fits.push_back(fit);
    }
    return out;
}

// ---- annulus ----------------------------------------------------------------

struct AnnulusReport {
    double m = 0.0, t1 = 0.0, alpha = 0.0;
    double k_derived = 0.0;     // t1^2 / (2 alpha), forced by w'(t1) = 0
    double k_printed = 0.0;     // m t1^2 / (2 alpha)
    double err_derived = 0.0;   // max |w_fd - w_closed| / max |w_fd|
    double err_printed = 0.0;
};

/// k ln(r/m) - (r^2 - m^2) / (4 alpha)
inline double annulus_closed_form(double r, double m, double alpha, double k) {
    return k * std::log(r / m) - (r * r - m * m) / (4.0 * alpha);
}

/// -alpha (w'' + w'/r) = 1 on (m, t1), w(m) = 0, w'(t1) = 0, by second-order
/// differences (ghost node for the Neumann end), compared with both constants.
inline AnnulusReport annulus_check(double m, double alpha, double t1 = std::sqrt(0.5), std::size_t n = 20000) {
    if (!(m > 0.0 && m < t1)) throw std::invalid_argument("annulus_check: need 0 < m < t1");
    const double h = (t1 - m) / double(n);
    const double k = alpha / (h * h);
    // unknowns w_1 .. w_n
    std::vector<double> a(n), b(n), c(n), d(n, 1.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double r = m + double(i) * h;
        const double drift = alpha / (2.0 * r * h);
        a[i - 1] = -k + drift;
        b[i - 1] = 2.0 * k;
        c[i - 1] = -k - drift;
    }
    a[n - 1] += c[n - 1];  // w_{n+1} = w_{n-1}
    c[n - 1] = 0.0;
    a[0] = 0.0;            // w_0 = 0
    const auto w = detail::thomas(a, b, c, d);

    AnnulusReport rep;
    rep.m = m;
    rep.t1 = t1;
    rep.alpha = alpha;
    rep.k_derived = t1 * t1 / (2.0 * alpha);
    rep.k_printed = m * t1 * t1 / (2.0 * alpha);
    double scale = 0.0, ed = 0.0, ep = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double r = m + double(i) * h;
        const double v = w[i - 1];
        scale = std::max(scale, std::abs(v));
        ed = std::max(ed, std::abs(v - annulus_closed_form(r, m, alpha, rep.k_derived)));
        ep = std::max(ep, std::abs(v - annulus_closed_form(r, m, alpha, rep.k_printed)));
    }
    rep.err_derived = ed / scale;
    rep.err_printed = ep / scale;
    return rep;
}

} // namespace pic::asym
