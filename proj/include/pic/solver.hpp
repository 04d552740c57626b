#pragma once

// Finite-difference solvers for the masked reaction-diffusion problems
//
//     reaction * u - coeff * Lap(u) = rhs    off the mask K
//                                  u = g      on K
//                          du/dn = 0          on the outer boundary
//
// Mask pixels are eliminated (their values are folded into the right-hand
// side), which leaves a symmetric positive definite system over the free
// pixels. It is solved matrix-free by conjugate gradients with a Jacobi
// preconditioner. Mask pixels are copied from g and never touched by CG.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pic/image.hpp"

namespace pic {

struct SolveSpec {
    double alpha = 1.0;  // diffusivity weight
    double dt = 0.1;     // time step of the implicit parabolic scheme
    double tol = 1e-8;   // relative residual ||r|| / ||b||
    std::optional<std::size_t> max_iter;  // default: 10 sqrt(unknowns) + 1000

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("SolveSpec: alpha must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("SolveSpec: dt must be > 0");
        if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("SolveSpec: tol must lie in (0,1)");
        if (max_iter && *max_iter < 1) throw std::invalid_argument("SolveSpec: max_iter must be >= 1");
    }
};

struct SolveReport {
    std::size_t unknowns = 0;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = true;
};

class NonConvergence : public std::runtime_error {
public:
    explicit NonConvergence(const SolveReport& r)
        : std::runtime_error("PCG did not converge: relative residual " +
                             std::to_string(r.relative_residual) + " after " +
                             std::to_string(r.iterations) + " iterations"),
          report(r) {}
    SolveReport report;
};

struct LinearOperatorSpec {
    double coeff = 1.0;     // multiplier of the Laplacian
    double reaction = 1.0;  // 1 for the L2 problems, 0 for homogeneous diffusion
    Mask dirichlet;
    ImageGrid rhs;
    ImageGrid dirichlet_values;
};

struct SolveOutcome {
    ImageGrid u;
    SolveReport report;
};

inline std::size_t default_max_iter(std::size_t unknowns) {
    return static_cast<std::size_t>(10.0 * std::sqrt(double(unknowns))) + 1000;
}

namespace detail {

/// Restriction of the masked operator to the free pixels.
class FreeOperator {
public:
    FreeOperator(const Mask& mask, double reaction, double coeff)
        : reaction_(reaction), coeff_(coeff) {
        const std::size_t w = mask.width(), h = mask.height();
        compact_.assign(w * h, -1);
        for (std::size_t i = 0; i < w * h; ++i) {
            if (!mask[i]) {
                compact_[i] = static_cast<std::int64_t>(free_.size());
                free_.push_back(i);
            }
        }
        nb_.resize(free_.size());
        diag_.resize(free_.size());
        for (std::size_t k = 0; k < free_.size(); ++k) {
            const std::size_t i = free_[k], x = i % w, y = i / w;
            int degree = 0;
            auto& nb = nb_[k];
            nb.fill(-1);
            int slot = 0;
            const auto visit = [&](std::size_t j) {
                ++degree;
                nb[slot++] = compact_[j];
            };
            if (x > 0) visit(i - 1);
            if (x + 1 < w) visit(i + 1);
            if (y > 0) visit(i - w);
            if (y + 1 < h) visit(i + w);
            diag_[k] = reaction_ + coeff_ * degree;
        }
    }

    std::size_t size() const noexcept { return free_.size(); }
    std::size_t full_index(std::size_t k) const { return free_[k]; }
    std::int64_t compact(std::size_t i) const { return compact_[i]; }
    double diag(std::size_t k) const { return diag_[k]; }
    double coeff() const noexcept { return coeff_; }

    void apply(std::span<const double> p, std::span<double> q) const {
        for (std::size_t k = 0; k < free_.size(); ++k) {
            double acc = diag_[k] * p[k];
            for (const auto j : nb_[k])
                if (j >= 0) acc -= coeff_ * p[static_cast<std::size_t>(j)];
            q[k] = acc;
        }
    }

private:
    double reaction_;
    double coeff_;
    std::vector<std::size_t> free_;
    std::vector<std::int64_t> compact_;
    std::vector<std::array<std::int64_t, 4>> nb_;
    std::vector<double> diag_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace detail

/// Solves the masked system and reports the achieved residual; never throws
/// on non-convergence (inspect report.converged).
inline SolveOutcome solve_linear_report(const LinearOperatorSpec& op, double tol,
                                        std::optional<std::size_t> max_iter = std::nullopt,
                                        const ImageGrid* initial = nullptr) {
    require_same_shape(op.rhs, op.dirichlet_values, "solve_linear");
    require_same_shape(op.rhs, op.dirichlet, "solve_linear");
    if (initial) require_same_shape(op.rhs, *initial, "solve_linear");
    if (op.reaction == 0.0 && op.dirichlet.count() == 0)
        throw std::invalid_argument("solve_linear: pure diffusion needs at least one mask pixel");

    const std::size_t w = op.rhs.width();
    const std::size_t h = op.rhs.height();
    detail::FreeOperator A(op.dirichlet, op.reaction, op.coeff);
    const std::size_t n = A.size();

    SolveOutcome out{ImageGrid(w, h), SolveReport{}};
    out.report.unknowns = n;
    for (std::size_t i = 0; i < w * h; ++i)
        if (op.dirichlet[i]) out.u[i] = op.dirichlet_values[i];
    if (n == 0) return out;

    // b = rhs + coeff * (sum of masked neighbour values)
    std::vector<double> b(n), x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = A.full_index(k), px = i % w, py = i / w;
        double acc = op.rhs[i];
        const auto fold = [&](std::size_t j) {
            if (op.dirichlet[j]) acc += op.coeff * op.dirichlet_values[j];
        };
        if (px > 0) fold(i - 1);
        if (px + 1 < w) fold(i + 1);
        if (py > 0) fold(i - w);
        if (py + 1 < h) fold(i + w);
        b[k] = acc;
        if (initial) x[k] = (*initial)[i];
    }

    const double bnorm = std::sqrt(detail::dot(b, b));
    const std::size_t limit = max_iter.value_or(default_max_iter(n));
    if (bnorm == 0.0) {
        // Zero data: the unique solution is zero.
        out.report.relative_residual = 0.0;
        return out;
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    A.apply(x, q);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
    double rnorm = std::sqrt(detail::dot(r, r));
    std::size_t it = 0;
    if (rnorm / bnorm > tol) {
        for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / A.diag(k);
        p = z;
        double rz = detail::dot(r, z);
        while (it < limit) {
            ++it;
            A.apply(p, q);
            const double pq = detail::dot(p, q);
            if (!(pq > 0.0)) break;
            const double step = rz / pq;
            for (std::size_t k = 0; k < n; ++k) {
                x[k] += step * p[k];
                r[k] -= step * q[k];
            }
            rnorm = std::sqrt(detail::dot(r, r));
            if (rnorm / bnorm <= tol) break;
            for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / A.diag(k);
            const double rz_next = detail::dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
        }
    }

    out.report.iterations = it;
    out.report.relative_residual = rnorm / bnorm;
    out.report.converged = out.report.relative_residual <= tol;
    for (std::size_t k = 0; k < n; ++k) out.u[A.full_index(k)] = x[k];
    return out;
}

/// As solve_linear_report, but throws NonConvergence when the tolerance is missed.
inline ImageGrid solve_linear(const LinearOperatorSpec& op, double tol,
                              std::optional<std::size_t> max_iter = std::nullopt,
                              const ImageGrid* initial = nullptr) {
    auto res = solve_linear_report(op, tol, max_iter, initial);
    if (!res.report.converged) throw NonConvergence(res.report);
    return std::move(res.u);
}

/// -alpha Lap u + u = 0 off K, u = f on K. With K empty the solution is 0.
inline ImageGrid solve_stationary(const ImageGrid& f, const Mask& K, const SolveSpec& spec) {
    spec.validate();
    require_same_shape(f, K, "solve_stationary");
    LinearOperatorSpec op{spec.alpha, 1.0, K, ImageGrid(f.width(), f.height()), f};
    return solve_linear(op, spec.tol, spec.max_iter);
}

/// One implicit Euler step: u - dt alpha Lap u = u_prev off K, u = f on K.
inline ImageGrid solve_parabolic_step(const ImageGrid& u_prev, const ImageGrid& f, const Mask& K,
                                      const SolveSpec& spec) {
    spec.validate();
    require_same_shape(u_prev, f, "solve_parabolic_step");
    require_same_shape(f, K, "solve_parabolic_step");
    LinearOperatorSpec op{spec.dt * spec.alpha, 1.0, K, u_prev, f};
    return solve_linear(op, spec.tol, spec.max_iter, &u_prev);
}

/// Implicit step whose Dirichlet data is the previous iterate itself.
inline ImageGrid solve_denoise_step(const ImageGrid& u_prev, const Mask& K, const SolveSpec& spec) {
    return solve_parabolic_step(u_prev, u_prev, K, spec);
}

/// Homogeneous diffusion inpainting: Lap u = 0 off K, u = f on K.
inline ImageGrid solve_homogeneous(const ImageGrid& f, const Mask& K, const SolveSpec& spec) {
    spec.validate();
    require_same_shape(f, K, "solve_homogeneous");
    LinearOperatorSpec op{1.0, 0.0, K, ImageGrid(f.width(), f.height()), f};
    return solve_linear(op, spec.tol, spec.max_iter);
}

/// Iterates the implicit step `steps` times. `masks` holds either one mask
/// (reused every step) or one mask per step. Returns u^1 .. u^steps.
inline std::vector<ImageGrid> run_parabolic(const ImageGrid& u0, const ImageGrid& f,
                                            std::span<const Mask> masks, const SolveSpec& spec,
                                            std::size_t steps) {
    if (steps < 1) throw std::invalid_argument("run_parabolic: steps must be >= 1");
    if (masks.size() != 1 && masks.size() != steps)
        throw std::invalid_argument("run_parabolic: need one mask or one mask per step");
    std::vector<ImageGrid> iterates;
    iterates.reserve(steps);
    const ImageGrid* prev = &u0;
    for (std::size_t n = 0; n < steps; ++n) {
        const Mask& K = masks.size() == 1 ? masks[0] : masks[n];
        iterates.push_back(solve_parabolic_step(*prev, f, K, spec));
        prev = &iterates.back();
    }
    return iterates;
}

/// J(u) = 1/2 sum u^2 + coeff/2 sum |grad u|^2 - sum u_prev u.
inline double parabolic_energy(const ImageGrid& u, const ImageGrid& u_prev, double coeff) {
    require_same_shape(u, u_prev, "parabolic_energy");
    const auto g = gradient(u);
    double e = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        e += 0.5 * u[i] * u[i] + 0.5 * coeff * (g.dx[i] * g.dx[i] + g.dy[i] * g.dy[i]) -
             u_prev[i] * u[i];
    return e;
}

} // namespace pic
