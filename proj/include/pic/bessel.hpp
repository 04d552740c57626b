#pragma once

// Modified Bessel functions of orders 0 and 1 for real z > 0.
//
// I0, I1: power series for z <= 30 (all terms positive, no cancellation),
// Hankel asymptotic expansion beyond.
// K0, K1: logarithmic series for z <= 2, Steed's continued fraction (the
// Temme form of CF2) for z > 2.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pic::bessel {

inline constexpr double euler_gamma = 0.57721566490153286061;

namespace detail {

inline void require_positive(double z, const char* who) {
    if (!(z > 0.0) || !std::isfinite(z)) throw std::domain_error(std::string(who) + ": needs finite z > 0");
}

/// sum_k (z^2/4)^k / (k! (k+nu)!) for nu in {0, 1}
inline double i_series(double z, int nu) {
    const double q = 0.25 * z * z;
    double term = nu == 0 ? 1.0 : 0.5 * z;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (double(k) * double(k + nu));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

/// e^{-z} sqrt(2 pi z) I_nu(z) by the Hankel expansion, valid for large z.
inline double i_scaled_asymptotic(double z, int nu) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (double(k) * 8.0 * z);
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

/// K0 and K1 for z > 2 via the continued fraction of Steed and Temme.
inline void k_cf2(double z, double& k0, double& k1) {
    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < 10000; ++i) {
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < 1e-17) break;
    }
    h *= a1;
    k0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
    k1 = k0 * (z + 0.5 - h) / z;
}

} // namespace detail

inline double I0(double z) {
    if (z == 0.0) return 1.0;
    z = std::abs(z);
    if (z <= 30.0) return detail::i_series(z, 0);
    return std::exp(z) / std::sqrt(2.0 * std::numbers::pi * z) * detail::i_scaled_asymptotic(z, 0);
}

inline double I1(double z) {
    if (z == 0.0) return 0.0;
    const double sign = z < 0.0 ? -1.0 : 1.0;
    z = std::abs(z);
    if (z <= 30.0) return sign * detail::i_series(z, 1);
    return sign * std::exp(z) / std::sqrt(2.0 * std::numbers::pi * z) * detail::i_scaled_asymptotic(z, 1);
}

inline double K0(double z) {
    detail::require_positive(z, "K0");
    if (z > 2.0) {
        double k0, k1;
        detail::k_cf2(z, k0, k1);
        return k0;
    }
    // K0 = -(ln(z/2) + gamma) I0 + sum_{k>=1} H_k (z^2/4)^k / (k!)^2
    const double q = 0.25 * z * z;
    double term = 1.0, harmonic = 0.0, corr = 0.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (double(k) * double(k));
        harmonic += 1.0 / k;
        corr += term * harmonic;
        if (term * harmonic < 1e-18 * std::abs(corr)) break;
    }
    return -(std::log(0.5 * z) + euler_gamma) * I0(z) + corr;
}

inline double K1(double z) {
    detail::require_positive(z, "K1");
    if (z > 2.0) {
        double k0, k1;
        detail::k_cf2(z, k0, k1);
        return k1;
    }
    // K1 = 1/z + ln(z/2) I1 - (z/4) sum_{k>=0} (psi(k+1) + psi(k+2)) (z^2/4)^k / (k! (k+1)!)
    const double q = 0.25 * z * z;
    double term = 1.0;          // (z^2/4)^k / (k! (k+1)!)
    double psi_k1 = -euler_gamma;  // psi(k+1)
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
        if (k > 0) {
            term *= q / (double(k) * double(k + 1));
            psi_k1 += 1.0 / k;
        }
        const double piece = term * (2.0 * psi_k1 + 1.0 / (k + 1));
        sum += piece;
        if (k > 0 && std::abs(piece) < 1e-18 * std::abs(sum)) break;
    }
    return 1.0 / z + std::log(0.5 * z) * I1(z) - 0.25 * z * sum;
}

} // namespace pic::bessel
