#pragma once

/**
 * @file bessel.hpp
 * @brief Spherical Bessel functions j_l, their positive zeros, and the
 * Dirichlet eigenbasis j_l(z_n r) of the unit ball in L2(r^2 dr).
 */

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bubble/error.hpp"

namespace bubble {

namespace detail {

/// x^l / (2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1)).
inline double sph_bessel_series(int ell, double x) {
    double lead = 1.0;
    for (int k = 1; k <= ell; ++k) lead *= x / (2.0 * k + 1.0);
    const double q = -0.5 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (k * (2.0 * ell + 2.0 * k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return lead * sum;
}

}  // namespace detail

/// j_l(x) for x >= 0. Upward recurrence is stable for x > l; the power
/// series covers the rest.
inline double sph_bessel(int ell, double x) {
    if (ell < 0) throw Error(ErrorCode::IndexInvalid, "spherical Bessel order must be >= 0");
    x = std::abs(x);
    if (x <= double(ell) + 1.0) return detail::sph_bessel_series(ell, x);
    double j0 = std::sin(x) / x;
    if (ell == 0) return j0;
    double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    for (int k = 1; k < ell; ++k) {
        const double j2 = (2.0 * k + 1.0) / x * j1 - j0;
        j0 = j1;
        j1 = j2;
    }
    return j1;
}

/// d/dx j_l(x) = (l j_{l-1} - (l+1) j_{l+1}) / (2l+1), regular at 0.
inline double sph_bessel_derivative(int ell, double x) {
    if (ell == 0) return -sph_bessel(1, x);
    return (ell * sph_bessel(ell - 1, x) - (ell + 1.0) * sph_bessel(ell + 1, x)) / (2.0 * ell + 1.0);
}

namespace detail {

/// Zero of j_l inside (lo, hi), where j_l changes sign exactly once.
inline double refine_zero(int ell, double lo, double hi) {
    double flo = sph_bessel(ell, lo);
    const double fhi = sph_bessel(ell, hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw Error(ErrorCode::ConvergenceFailure,
                    "no sign change of j_" + std::to_string(ell) + " on the interlacing bracket");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = sph_bessel(ell, mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double d = sph_bessel_derivative(ell, x);
        if (d == 0.0) break;
        const double nx = x - sph_bessel(ell, x) / d;
        if (!(nx > lo - 1e-12 && nx < hi + 1e-12)) break;
        x = nx;
    }
    if (std::abs(sph_bessel(ell, x)) > 1e-12) {
        throw Error(ErrorCode::ConvergenceFailure, "zero of j_" + std::to_string(ell) + " did not converge");
    }
    return x;
}

}  // namespace detail

/// First `count` positive zeros of j_l, ascending. Zeros of j_l interlace
/// those of j_{l-1}: z_{l-1,n} < z_{l,n} < z_{l-1,n+1}.
inline std::vector<double> bessel_zeros(int ell, int count) {
    if (ell < 0 || count < 1) throw Error(ErrorCode::IndexInvalid, "bessel_zeros needs ell >= 0, count >= 1");
    std::vector<double> prev(count + ell);
    for (int n = 0; n < count + ell; ++n) prev[n] = (n + 1) * std::numbers::pi;
    for (int k = 1; k <= ell; ++k) {
        std::vector<double> cur(count + ell - k);
        for (std::size_t n = 0; n < cur.size(); ++n) cur[n] = detail::refine_zero(k, prev[n], prev[n + 1]);
        prev = std::move(cur);
    }
    prev.resize(count);
    return prev;
}

/// n-th (1-based) positive zero of j_l.
inline double bessel_zero(int ell, int n) {
    if (n < 1) throw Error(ErrorCode::IndexInvalid, "zero index must be >= 1");
    return bessel_zeros(ell, n).back();
}

/// phi_n(r) = norm_n j_l(z_n r), orthonormal in L2([0,1], r^2 dr), with
/// int_0^1 j_l(z r)^2 r^2 dr = j_{l+1}(z)^2 / 2 at a zero z of j_l.
struct BesselEigenbasis {
    int ell = 0;
    std::vector<double> zeros;
    std::vector<double> norms;

    BesselEigenbasis(int ell_, int count) : ell(ell_), zeros(bessel_zeros(ell_, count)), norms(zeros.size()) {
        for (std::size_t n = 0; n < zeros.size(); ++n) {
            norms[n] = std::sqrt(2.0) / std::abs(sph_bessel(ell + 1, zeros[n]));
        }
    }

    int size() const { return int(zeros.size()); }
    double value(int n, double r) const { return norms[n] * sph_bessel(ell, zeros[n] * r); }
    double derivative(int n, double r) const { return norms[n] * zeros[n] * sph_bessel_derivative(ell, zeros[n] * r); }
};

}  // namespace bubble
