#pragma once

/**
 * @file diagnostics.hpp
 * @brief Verification suites over simulated or synthetic data: far-field
 * decay of the liquid potential, centroid frame, kinematic volume identity
 * and realness of reconstructed interfaces.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bubble/error.hpp"
#include "bubble/harmonics.hpp"
#include "bubble/shape_dynamics.hpp"

namespace bubble {

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

struct SlopeCheck {
    double slope = 0.0;
    double expected = 0.0;   ///< exponent of the lowest degree present
    double bound = 0.0;      ///< exponent of the far-field condition: -2, -3 or -1
    double tolerance = 0.0;
    bool passed = false;        ///< |slope - expected| <= tolerance
    bool within_bound = false;  ///< slope <= bound + tolerance
};

struct FarFieldReport {
    std::vector<double> radii;
    std::vector<double> gradient_sup;
    std::vector<double> hessian_sup;
    std::vector<double> pressure_sup;
    SlopeCheck gradient;
    SlopeCheck hessian;
    SlopeCheck pressure;
    bool vacuous = false;  ///< all coefficients zero
    bool passed = false;
    bool within_bounds = false;
};

inline constexpr double kGradientSlopeTol = 0.05;
inline constexpr double kHessianSlopeTol = 0.1;
inline constexpr double kPressureSlopeTol = 0.05;

/// Far-field decay of the multipole potential with coefficients b and the
/// pressure -rho_l R_star sum b_dot r^{-(l+1)} Y. The lowest degree present
/// sets the expected exponents: -(l+2) for the gradient, -(l+3) for the
/// Hessian and -(l+1) for the pressure, i.e. -2, -3, -1 with a monopole.
/// Those three values are also the bounds every field must respect.
inline FarFieldReport verify_far_field(const MultipoleCoefficients& b, const MultipoleCoefficients& b_dot,
                                       std::span<const double> radii, double rho_l_R = 1.0) {
    if (radii.size() < 3) throw Error(ErrorCode::InsufficientRadii, "need at least 3 radii");
    for (double r : radii) {
        if (!(r >= 4.0)) throw Error(ErrorCode::InsufficientRadii, "radius " + std::to_string(r) + " < 4");
    }
    FarFieldReport rep;
    rep.radii.assign(radii.begin(), radii.end());
    rep.gradient.tolerance = kGradientSlopeTol;
    rep.hessian.tolerance = kHessianSlopeTol;
    rep.pressure.tolerance = kPressureSlopeTol;
    rep.gradient.bound = -2.0;
    rep.hessian.bound = -3.0;
    rep.pressure.bound = -1.0;
    const int lb = b.lowest_degree();
    const int lp = b_dot.lowest_degree();
    rep.gradient.expected = lb < 0 ? 0.0 : -(lb + 2.0);
    rep.hessian.expected = lb < 0 ? 0.0 : -(lb + 3.0);
    rep.pressure.expected = lp < 0 ? 0.0 : -(lp + 1.0);

    // angular sup over a fixed product grid that avoids the poles
    const int L = std::max({b.highest_degree(), b_dot.highest_degree(), 0});
    const SphereGrid angles(L + 6, 2 * L + 12);
    for (double r : radii) {
        double g = 0.0, h = 0.0, p = 0.0;
        for (int i = 0; i < angles.n_theta(); ++i) {
            for (int j = 0; j < angles.n_phi(); ++j) {
                const double th = angles.theta(i);
                const double ph = angles.phi(j);
                if (lb >= 0) {
                    g = std::max(g, eval_multipole_gradient(b, r, th, ph).norm());
                    h = std::max(h, frobenius_norm(multipole_hessian_fd(b, spherical_to_cartesian(r, th, ph), 1e-3 * r)));
                }
                if (lp >= 0) p = std::max(p, rho_l_R * std::abs(eval_multipole_potential(b_dot, r, th, ph)));
            }
        }
        rep.gradient_sup.push_back(g);
        rep.hessian_sup.push_back(h);
        rep.pressure_sup.push_back(p);
    }
    auto finish = [&](SlopeCheck& c, const std::vector<double>& sup, bool present) {
        if (!present) {
            c.passed = true;
            c.within_bound = true;
            return;
        }
        c.slope = loglog_slope(radii, sup);
        c.passed = std::abs(c.slope - c.expected) <= c.tolerance;
        c.within_bound = c.slope <= c.bound + c.tolerance;
    };
    finish(rep.gradient, rep.gradient_sup, lb >= 0);
    finish(rep.hessian, rep.hessian_sup, lb >= 0);
    finish(rep.pressure, rep.pressure_sup, lp >= 0);
    rep.vacuous = lb < 0 && lp < 0;
    rep.passed = rep.gradient.passed && rep.hessian.passed && rep.pressure.passed;
    rep.within_bounds = rep.gradient.within_bound && rep.hessian.within_bound && rep.pressure.within_bound;
    return rep;
}

inline FarFieldReport verify_far_field(const MultipoleCoefficients& b, std::span<const double> radii) {
    return verify_far_field(b, b, radii);
}

// ---------------------------------------------------------------------------

inline constexpr double kCentroidTolerance = 1e-10;

struct CentroidReport {
    double max_dipole = 0.0;
    std::size_t samples = 0;
    bool passed = true;
};

/// Largest |<R, Y_1^m>| across a series of sampled interfaces.
inline CentroidReport verify_centroid(std::span<const SurfaceField> series) {
    if (series.empty()) throw Error(ErrorCode::SeriesEmpty, "no interface samples");
    CentroidReport rep;
    for (const SurfaceField& f : series) {
        for (int m = -1; m <= 1; ++m) rep.max_dipole = std::max(rep.max_dipole, std::abs(project(f, {1, m})));
    }
    rep.samples = series.size();
    rep.passed = rep.max_dipole <= kCentroidTolerance;
    return rep;
}

/// Same check on coefficient snapshots.
inline CentroidReport verify_centroid(std::span<const HarmonicCoefficients> series) {
    if (series.empty()) throw Error(ErrorCode::SeriesEmpty, "no coefficient samples");
    CentroidReport rep;
    for (const HarmonicCoefficients& c : series) {
        for (int m = -1; m <= 1; ++m) rep.max_dipole = std::max(rep.max_dipole, std::abs(c.get({1, m})));
    }
    rep.samples = series.size();
    rep.passed = rep.max_dipole <= kCentroidTolerance;
    return rep;
}

// ---------------------------------------------------------------------------

inline constexpr double kKinematicTolerance = 1e-12;

/// Monopole time series of a run.
struct MonopoleSeries {
    std::vector<double> t;
    std::vector<double> a_dot;
    std::vector<double> b;
};

struct VolumeReport {
    double max_kinematic_residual = 0.0;
    double volume_drift = 0.0;  ///< -4 pi int b_0^0 dt, informational
    bool passed = true;
};

/// Kinematic identity a_dot + (l+1) b over every mode sample, plus the
/// informational monopole volume drift by trapezoidal time quadrature.
inline VolumeReport verify_volume_conservation(std::span<const ModeState> samples, const MonopoleSeries& mono) {
    VolumeReport rep;
    for (const ModeState& s : samples) rep.max_kinematic_residual = std::max(rep.max_kinematic_residual, kinematic_residual(s));
    for (std::size_t i = 0; i < mono.a_dot.size(); ++i) {
        rep.max_kinematic_residual = std::max(rep.max_kinematic_residual, std::abs(mono.a_dot[i] + mono.b[i]));
    }
    double integral = 0.0;
    for (std::size_t i = 1; i < mono.t.size(); ++i) {
        integral += 0.5 * (mono.t[i] - mono.t[i - 1]) * (mono.b[i] + mono.b[i - 1]);
    }
    rep.volume_drift = -4.0 * std::numbers::pi * integral;
    rep.passed = rep.max_kinematic_residual <= kKinematicTolerance;
    return rep;
}

// ---------------------------------------------------------------------------

inline constexpr double kRealnessTolerance = 1e-10;

/// max |Im R| / max |R| of the interface synthesized from coefficients on a
/// grid matching their band limit; 0 for the zero interface.
inline double realness_defect(const HarmonicCoefficients& coeffs) {
    const int L = std::max(coeffs.highest_degree(), 0);
    const SurfaceField f = synthesize(coeffs, SphereGrid::for_band_limit(2 * L + 1));
    double im = 0.0, mag = 0.0;
    for (const cplx& v : f.values) {
        im = std::max(im, std::abs(v.imag()));
        mag = std::max(mag, std::abs(v));
    }
    return mag == 0.0 ? 0.0 : im / mag;
}

}  // namespace bubble
