#pragma once

/**
 * @file shape_dynamics.hpp
 * @brief Liquid-side interface mode system.
 *
 * Each (l, m) mode carries the interface amplitude a, its rate a_dot and the
 * multipole coefficient b of the liquid potential, tied by the kinematic
 * condition a_dot = -(l + 1) b. The pair (a, b) obeys
 *
 *   a_dot = -(l + 1) b
 *   b_dot = s (l + 2)(l - 1) a - nu (l + 1)(l + 2) b - [l == 0] 2 sqrt(pi) P_g / (rho_l R)
 *
 * with s = sigma / (rho_l R^3) and nu = 2 mu_l / (rho_l R^2). The system is
 * linear with constant coefficients, so every step uses its exact affine flow
 * map; the integrator is symmetric and preserves the shape-mode energy.
 *
 * Dipole modes (l = 1) are frozen at zero in the centroid frame.
 */

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "bubble/error.hpp"
#include "bubble/harmonics.hpp"
#include "bubble/params.hpp"

namespace bubble {

struct ModeState {
    ModeIndex idx;
    cplx a{0.0, 0.0};
    cplx a_dot{0.0, 0.0};
    cplx b{0.0, 0.0};
};

/// Builds a mode state from (a, a_dot), deriving b from the kinematic link.
/// Dipole data must vanish unless allow_dipole is set.
inline ModeState make_mode_state(ModeIndex idx, cplx a, cplx a_dot, bool allow_dipole = false) {
    check_index(idx);
    if (idx.ell == 1 && !allow_dipole && (a != cplx{} || a_dot != cplx{})) {
        throw Error(ErrorCode::DipoleNotAllowed, "l = 1 data violates the centroid frame " + to_string(idx));
    }
    return ModeState{idx, a, a_dot, -a_dot / double(idx.ell + 1)};
}

inline ModeState make_mode_state_from_multipole(ModeIndex idx, cplx a, cplx b, bool allow_dipole = false) {
    return make_mode_state(idx, a, -double(idx.ell + 1) * b, allow_dipole);
}

/// Kinematic residual |a_dot + (l + 1) b|.
inline double kinematic_residual(const ModeState& s) { return std::abs(s.a_dot + double(s.idx.ell + 1) * s.b); }

struct GasPressurePerturbation {
    double P_g = 0.0;

    /// 2 sqrt(pi) P_g = R_gas T_inf f_0^0(1).
    static GasPressurePerturbation from_boundary_density(double f_at_1, const PhysicalParams& p) {
        return {p.R_gas * p.T_inf * f_at_1 / (2.0 * std::sqrt(std::numbers::pi))};
    }
};

inline double capillary_rate(const PhysicalParams& p, const EquilibriumState& eq) {
    return p.sigma / (p.rho_l * eq.R_star * eq.R_star * eq.R_star);
}

/// Inviscid capillary (Lamb) frequency of shape mode l >= 2.
inline double lamb_frequency(int ell, const PhysicalParams& p, const EquilibriumState& eq) {
    if (ell < 2) {
        throw Error(ErrorCode::ModeNotOscillatory,
                    "l = " + std::to_string(ell) + (ell == 0 ? " is the forced monopole" : " is frozen by the centroid frame"));
    }
    return std::sqrt(capillary_rate(p, eq) * (ell + 2.0) * (ell + 1.0) * (ell - 1.0));
}

/// a(t) = a0 cos(w t) + (a_dot0 / w) sin(w t) for a shape mode.
inline ModeState analytic_shape_solution(const ModeState& s0, const PhysicalParams& p, const EquilibriumState& eq,
                                         double t) {
    const double w = lamb_frequency(s0.idx.ell, p, eq);
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    const cplx a = s0.a * c + s0.a_dot / w * s;
    const cplx a_dot = -s0.a * w * s + s0.a_dot * c;
    return ModeState{s0.idx, a, a_dot, -a_dot / double(s0.idx.ell + 1)};
}

/// rho_l R a_dot^2 + (sigma / R^2)(l+2)(l+1)(l-1) a^2, conserved by inviscid shape modes.
inline double shape_mode_energy(const ModeState& s, const PhysicalParams& p, const EquilibriumState& eq) {
    const int l = s.idx.ell;
    return p.rho_l * eq.R_star * std::norm(s.a_dot) +
           p.sigma / (eq.R_star * eq.R_star) * (l + 2.0) * (l + 1.0) * (l - 1.0) * std::norm(s.a);
}

/// 2x2 matrix of d/dt (a, b) for degree l, viscous term included.
inline Eigen::Matrix2d mode_system_matrix(int ell, const PhysicalParams& p, const EquilibriumState& eq) {
    const double s = capillary_rate(p, eq);
    const double nu = 2.0 * p.mu_l / (p.rho_l * eq.R_star * eq.R_star);
    Eigen::Matrix2d m;
    m << 0.0, -(ell + 1.0),
        s * (ell + 2.0) * (ell - 1.0), -nu * (ell + 1.0) * (ell + 2.0);
    return m;
}

/// Roots of the characteristic polynomial of mode_system_matrix.
inline std::array<cplx, 2> viscous_mode_rates(int ell, const PhysicalParams& p, const EquilibriumState& eq) {
    const Eigen::Matrix2d m = mode_system_matrix(ell, p, eq);
    const double tr = m.trace();
    const double det = m.determinant();
    const cplx disc = std::sqrt(cplx(tr * tr / 4.0 - det, 0.0));
    return {tr / 2.0 + disc, tr / 2.0 - disc};
}

namespace detail {

/// Exact flow map of x' = M x + g over dt as a 3x3 augmented exponential.
inline Eigen::Matrix3d affine_flow(const Eigen::Matrix2d& m, const Eigen::Vector2d& g, double dt) {
    Eigen::Matrix3d aug = Eigen::Matrix3d::Zero();
    aug.topLeftCorner<2, 2>() = m * dt;
    aug.topRightCorner<2, 1>() = g * dt;
    return aug.exp();
}

inline ModeState advance_mode(const ModeState& s, const Eigen::Matrix3d& flow) {
    const Eigen::Vector3d re = flow * Eigen::Vector3d(s.a.real(), s.b.real(), 1.0);
    // forcing acts on the real part only; the imaginary part follows the homogeneous flow
    const Eigen::Vector2d im = flow.topLeftCorner<2, 2>() * Eigen::Vector2d(s.a.imag(), s.b.imag());
    ModeState out{s.idx, cplx(re[0], im[0]), {}, cplx(re[1], im[1])};
    out.a_dot = -double(s.idx.ell + 1) * out.b;
    return out;
}

inline Eigen::Vector2d monopole_forcing(const GasPressurePerturbation& pg, const PhysicalParams& p,
                                        const EquilibriumState& eq) {
    return {0.0, -2.0 * std::sqrt(std::numbers::pi) * pg.P_g / (p.rho_l * eq.R_star)};
}

inline std::vector<ModeState> step_modes(std::span<const ModeState> states, const GasPressurePerturbation& pg,
                                         const PhysicalParams& p, const EquilibriumState& eq, double dt) {
    std::vector<ModeState> out;
    out.reserve(states.size());
    std::map<int, Eigen::Matrix3d> flows;
    for (const ModeState& s : states) {
        if (s.idx.ell == 1) {
            out.push_back(ModeState{s.idx, {}, {}, {}});
            continue;
        }
        auto it = flows.find(s.idx.ell);
        if (it == flows.end()) {
            const Eigen::Vector2d g =
                s.idx.ell == 0 ? monopole_forcing(pg, p, eq) : Eigen::Vector2d::Zero().eval();
            it = flows.emplace(s.idx.ell, affine_flow(mode_system_matrix(s.idx.ell, p, eq), g, dt)).first;
        }
        out.push_back(advance_mode(s, it->second));
    }
    return out;
}

}  // namespace detail

/// Advances all modes by dt with mu_l = 0. The monopole is forced by the
/// supplied gas pressure perturbation, held constant over the step.
inline std::vector<ModeState> step_inviscid(std::span<const ModeState> states, const GasPressurePerturbation& pg,
                                            const PhysicalParams& p, const EquilibriumState& eq, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::ConfigInvalid, "dt must be positive");
    if (p.mu_l != 0.0) throw Error(ErrorCode::ViscosityNonzero, "step_inviscid requires mu_l == 0");
    return detail::step_modes(states, pg, p, eq, dt);
}

/// Advances the viscous irrotational mode system. It exists to exhibit the
/// constrained dynamics; general data have no regular solution.
inline std::vector<ModeState> step_viscous(std::span<const ModeState> states, const GasPressurePerturbation& pg,
                                           const PhysicalParams& p, const EquilibriumState& eq, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::ConfigInvalid, "dt must be positive");
    if (!(p.mu_l > 0.0)) throw Error(ErrorCode::ConfigInvalid, "step_viscous requires mu_l > 0");
    return detail::step_modes(states, pg, p, eq, dt);
}

/// Closed-form solution of the decoupled monopole a'' = 2 s a + F, F constant.
inline double decoupled_monopole_solution(double a0, double a_dot0, double P_g, const PhysicalParams& p,
                                          const EquilibriumState& eq, double t) {
    const double k = std::sqrt(2.0 * capillary_rate(p, eq));
    const double F = 2.0 * std::sqrt(std::numbers::pi) * P_g / (p.rho_l * eq.R_star);
    const double shift = F / (k * k);
    return (a0 + shift) * std::cosh(k * t) + a_dot0 / k * std::sinh(k * t) - shift;
}

// ---------------------------------------------------------------------------
// viscous compatibility

struct ViscousResidualEntry {
    ModeIndex idx;
    cplx b;
    double factor = 0.0;    ///< (l + 2) sqrt(l (l + 1)), tangential-stress residual per unit b
    double residual = 0.0;  ///< |b| * factor
};

struct ViscousCompatibilityReport {
    std::vector<ViscousResidualEntry> entries;
    double max_residual = 0.0;
    bool compatible = true;
};

/// Norm of the tangential stress residual d_theta d_r Phi - d_theta Phi at r = 1
/// for a unit multipole term r^{-(l+1)} Y_l^m.
inline double tangential_stress_factor(int ell) {
    return (ell + 2.0) * std::sqrt(double(ell) * (ell + 1.0));
}

/// Only radial (l = 0) multipole data can satisfy the viscous tangential
/// stress conditions.
inline ViscousCompatibilityReport check_viscous_compatibility(const MultipoleCoefficients& coeffs) {
    ViscousCompatibilityReport report;
    for (const auto& [idx, b] : coeffs.entries()) {
        ViscousResidualEntry e{idx, b, tangential_stress_factor(idx.ell), 0.0};
        e.residual = std::abs(b) * e.factor;
        if (idx.ell >= 1 && b != cplx{0.0, 0.0}) report.compatible = false;
        report.max_residual = std::max(report.max_residual, e.residual);
        report.entries.push_back(e);
    }
    return report;
}

}  // namespace bubble
