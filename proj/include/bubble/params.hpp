#pragma once

/**
 * @file params.hpp
 * @brief Material parameters of the gas bubble / liquid model and the
 * spherical equilibrium family parametrized by the bubble mass.
 *
 * All quantities are in the caller's (self-consistent) units. The interior
 * solvers work on the unit ball after the rescaling x = R_star * y and use the
 * diffusivity group returned by thermal_diffusivity().
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "bubble/error.hpp"

namespace bubble {

struct PhysicalParams {
    double rho_l = 1.0;    ///< liquid density
    double mu_l = 0.0;     ///< liquid dynamic viscosity
    double kappa_g = 1.0;  ///< gas thermal conductivity
    double sigma = 1.0;    ///< surface tension
    double T_inf = 1.0;    ///< far-field temperature
    double R_gas = 1.0;    ///< specific gas constant
    double c_v = 2.5;      ///< heat capacity at constant volume
    double gamma = 1.4;    ///< adiabatic index, 1 + R_gas / c_v
    double p_inf = 1.0;    ///< far-field pressure
};

struct EquilibriumState {
    double R_star = 0.0;
    double rho_star = 0.0;
    double p_star = 0.0;
    double mass = 0.0;
};

inline constexpr double kGammaRelTol = 1e-12;

/// Checks positivity constraints and gamma == 1 + R_gas / c_v.
/// sigma == 0 is accepted here; equilibrium construction rejects it.
inline PhysicalParams validate_params(const PhysicalParams& raw) {
    auto require = [](double value, bool ok, const char* field) {
        if (!ok || !std::isfinite(value)) {
            throw Error(ErrorCode::NonPositive, std::string(field) + " = " + std::to_string(value));
        }
    };
    require(raw.rho_l, raw.rho_l > 0.0, "rho_l");
    require(raw.mu_l, raw.mu_l >= 0.0, "mu_l");
    require(raw.kappa_g, raw.kappa_g >= 0.0, "kappa_g");
    require(raw.sigma, raw.sigma >= 0.0, "sigma");
    require(raw.T_inf, raw.T_inf > 0.0, "T_inf");
    require(raw.R_gas, raw.R_gas > 0.0, "R_gas");
    require(raw.c_v, raw.c_v > 0.0, "c_v");
    require(raw.gamma, raw.gamma > 1.0, "gamma");
    require(raw.p_inf, raw.p_inf > 0.0, "p_inf");

    const double expected = 1.0 + raw.R_gas / raw.c_v;
    if (std::abs(raw.gamma - expected) > kGammaRelTol * expected) {
        throw Error(ErrorCode::GammaInconsistent, "observed " + std::to_string(raw.gamma) +
                                                      ", expected 1 + R_gas/c_v = " +
                                                      std::to_string(expected));
    }
    return raw;
}

/// Builds a parameter record from key/value pairs named exactly like the
/// PhysicalParams fields. Every key is required.
inline PhysicalParams params_from_map(const std::map<std::string, double>& kv) {
    auto get = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(ErrorCode::ConfigInvalid, std::string("missing key ") + key);
        return it->second;
    };
    PhysicalParams p;
    p.rho_l = get("rho_l");
    p.mu_l = get("mu_l");
    p.kappa_g = get("kappa_g");
    p.sigma = get("sigma");
    p.T_inf = get("T_inf");
    p.R_gas = get("R_gas");
    p.c_v = get("c_v");
    p.gamma = get("gamma");
    p.p_inf = get("p_inf");
    return validate_params(p);
}

/// Left-hand side of p_inf R^3 + 2 sigma R^2 - 3 R_gas T_inf M / (4 pi).
inline double equilibrium_cubic(double R, double mass, const PhysicalParams& p) {
    return p.p_inf * R * R * R + 2.0 * p.sigma * R * R -
           3.0 * p.R_gas * p.T_inf * mass / (4.0 * std::numbers::pi);
}

/// Residual of the cubic relative to its largest monomial.
inline double equilibrium_cubic_relative_residual(double R, double mass, const PhysicalParams& p) {
    const double m1 = p.p_inf * R * R * R;
    const double m2 = 2.0 * p.sigma * R * R;
    const double m3 = 3.0 * p.R_gas * p.T_inf * mass / (4.0 * std::numbers::pi);
    const double scale = std::max({m1, m2, m3});
    return std::abs(equilibrium_cubic(R, mass, p)) / scale;
}

/// Unique positive root of the equilibrium cubic. The cubic is strictly
/// increasing on (0, inf), so bisection on a guaranteed bracket followed by a
/// Newton polish is sufficient.
inline double solve_equilibrium_radius(double mass, const PhysicalParams& params) {
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw Error(ErrorCode::NoPositiveRoot, "bubble mass must be positive, got " + std::to_string(mass));
    }
    const PhysicalParams p = validate_params(params);
    if (p.sigma == 0.0) throw Error(ErrorCode::SigmaZero, "equilibrium requires nonzero surface tension");

    const double K = 3.0 * p.R_gas * p.T_inf * mass / (4.0 * std::numbers::pi);
    double lo = 0.0;
    double hi = std::max(1.0, 2.0 * std::cbrt(K / p.p_inf));
    if (equilibrium_cubic(hi, mass, p) <= 0.0) {
        throw Error(ErrorCode::NoPositiveRoot, "cubic bracket failed");
    }

    for (int it = 0; it < 400 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (equilibrium_cubic(mid, mass, p) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    double R = 0.5 * (lo + hi);
    const double slope = 3.0 * p.p_inf * R * R + 4.0 * p.sigma * R;
    if (slope > 0.0) {
        const double polished = R - equilibrium_cubic(R, mass, p) / slope;
        if (polished > 0.0 &&
            std::abs(equilibrium_cubic(polished, mass, p)) <= std::abs(equilibrium_cubic(R, mass, p))) {
            R = polished;
        }
    }
    if (!(R > 0.0) || equilibrium_cubic_relative_residual(R, mass, p) > 1e-12) {
        throw Error(ErrorCode::ConvergenceFailure, "equilibrium radius did not converge");
    }
    return R;
}

inline EquilibriumState equilibrium_from_mass(double mass, const PhysicalParams& params) {
    EquilibriumState eq;
    eq.R_star = solve_equilibrium_radius(mass, params);
    eq.p_star = params.p_inf + 2.0 * params.sigma / eq.R_star;
    eq.rho_star = eq.p_star / (params.R_gas * params.T_inf);
    eq.mass = mass;
    return eq;
}

/// Mass of a uniform-density ball; inverse of equilibrium_from_mass.
inline double mass_of(const EquilibriumState& eq) {
    return 4.0 * std::numbers::pi / 3.0 * eq.R_star * eq.R_star * eq.R_star * eq.rho_star;
}

/// Mass whose equilibrium has radius R (forward substitution through the cubic).
inline double mass_for_radius(double R, const PhysicalParams& p) {
    return 4.0 * std::numbers::pi * (p.p_inf * R * R * R + 2.0 * p.sigma * R * R) / (3.0 * p.R_gas * p.T_inf);
}

/// Gas diffusivity on the unit ball, kappa_g / (gamma c_v rho_star R_star^2).
inline double thermal_diffusivity(const PhysicalParams& p, const EquilibriumState& eq) {
    return p.kappa_g / (p.gamma * p.c_v * eq.rho_star * eq.R_star * eq.R_star);
}

}  // namespace bubble
