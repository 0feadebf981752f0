#pragma once

/**
 * @file gas_interior.hpp
 * @brief Per-mode interior gas problems on the unit ball.
 *
 * Shape-mode density: d_t rho = kbar Lap_l rho, rho(1, t) = 0, expanded in the
 * Dirichlet eigenbasis phi_n(r) = norm_n j_l(z_n r), so that
 * rho(r, t) = sum_n c_n exp(-kbar z_n^2 t) phi_n(r).
 *
 * Gas potential: -Lap_l Psi = source, Psi'(1) = a_dot, regular at r = 0. For
 * l = 0 the Neumann problem needs int_{B_1} source dy = -4 pi a_dot and the
 * additive constant is fixed by a zero volume mean.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "bubble/bessel.hpp"
#include "bubble/error.hpp"
#include "bubble/harmonics.hpp"
#include "bubble/params.hpp"
#include "bubble/quadrature.hpp"
#include "bubble/radial_grid.hpp"
#include "bubble/radial_thermal.hpp"
#include "bubble/shape_dynamics.hpp"

namespace bubble {

/// Shared immutable eigenbasis per (l, count).
inline std::shared_ptr<const BesselEigenbasis> eigenbasis(int ell, int count) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const BesselEigenbasis>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{ell, count}];
    if (!slot) slot = std::make_shared<const BesselEigenbasis>(ell, count);
    return slot;
}

namespace detail {

/// Composite Gauss-Legendre rule on [0, 1]; resolves integrands oscillating
/// up to the highest eigenfunction used by default.
inline const GaussLegendreRule& unit_interval_rule() {
    static const GaussLegendreRule rule = [] {
        constexpr int panels = 96;
        constexpr int order = 12;
        const GaussLegendreRule ref = gauss_legendre(order);
        GaussLegendreRule out;
        for (int p = 0; p < panels; ++p) {
            const double a = double(p) / panels;
            const double half = 0.5 / panels;
            for (int k = 0; k < order; ++k) {
                out.nodes.push_back(a + half * (ref.nodes[k] + 1.0));
                out.weights.push_back(half * ref.weights[k]);
            }
        }
        return out;
    }();
    return rule;
}

/// Cubic B-spline interpolant of a field sampled on its uniform grid.
inline std::function<double(double)> interpolant(const RadialField& field) {
    if (field.grid->n() < 5) throw Error(ErrorCode::GridTooCoarse, "interpolation needs at least 5 radial nodes");
    auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        field.values.begin(), field.values.end(), 0.0, field.grid->h());
    return [spline](double r) { return (*spline)(std::clamp(r, 0.0, 1.0)); };
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dirichlet heat modes

struct HeatModeSolution {
    int ell = 0;
    int m = 0;
    double kappa_bar = 0.0;
    std::shared_ptr<const BesselEigenbasis> basis;
    std::vector<double> coefficients;  ///< against the normalized phi_n
    double tail_energy = 0.0;          ///< fraction of the initial L2 energy outside the expansion

    double evaluate(double r, double t) const {
        double s = 0.0;
        for (int n = 0; n < basis->size(); ++n) {
            if (coefficients[n] == 0.0) continue;
            s += coefficients[n] * std::exp(-kappa_bar * basis->zeros[n] * basis->zeros[n] * t) * basis->value(n, r);
        }
        return s;
    }

    /// Time derivative taken on the expansion: each coefficient gains -kbar z_n^2.
    double evaluate_dt(double r, double t) const {
        double s = 0.0;
        for (int n = 0; n < basis->size(); ++n) {
            if (coefficients[n] == 0.0) continue;
            const double rate = kappa_bar * basis->zeros[n] * basis->zeros[n];
            s -= rate * coefficients[n] * std::exp(-rate * t) * basis->value(n, r);
        }
        return s;
    }

    double evaluate_dr(double r, double t) const {
        double s = 0.0;
        for (int n = 0; n < basis->size(); ++n) {
            if (coefficients[n] == 0.0) continue;
            s += coefficients[n] * std::exp(-kappa_bar * basis->zeros[n] * basis->zeros[n] * t) *
                 basis->derivative(n, r);
        }
        return s;
    }

    double slowest_rate() const { return kappa_bar * basis->zeros.front() * basis->zeros.front(); }

    bool is_zero() const {
        return std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; });
    }

    RadialField sample(std::shared_ptr<const RadialGrid> grid, double t) const {
        return bubble::sample(grid, [&](double r) { return evaluate(r, t); });
    }
};

inline constexpr double kBoundaryTolerance = 1e-10;
inline constexpr double kTailEnergyTolerance = 1e-8;

/// Expands a radial profile with rho(1) = 0 in the Dirichlet eigenbasis.
inline HeatModeSolution solve_heat_mode(const std::function<double(double)>& initial, int ell, int m,
                                        double kappa_bar, int n_terms = 32) {
    check_index({ell, m});
    if (n_terms < 1) throw Error(ErrorCode::ConfigInvalid, "n_terms must be >= 1");
    if (!(kappa_bar >= 0.0)) throw Error(ErrorCode::NonPositive, "kappa_bar must be >= 0");
    const GaussLegendreRule& rule = detail::unit_interval_rule();
    std::vector<double> f(rule.nodes.size());
    double energy = 0.0;
    double sup = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = initial(rule.nodes[k]);
        energy += rule.weights[k] * f[k] * f[k] * rule.nodes[k] * rule.nodes[k];
        sup = std::max(sup, std::abs(f[k]));
    }
    const double f1 = initial(1.0);
    if (std::abs(f1) > kBoundaryTolerance * std::max(1.0, sup)) {
        throw Error(ErrorCode::BoundaryNonzero, "initial profile has value " + std::to_string(f1) + " at r = 1");
    }
    HeatModeSolution sol{ell, m, kappa_bar, eigenbasis(ell, n_terms), std::vector<double>(n_terms, 0.0), 0.0};
    if (energy == 0.0) return sol;
    double captured = 0.0;
    for (int n = 0; n < n_terms; ++n) {
        double c = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const double r = rule.nodes[k];
            c += rule.weights[k] * f[k] * sol.basis->value(n, r) * r * r;
        }
        sol.coefficients[n] = c;
        captured += c * c;
    }
    sol.tail_energy = std::max(0.0, energy - captured) / energy;
    if (sol.tail_energy > kTailEnergyTolerance) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "tail energy fraction %.3e with %d terms", sol.tail_energy, n_terms);
        throw Error(ErrorCode::TruncationInsufficient, buf);
    }
    return sol;
}

inline HeatModeSolution solve_heat_mode(const RadialField& initial, int ell, int m, double kappa_bar,
                                        int n_terms = 32) {
    const double sup = std::transform_reduce(initial.values.begin(), initial.values.end(), 0.0,
                                             [](double x, double y) { return std::max(x, y); },
                                             [](double v) { return std::abs(v); });
    if (std::abs(initial.at_boundary()) > kBoundaryTolerance * std::max(1.0, sup)) {
        throw Error(ErrorCode::BoundaryNonzero,
                    "initial profile has value " + std::to_string(initial.at_boundary()) + " at r = 1");
    }
    return solve_heat_mode(detail::interpolant(initial), ell, m, kappa_bar, n_terms);
}

/// Boundary flux of the temperature mode T = -(T_inf / rho_star) rho Y_l^m:
/// the surface integral of d_r T over the unit sphere.
inline double temperature_flux(const HeatModeSolution& sol, double t, const PhysicalParams& p,
                               const EquilibriumState& eq) {
    const auto grid = SphereGrid::for_band_limit(sol.ell);
    cplx surface{0.0, 0.0};
    for (int i = 0; i < grid->n_theta(); ++i) {
        for (int j = 0; j < grid->n_phi(); ++j) {
            surface += grid->weight(i, j) * eval_Y({sol.ell, sol.m}, grid->theta(i), grid->phi(j));
        }
    }
    const double dr = sol.is_zero() ? 0.0 : sol.evaluate_dr(1.0, t);
    return std::real(-(p.T_inf / eq.rho_star) * dr * surface);
}

/// Same flux for the monopole density profile.
inline double temperature_flux(const MonopoleSystemState& s, const PhysicalParams& p, const EquilibriumState& eq) {
    return -(p.T_inf / eq.rho_star) * boundary_derivative(s.f) * 2.0 * std::sqrt(std::numbers::pi);
}

struct DecayCertificate {
    std::vector<double> times;
    std::vector<double> sup_norms;
    double fitted_rate = 0.0;   ///< -slope of log sup-norm over the tail samples
    double slowest_rate = 0.0;  ///< kbar z_{l,1}^2
    double tolerance = 0.01;    ///< relative
    bool monotone = true;
    bool certified = false;
};

/// Certifies that max_r |rho(r, t)| decays at least at the slowest eigen-rate.
inline DecayCertificate uniform_decay_certificate(const HeatModeSolution& sol, std::span<const double> times,
                                                  double tolerance = 0.01) {
    DecayCertificate cert;
    cert.times.assign(times.begin(), times.end());
    cert.slowest_rate = sol.slowest_rate();
    cert.tolerance = tolerance;
    if (sol.is_zero()) {
        cert.sup_norms.assign(times.size(), 0.0);
        cert.certified = true;
        return cert;
    }
    if (times.size() < 3) throw Error(ErrorCode::SeriesTooShort, "decay certificate needs >= 3 times");
    if (cert.slowest_rate * (times.back() - times.front()) < 2.0) {
        throw Error(ErrorCode::SeriesTooShort, "times span fewer than 2 e-folds of the slowest mode");
    }
    constexpr int samples = 401;
    for (double t : times) {
        double sup = 0.0;
        for (int i = 0; i < samples; ++i) sup = std::max(sup, std::abs(sol.evaluate(double(i) / (samples - 1), t)));
        cert.sup_norms.push_back(sup);
    }
    for (std::size_t k = 1; k < cert.sup_norms.size(); ++k) {
        if (cert.sup_norms[k] > cert.sup_norms[k - 1] * (1.0 + 1e-12)) cert.monotone = false;
    }
    const std::size_t start = std::min(times.size() / 2, times.size() - 2);
    const double count = double(times.size() - start);
    double mt = 0.0, my = 0.0;
    for (std::size_t k = start; k < times.size(); ++k) {
        mt += times[k] / count;
        my += std::log(cert.sup_norms[k]) / count;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = start; k < times.size(); ++k) {
        sxx += (times[k] - mt) * (times[k] - mt);
        sxy += (times[k] - mt) * (std::log(cert.sup_norms[k]) - my);
    }
    cert.fitted_rate = -sxy / sxx;
    if (!(cert.fitted_rate > 0.0)) {
        throw Error(ErrorCode::NotDecaying, "sup-norm fitted rate " + std::to_string(cert.fitted_rate));
    }
    cert.certified = cert.monotone && cert.fitted_rate >= cert.slowest_rate * (1.0 - tolerance);
    return cert;
}

// ---------------------------------------------------------------------------
// Neumann problem for the gas potential

inline constexpr double kCompatibilityTolerance = 1e-8;

/// int_{B_1} source dy + 4 pi a_dot, using the grid volume weights.
inline double neumann_compatibility_residual(const RadialField& source, double a_dot) {
    return integrate(source) + 4.0 * std::numbers::pi * a_dot;
}

namespace detail {

inline void remove_volume_mean(RadialField& psi) {
    const double mean = integrate(psi) / (4.0 * std::numbers::pi / 3.0);
    for (double& v : psi.values) v -= mean;
}

inline void check_compatibility(const RadialField& source, int ell, double a_dot) {
    if (ell != 0) return;
    const double res = neumann_compatibility_residual(source, a_dot);
    if (std::abs(res) > kCompatibilityTolerance) {
        throw Error(ErrorCode::CompatibilityViolated,
                    "int source dy + 4 pi a_dot = " + std::to_string(res) + " exceeds tolerance");
    }
}

}  // namespace detail

/// Radial potential Psi with -(1/r^2)(r^2 Psi')' + l(l+1) Psi / r^2 = source,
/// Psi'(1) = a_dot. Built from the free-space radial Green's function
/// r_<^l / ((2l+1) r_>^{l+1}) plus the regular homogeneous solution A r^l.
inline RadialField solve_gas_potential(const RadialField& source, int ell, double a_dot) {
    if (ell < 0) throw Error(ErrorCode::IndexInvalid, "ell must be >= 0");
    detail::check_compatibility(source, ell, a_dot);
    const RadialGrid& g = *source.grid;
    const int n = g.n();
    RadialField psi{source.grid, std::vector<double>(n, 0.0)};
    const bool zero_source = std::all_of(source.values.begin(), source.values.end(), [](double v) { return v == 0.0; });

    // inner[i] = int_0^{r_i} rho^{l+2} s, outer[i] = int_{r_i}^1 rho^{1-l} s
    std::vector<double> inner(n, 0.0), outer(n, 0.0);
    if (!zero_source) {
        const auto s = detail::interpolant(source);
        const GaussLegendreRule ref = gauss_legendre(8);
        std::vector<double> cell_in(n - 1, 0.0), cell_out(n - 1, 0.0);
        for (int i = 0; i < n - 1; ++i) {
            const double a = g.node(i);
            const double b = g.node(i + 1);
            for (int k = 0; k < 8; ++k) {
                const double r = 0.5 * (a + b) + 0.5 * (b - a) * ref.nodes[k];
                const double w = 0.5 * (b - a) * ref.weights[k];
                const double sv = s(r);
                cell_in[i] += w * std::pow(r, ell + 2) * sv;
                cell_out[i] += w * std::pow(r, 1 - ell) * sv;
            }
        }
        for (int i = 1; i < n; ++i) inner[i] = inner[i - 1] + cell_in[i - 1];
        for (int i = n - 2; i >= 0; --i) outer[i] = outer[i + 1] + cell_out[i];
    }
    const double I = inner[n - 1];
    const double inv = 1.0 / (2.0 * ell + 1.0);
    if (ell == 0) {
        for (int i = 0; i < n; ++i) {
            const double r = g.node(i);
            psi.values[i] = (i == 0 ? 0.0 : inner[i] / r) + outer[i];
        }
        detail::remove_volume_mean(psi);
        return psi;
    }
    const double A = (a_dot + (ell + 1.0) * inv * I) / ell;
    for (int i = 1; i < n; ++i) {
        const double r = g.node(i);
        psi.values[i] = inv * (inner[i] / std::pow(r, ell + 1) + std::pow(r, ell) * outer[i]) + A * std::pow(r, ell);
    }
    return psi;
}

/// Reference path: conservative finite-volume discretization of the same
/// Neumann problem solved with a dense LU. Second-order; for l = 0 the gauge
/// enters as a bordered constraint.
inline RadialField solve_gas_potential_fv(const RadialField& source, int ell, double a_dot) {
    if (ell < 0) throw Error(ErrorCode::IndexInvalid, "ell must be >= 0");
    detail::check_compatibility(source, ell, a_dot);
    const RadialGrid& g = *source.grid;
    const int n = g.n();
    const int N = ell == 0 ? n + 1 : n;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
    const double cf = double(ell) * (ell + 1);
    for (int i = 0; i < n - 1; ++i) {
        if (ell > 0 && i == 0) {
            M(0, 0) = 1.0;
            continue;
        }
        const auto c = detail::fv_laplacian_row(g, i);
        if (i > 0) M(i, i - 1) = -c[0];
        M(i, i) = -c[1] + (i > 0 ? cf / (g.node(i) * g.node(i)) : 0.0);
        M(i, i + 1) = -c[2];
        rhs[i] = source.values[i];
    }
    {
        const int i = n - 1;
        const double lo = g.face_lo(i);
        const double vol = (1.0 - lo * lo * lo) / 3.0;
        const double cm = lo * lo / g.h() / vol;
        M(i, i - 1) = -cm;
        M(i, i) = cm + cf;
        rhs[i] = source.values[i] + a_dot / vol;
    }
    if (ell == 0) {
        // Lagrange multiplier row/column enforcing zero volume mean
        for (int i = 0; i < n; ++i) {
            M(n, i) = g.weights()[i];
            M(i, n) = 1.0;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw Error(ErrorCode::LinearSolveFailure, "Neumann system is singular");
    const Eigen::VectorXd x = lu.solve(rhs);
    RadialField psi{source.grid, std::vector<double>(n)};
    for (int i = 0; i < n; ++i) psi.values[i] = x[i];
    return psi;
}

/// Source (R_star / rho_star) d_t rho_l^m of the gas potential, sampled on grid.
inline RadialField gas_potential_source(const HeatModeSolution& sol, double t, const EquilibriumState& eq,
                                        std::shared_ptr<const RadialGrid> grid) {
    const double scale = eq.R_star / eq.rho_star;
    return sample(grid, [&](double r) { return scale * sol.evaluate_dt(r, t); });
}

/// Real and imaginary radial parts of a complex mode potential.
struct ModePotential {
    RadialField re;
    RadialField im;
};

/// Gas potential of shape mode (l, m) at time t: interior source from the
/// heat solution and Neumann datum from the inviscid interface motion.
inline ModePotential shape_mode_gas_potential(const HeatModeSolution& sol, const ModeState& mode0,
                                              const PhysicalParams& p, const EquilibriumState& eq,
                                              std::shared_ptr<const RadialGrid> grid, double t) {
    const ModeState mode = analytic_shape_solution(mode0, p, eq, t);
    const RadialField src = gas_potential_source(sol, t, eq, grid);
    const RadialField zero{grid, std::vector<double>(grid->n(), 0.0)};
    return {solve_gas_potential(src, sol.ell, mode.a_dot.real()),
            solve_gas_potential(zero, sol.ell, mode.a_dot.imag())};
}

struct PeriodicityReport {
    double period = 0.0;
    double early_defect = 0.0;  ///< ||Psi(T + T) - Psi(T)||
    double late_defect = 0.0;   ///< ||Psi(10T + T) - Psi(10T)||
    double damping_product = 0.0;  ///< kbar z_{l,1}^2 T
    bool applicable = false;
    bool passed = false;
};

/// Asymptotic periodicity of the gas potential with the Lamb period: the
/// defect at t = 10T must be at most 10% of the defect at t = T whenever
/// kbar z_{l,1}^2 T >= 1.
inline PeriodicityReport gas_potential_periodicity(const HeatModeSolution& sol, const ModeState& mode0,
                                                   const PhysicalParams& p, const EquilibriumState& eq,
                                                   std::shared_ptr<const RadialGrid> grid) {
    PeriodicityReport rep;
    rep.period = 2.0 * std::numbers::pi / lamb_frequency(sol.ell, p, eq);
    rep.damping_product = sol.slowest_rate() * rep.period;
    rep.applicable = rep.damping_product >= 1.0;
    auto defect = [&](double t) {
        const ModePotential a = shape_mode_gas_potential(sol, mode0, p, eq, grid, t);
        const ModePotential b = shape_mode_gas_potential(sol, mode0, p, eq, grid, t + rep.period);
        RadialField dre{grid, std::vector<double>(grid->n())};
        RadialField dim{grid, std::vector<double>(grid->n())};
        for (int i = 0; i < grid->n(); ++i) {
            dre.values[i] = b.re.values[i] - a.re.values[i];
            dim.values[i] = b.im.values[i] - a.im.values[i];
        }
        return std::hypot(l2_norm(dre), l2_norm(dim));
    };
    rep.early_defect = defect(rep.period);
    rep.late_defect = defect(10.0 * rep.period);
    rep.passed = !rep.applicable || rep.late_defect <= 0.1 * rep.early_defect;
    return rep;
}

}  // namespace bubble
