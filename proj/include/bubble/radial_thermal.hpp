#pragma once

/**
 * @file radial_thermal.hpp
 * @brief Coupled monopole system: radial gas density f(r, t), monopole
 * amplitude a(t) and its rate.
 *
 *   d_t f(r) = kbar Lap_r f(r) + (1/gamma) d_t f(1)          0 <= r <= 1
 *   int_{B_1} f dy = -4 pi (rho_star / R_star) a
 *   f(1) = (1 / (R_gas T_inf)) (-(2 sigma / R^2) a + rho_l R a_ddot)
 *
 * The nonlocal rate d_t f(1) is closed with the time derivative of the mass
 * relation, which makes the mass functional an exact invariant of the
 * semi-discrete system; a_ddot follows algebraically from the boundary value.
 * State vector layout: (f_0 .. f_{n-1}, a, a_dot).
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bubble/error.hpp"
#include "bubble/params.hpp"
#include "bubble/radial_grid.hpp"
#include "bubble/shape_dynamics.hpp"

namespace bubble {

struct MonopoleSystemState {
    RadialField f;
    double a = 0.0;
    double a_dot = 0.0;
    double t = 0.0;
};

/// a_ddot from the boundary density relation.
inline double invert_interface(double f_boundary, double a, const PhysicalParams& p, const EquilibriumState& eq) {
    return (p.R_gas * p.T_inf * f_boundary + 2.0 * p.sigma / (eq.R_star * eq.R_star) * a) / (p.rho_l * eq.R_star);
}

/// Boundary density implied by (a, a_ddot); forward form of invert_interface.
inline double interface_density(double a, double a_ddot, const PhysicalParams& p, const EquilibriumState& eq) {
    return (-2.0 * p.sigma / (eq.R_star * eq.R_star) * a + p.rho_l * eq.R_star * a_ddot) / (p.R_gas * p.T_inf);
}

inline double mass_functional_coefficient(const EquilibriumState& eq) {
    return 4.0 * std::numbers::pi * eq.rho_star / eq.R_star;
}

/// int f dy + 4 pi (rho_star / R_star) a; zero for admissible data.
inline double mass_residual(const MonopoleSystemState& s, const EquilibriumState& eq) {
    return integrate(s.f) + mass_functional_coefficient(eq) * s.a;
}

inline GasPressurePerturbation gas_pressure(const MonopoleSystemState& s, const PhysicalParams& p) {
    return GasPressurePerturbation::from_boundary_density(s.f.at_boundary(), p);
}

/// sqrt(||f||^2_{L2(B_1)} + a^2 + a_dot^2).
inline double state_norm(const MonopoleSystemState& s) {
    const double fn = l2_norm(s.f);
    return std::sqrt(fn * fn + s.a * s.a + s.a_dot * s.a_dot);
}

struct AdmissibleProjection {
    MonopoleSystemState state;
    double defect = 0.0;  ///< mass residual before projection
};

/// Removes the constant profile that carries the mass defect.
inline AdmissibleProjection project_admissible(const MonopoleSystemState& s, const EquilibriumState& eq) {
    AdmissibleProjection out{s, mass_residual(s, eq)};
    const double shift = out.defect / (4.0 * std::numbers::pi / 3.0);
    for (double& v : out.state.f.values) v -= shift;
    return out;
}

class MonopoleOperator {
  public:
    MonopoleOperator(std::shared_ptr<const RadialGrid> grid, Eigen::MatrixXd matrix, Eigen::VectorXd mass,
                     double kappa_bar)
        : grid_(std::move(grid)), matrix_(std::move(matrix)), mass_(std::move(mass)), kappa_bar_(kappa_bar) {}

    const std::shared_ptr<const RadialGrid>& grid() const { return grid_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    /// Left null vector: mass_functional() . matrix() == 0.
    const Eigen::VectorXd& mass_functional() const { return mass_; }
    double kappa_bar() const { return kappa_bar_; }
    int size() const { return int(matrix_.rows()); }
    int index_a() const { return grid_->n(); }
    int index_a_dot() const { return grid_->n() + 1; }

    Eigen::VectorXd to_vector(const MonopoleSystemState& s) const {
        Eigen::VectorXd x(size());
        for (int i = 0; i < grid_->n(); ++i) x[i] = s.f.values[i];
        x[index_a()] = s.a;
        x[index_a_dot()] = s.a_dot;
        return x;
    }

    MonopoleSystemState from_vector(const Eigen::VectorXd& x, double t) const {
        MonopoleSystemState s{RadialField{grid_, std::vector<double>(grid_->n())}, x[index_a()], x[index_a_dot()], t};
        for (int i = 0; i < grid_->n(); ++i) s.f.values[i] = x[i];
        return s;
    }

  private:
    std::shared_ptr<const RadialGrid> grid_;
    Eigen::MatrixXd matrix_;
    Eigen::VectorXd mass_;
    double kappa_bar_;
};

/// Dense matrix A with d/dt (f, a, a_dot) = A (f, a, a_dot).
inline MonopoleOperator assemble_monopole_operator(std::shared_ptr<const RadialGrid> grid, const PhysicalParams& p,
                                                   const EquilibriumState& eq) {
    const int n = grid->n();
    if (n < 10) throw Error(ErrorCode::GridTooCoarse, "monopole operator needs n >= 10");
    const int N = n + 2;
    const int ia = n;
    const int iad = n + 1;
    const double kbar = thermal_diffusivity(p, eq);
    const auto& w = grid->weights();

    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n - 1, n);
    for (int i = 0; i < n - 1; ++i) {
        const auto c = detail::fv_laplacian_row(*grid, i);
        if (i > 0) lap(i, i - 1) = c[0];
        lap(i, i) = c[1];
        lap(i, i + 1) = c[2];
    }

    // d_t f(1) from d/dt [sum_i w_i f_i + 4 pi (rho*/R*) a] = 0, with every
    // interior node moving by kbar Lap f + d_t f(1) / gamma.
    double w_interior = 0.0;
    for (int i = 0; i < n - 1; ++i) w_interior += w[i];
    const double denom = w_interior / p.gamma + w[n - 1];
    Eigen::RowVectorXd boundary_rate = Eigen::RowVectorXd::Zero(N);
    for (int i = 0; i < n - 1; ++i) boundary_rate.head(n) -= kbar * w[i] * lap.row(i);
    boundary_rate[iad] = -mass_functional_coefficient(eq);
    boundary_rate /= denom;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < n - 1; ++i) {
        A.row(i).head(n) = kbar * lap.row(i);
        A.row(i) += boundary_rate / p.gamma;
    }
    A.row(n - 1) = boundary_rate;
    A(ia, iad) = 1.0;
    A(iad, n - 1) = p.R_gas * p.T_inf / (p.rho_l * eq.R_star);
    A(iad, ia) = 2.0 * p.sigma / (p.rho_l * eq.R_star * eq.R_star * eq.R_star);

    Eigen::VectorXd mass = Eigen::VectorXd::Zero(N);
    for (int i = 0; i < n; ++i) mass[i] = w[i];
    mass[ia] = mass_functional_coefficient(eq);
    return MonopoleOperator(grid, std::move(A), std::move(mass), kbar);
}

/// Orthonormal basis of the admissible subspace {x : mass . x = 0}.
inline Eigen::MatrixXd admissible_basis(const MonopoleOperator& op) {
    const int N = op.size();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(op.mass_functional());
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, N);
    return Q.rightCols(N - 1);
}

/// Eigenvalues of the operator restricted to the admissible subspace, sorted
/// by decreasing real part.
inline std::vector<cplx> admissible_spectrum(const MonopoleOperator& op) {
    const Eigen::MatrixXd Q = admissible_basis(op);
    const Eigen::MatrixXd restricted = Q.transpose() * op.matrix() * Q;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(restricted, false);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "eigen solve failed");
    std::vector<cplx> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return ev;
}

inline double spectral_abscissa(const MonopoleOperator& op) { return admissible_spectrum(op).front().real(); }

/// Implicit trapezoidal stepping with the propagator factored once per dt.
class MonopoleStepper {
  public:
    MonopoleStepper(MonopoleOperator op, double dt) : op_(std::move(op)), dt_(dt) {
        if (!(dt > 0.0)) throw Error(ErrorCode::ConfigInvalid, "dt must be positive");
        const int N = op_.size();
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(I - 0.5 * dt * op_.matrix());
        if (!lu.isInvertible()) throw Error(ErrorCode::LinearSolveFailure, "I - dt/2 A is singular");
        propagator_ = lu.solve(I + 0.5 * dt * op_.matrix());
    }

    const MonopoleOperator& op() const { return op_; }
    double dt() const { return dt_; }

    MonopoleSystemState step(const MonopoleSystemState& s) const {
        const Eigen::VectorXd x = op_.to_vector(s);
        const Eigen::VectorXd y = propagator_ * x;
        const double before = x.norm();
        if (!y.allFinite() || (before > 0.0 && y.norm() > 10.0 * before)) {
            throw Error(ErrorCode::StabilityViolation, "state norm grew more than 10x in one step");
        }
        return op_.from_vector(y, s.t + dt_);
    }

  private:
    MonopoleOperator op_;
    double dt_;
    Eigen::MatrixXd propagator_;
};

/// One step of the closed monopole system. Assembles and factors the operator;
/// use MonopoleStepper for repeated steps.
inline MonopoleSystemState step_monopole(const MonopoleSystemState& s, const PhysicalParams& p,
                                         const EquilibriumState& eq, double dt) {
    return MonopoleStepper(assemble_monopole_operator(s.f.grid, p, eq), dt).step(s);
}

/// a_ddot implied by the current boundary density.
inline double monopole_acceleration(const MonopoleSystemState& s, const PhysicalParams& p,
                                    const EquilibriumState& eq) {
    return invert_interface(s.f.at_boundary(), s.a, p, eq);
}

struct DecayFit {
    double rate = 0.0;       ///< fitted slope of log ||x|| (negative when decaying)
    double intercept = 0.0;
    bool decaying = false;
    double efolds = 0.0;     ///< log drop across the whole series
};

/// Least-squares slope of log(norm) over the tail half of the series.
inline DecayFit measure_decay_rate(std::span<const double> times, std::span<const double> norms) {
    if (times.size() != norms.size()) throw Error(ErrorCode::ConfigInvalid, "series length mismatch");
    if (times.size() < 50) throw Error(ErrorCode::SeriesTooShort, std::to_string(times.size()) + " samples < 50");
    DecayFit fit;
    if (std::all_of(norms.begin(), norms.end(), [](double v) { return v == 0.0; })) return fit;
    if (std::any_of(norms.begin(), norms.end(), [](double v) { return !(v > 0.0); })) {
        throw Error(ErrorCode::NotDecaying, "series reaches zero or negative values");
    }
    const std::size_t start = times.size() / 2;
    const double count = double(times.size() - start);
    double st = 0.0, sy = 0.0;
    for (std::size_t i = start; i < times.size(); ++i) {
        st += times[i];
        sy += std::log(norms[i]);
    }
    const double mt = st / count;
    const double my = sy / count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < times.size(); ++i) {
        sxx += (times[i] - mt) * (times[i] - mt);
        sxy += (times[i] - mt) * (std::log(norms[i]) - my);
    }
    fit.rate = sxy / sxx;
    fit.intercept = my - fit.rate * mt;
    fit.efolds = std::log(norms.front()) - std::log(norms.back());
    constexpr double kFlat = 1e-10;
    if (fit.rate > kFlat) throw Error(ErrorCode::NotDecaying, "fitted slope " + std::to_string(fit.rate) + " > 0");
    if (fit.rate >= -kFlat) {
        fit.rate = 0.0;
        return fit;
    }
    fit.decaying = true;
    return fit;
}

}  // namespace bubble
