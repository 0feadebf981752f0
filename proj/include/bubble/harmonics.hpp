#pragma once

/**
 * @file harmonics.hpp
 * @brief Orthonormal complex spherical harmonics (Condon-Shortley phase),
 * product quadrature on the sphere, projection/synthesis, and the exterior
 * multipole potential sum_l sum_m b_l^m r^{-(l+1)} Y_l^m.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <compare>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "bubble/error.hpp"
#include "bubble/quadrature.hpp"

namespace bubble {

using cplx = std::complex<double>;

struct ModeIndex {
    int ell = 0;
    int m = 0;

    auto operator<=>(const ModeIndex&) const = default;
};

inline bool is_valid(ModeIndex idx) { return idx.ell >= 0 && std::abs(idx.m) <= idx.ell; }

inline void check_index(ModeIndex idx) {
    if (!is_valid(idx)) {
        throw Error(ErrorCode::IndexInvalid,
                    "(l, m) = (" + std::to_string(idx.ell) + ", " + std::to_string(idx.m) + ")");
    }
}

inline std::string to_string(ModeIndex idx) {
    return "(" + std::to_string(idx.ell) + "," + std::to_string(idx.m) + ")";
}

/// Fully normalized associated Legendre values N_l^m P_l^m(cos theta), m >= 0,
/// with the Condon-Shortley phase folded in, so that
/// Y_l^m = value(l, m) * exp(i m phi).
class LegendreTable {
  public:
    LegendreTable(int lmax, double theta) : lmax_(lmax), values_((lmax + 1) * (lmax + 2) / 2, 0.0) {
        const double x = std::cos(theta);
        const double s = std::sin(theta);
        double pmm = 1.0 / (2.0 * std::sqrt(std::numbers::pi));
        for (int m = 0; m <= lmax; ++m) {
            if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
            at(m, m) = pmm;
            if (m + 1 <= lmax) at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * pmm;
            for (int l = m + 2; l <= lmax; ++l) {
                const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
                const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
                at(l, m) = a * (x * at(l - 1, m) - b * at(l - 2, m));
            }
        }
    }

    int lmax() const { return lmax_; }

    double operator()(int l, int m) const { return values_[offset(l, m)]; }

    /// Y_l^m(theta, phi) for any |m| <= l.
    cplx ylm(int l, int m, double phi) const {
        if (l > lmax_ || std::abs(m) > l) return {0.0, 0.0};
        const int am = std::abs(m);
        const double p = (*this)(l, am);
        const cplx e = std::polar(1.0, am * phi);
        if (m >= 0) return p * e;
        return ((am % 2 == 0) ? 1.0 : -1.0) * p * std::conj(e);
    }

    /// d/dtheta Y_l^m via the ladder identity
    /// 2 dY/dtheta = c+ e^{-i phi} Y_l^{m+1} - c- e^{i phi} Y_l^{m-1}, regular at the poles.
    cplx ylm_dtheta(int l, int m, double phi) const {
        const double cp = std::sqrt(double(l - m) * (l + m + 1));
        const double cm = std::sqrt(double(l + m) * (l - m + 1));
        cplx out{0.0, 0.0};
        if (m + 1 <= l) out += cp * std::polar(1.0, -phi) * ylm(l, m + 1, phi);
        if (m - 1 >= -l) out -= cm * std::polar(1.0, phi) * ylm(l, m - 1, phi);
        return 0.5 * out;
    }

  private:
    static int offset(int l, int m) { return l * (l + 1) / 2 + m; }
    double& at(int l, int m) { return values_[offset(l, m)]; }

    int lmax_;
    std::vector<double> values_;
};

inline cplx eval_Y(ModeIndex idx, double theta, double phi) {
    check_index(idx);
    return LegendreTable(idx.ell + 1, theta).ylm(idx.ell, idx.m, phi);
}

inline cplx eval_Y_dtheta(ModeIndex idx, double theta, double phi) {
    check_index(idx);
    return LegendreTable(idx.ell + 1, theta).ylm_dtheta(idx.ell, idx.m, phi);
}

/// Gauss-Legendre in cos(theta) times uniform in phi. Weights sum to 4 pi.
class SphereGrid {
  public:
    SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
        if (n_theta < 1 || n_phi < 1) throw Error(ErrorCode::GridTooCoarse, "empty sphere grid");
        const GaussLegendreRule rule = gauss_legendre(n_theta);
        theta_.resize(n_theta);
        theta_weight_.resize(n_theta);
        for (int i = 0; i < n_theta; ++i) {
            // descending cos(theta) -> ascending theta
            theta_[i] = std::acos(rule.nodes[n_theta - 1 - i]);
            theta_weight_[i] = rule.weights[n_theta - 1 - i];
        }
        phi_.resize(n_phi);
        for (int j = 0; j < n_phi; ++j) phi_[j] = 2.0 * std::numbers::pi * j / n_phi;
    }

    /// Smallest grid that integrates products of degree-L band-limited fields exactly.
    static std::shared_ptr<const SphereGrid> for_band_limit(int L) {
        return std::make_shared<const SphereGrid>(L + 1, 2 * L + 1);
    }

    int n_theta() const { return n_theta_; }
    int n_phi() const { return n_phi_; }
    std::size_t size() const { return std::size_t(n_theta_) * n_phi_; }
    double theta(int i) const { return theta_[i]; }
    double phi(int j) const { return phi_[j]; }
    double weight(int i, int /*j*/) const { return theta_weight_[i] * 2.0 * std::numbers::pi / n_phi_; }
    std::size_t flat(int i, int j) const { return std::size_t(i) * n_phi_ + j; }

    /// Highest degree whose inner products with band-limited fields this grid resolves.
    int band_limit() const { return std::min(n_theta_ - 1, (n_phi_ - 1) / 2); }

    double total_weight() const {
        double s = 0.0;
        for (int i = 0; i < n_theta_; ++i) s += theta_weight_[i];
        return s * 2.0 * std::numbers::pi;
    }

  private:
    int n_theta_;
    int n_phi_;
    std::vector<double> theta_;
    std::vector<double> theta_weight_;
    std::vector<double> phi_;
};

struct SurfaceField {
    std::shared_ptr<const SphereGrid> grid;
    std::vector<cplx> values;  ///< row-major (theta, phi)
};

/// Sparse set of spherical-harmonic coefficients truncated at degree L_max.
class HarmonicCoefficients {
  public:
    explicit HarmonicCoefficients(int L_max = 8) : L_max_(L_max) {}

    int L_max() const { return L_max_; }

    void set(ModeIndex idx, cplx value) {
        check_index(idx);
        if (idx.ell > L_max_) {
            throw Error(ErrorCode::IndexInvalid,
                        "degree " + std::to_string(idx.ell) + " exceeds L_max " + std::to_string(L_max_));
        }
        values_[idx] = value;
    }

    cplx get(ModeIndex idx) const {
        auto it = values_.find(idx);
        return it == values_.end() ? cplx{0.0, 0.0} : it->second;
    }

    const std::map<ModeIndex, cplx>& entries() const { return values_; }

    bool all_zero() const {
        for (const auto& [idx, v] : values_) {
            if (v != cplx{0.0, 0.0}) return false;
        }
        return true;
    }

    /// Lowest degree with a nonzero coefficient, or -1.
    int lowest_degree() const {
        for (const auto& [idx, v] : values_) {
            if (v != cplx{0.0, 0.0}) return idx.ell;
        }
        return -1;
    }

    int highest_degree() const {
        int top = -1;
        for (const auto& [idx, v] : values_) {
            if (v != cplx{0.0, 0.0}) top = std::max(top, idx.ell);
        }
        return top;
    }

  private:
    int L_max_;
    std::map<ModeIndex, cplx> values_;
};

using MultipoleCoefficients = HarmonicCoefficients;

inline SurfaceField synthesize(const HarmonicCoefficients& coeffs, std::shared_ptr<const SphereGrid> grid) {
    SurfaceField field{grid, std::vector<cplx>(grid->size(), cplx{0.0, 0.0})};
    const int lmax = std::max(coeffs.highest_degree(), 0);
    for (int i = 0; i < grid->n_theta(); ++i) {
        const LegendreTable table(lmax, grid->theta(i));
        for (int j = 0; j < grid->n_phi(); ++j) {
            cplx sum{0.0, 0.0};
            for (const auto& [idx, v] : coeffs.entries()) sum += v * table.ylm(idx.ell, idx.m, grid->phi(j));
            field.values[grid->flat(i, j)] = sum;
        }
    }
    return field;
}

/// <Y_l^m, field> on the sphere, exact for band-limited fields on an adequate grid.
inline cplx project(const SurfaceField& field, ModeIndex idx) {
    check_index(idx);
    const SphereGrid& g = *field.grid;
    if (g.n_theta() < idx.ell + 1 || g.n_phi() < 2 * idx.ell + 1) {
        throw Error(ErrorCode::GridTooCoarse, "grid cannot resolve degree " + std::to_string(idx.ell));
    }
    cplx sum{0.0, 0.0};
    for (int i = 0; i < g.n_theta(); ++i) {
        const LegendreTable table(idx.ell, g.theta(i));
        for (int j = 0; j < g.n_phi(); ++j) {
            sum += g.weight(i, j) * field.values[g.flat(i, j)] * std::conj(table.ylm(idx.ell, idx.m, g.phi(j)));
        }
    }
    return sum;
}

inline HarmonicCoefficients project_all(const SurfaceField& field, int L_max) {
    const SphereGrid& g = *field.grid;
    if (g.band_limit() < L_max) {
        throw Error(ErrorCode::GridTooCoarse, "grid band limit " + std::to_string(g.band_limit()) +
                                                  " < L_max " + std::to_string(L_max));
    }
    HarmonicCoefficients out(L_max);
    std::vector<cplx> acc((L_max + 1) * (L_max + 1), cplx{0.0, 0.0});
    for (int i = 0; i < g.n_theta(); ++i) {
        const LegendreTable table(L_max, g.theta(i));
        for (int j = 0; j < g.n_phi(); ++j) {
            const cplx fw = g.weight(i, j) * field.values[g.flat(i, j)];
            for (int l = 0; l <= L_max; ++l) {
                for (int m = -l; m <= l; ++m) acc[l * l + l + m] += fw * std::conj(table.ylm(l, m, g.phi(j)));
            }
        }
    }
    for (int l = 0; l <= L_max; ++l) {
        for (int m = -l; m <= l; ++m) out.set({l, m}, acc[l * l + l + m]);
    }
    return out;
}

/// Spectral surface Laplacian: coefficient-wise multiplication by -l(l+1).
inline HarmonicCoefficients apply_surface_laplacian(const HarmonicCoefficients& coeffs) {
    HarmonicCoefficients out(coeffs.L_max());
    for (const auto& [idx, v] : coeffs.entries()) out.set(idx, -double(idx.ell) * (idx.ell + 1) * v);
    return out;
}

/// Y_l^{-m} = (-1)^m conj(Y_l^m) pairing, the condition for a real field.
inline double conjugate_symmetry_defect(const HarmonicCoefficients& coeffs) {
    double worst = 0.0;
    for (const auto& [idx, v] : coeffs.entries()) {
        const double sign = (std::abs(idx.m) % 2 == 0) ? 1.0 : -1.0;
        const cplx partner = coeffs.get({idx.ell, -idx.m});
        worst = std::max(worst, std::abs(partner - sign * std::conj(v)));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// exterior multipole field

struct SphericalGradient {
    cplx radial{0.0, 0.0};
    cplx polar{0.0, 0.0};
    cplx azimuthal{0.0, 0.0};
    bool at_pole = false;  ///< azimuthal component forced to 0

    double norm() const {
        return std::sqrt(std::norm(radial) + std::norm(polar) + std::norm(azimuthal));
    }
};

namespace detail {
inline void require_exterior(double r) {
    if (!(r >= 1.0)) throw Error(ErrorCode::RadiusInsideBubble, "r = " + std::to_string(r));
}
inline constexpr double kPoleSin = 1e-14;
}  // namespace detail

inline cplx eval_multipole_potential(const MultipoleCoefficients& coeffs, double r, double theta, double phi) {
    detail::require_exterior(r);
    const int lmax = std::max(coeffs.highest_degree(), 0);
    const LegendreTable table(lmax, theta);
    cplx sum{0.0, 0.0};
    for (const auto& [idx, b] : coeffs.entries()) {
        if (b == cplx{0.0, 0.0}) continue;
        sum += b * std::pow(r, -(idx.ell + 1)) * table.ylm(idx.ell, idx.m, phi);
    }
    return sum;
}

/// Term-wise differentiated multipole series in (r, theta, phi) components.
inline SphericalGradient eval_multipole_gradient(const MultipoleCoefficients& coeffs, double r, double theta,
                                                 double phi) {
    detail::require_exterior(r);
    const int lmax = std::max(coeffs.highest_degree(), 0);
    const LegendreTable table(lmax + 1, theta);
    const double s = std::sin(theta);
    SphericalGradient g;
    g.at_pole = std::abs(s) < detail::kPoleSin;
    for (const auto& [idx, b] : coeffs.entries()) {
        if (b == cplx{0.0, 0.0}) continue;
        const double rp = std::pow(r, -(idx.ell + 2));
        const cplx y = table.ylm(idx.ell, idx.m, phi);
        g.radial += -double(idx.ell + 1) * b * rp * y;
        g.polar += b * rp * table.ylm_dtheta(idx.ell, idx.m, phi);
        if (!g.at_pole) g.azimuthal += b * rp * cplx(0.0, idx.m) * y / s;
    }
    return g;
}

using CVec3 = std::array<cplx, 3>;
using CMat3 = std::array<std::array<cplx, 3>, 3>;

/// Cartesian gradient of the multipole field at the point (x, y, z).
inline CVec3 multipole_gradient_cartesian(const MultipoleCoefficients& coeffs, const std::array<double, 3>& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double theta = std::acos(std::clamp(x[2] / r, -1.0, 1.0));
    const double phi = std::atan2(x[1], x[0]);
    const SphericalGradient g = eval_multipole_gradient(coeffs, r, theta, phi);
    const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
    return {g.radial * (st * cp) + g.polar * (ct * cp) - g.azimuthal * sp,
            g.radial * (st * sp) + g.polar * (ct * sp) + g.azimuthal * cp,
            g.radial * ct - g.polar * st};
}

/// Hessian D^2 Phi by central differences of the analytic Cartesian gradient.
inline CMat3 multipole_hessian_fd(const MultipoleCoefficients& coeffs, const std::array<double, 3>& x, double h) {
    CMat3 hess{};
    for (int k = 0; k < 3; ++k) {
        auto xp = x;
        auto xm = x;
        xp[k] += h;
        xm[k] -= h;
        const CVec3 gp = multipole_gradient_cartesian(coeffs, xp);
        const CVec3 gm = multipole_gradient_cartesian(coeffs, xm);
        for (int i = 0; i < 3; ++i) hess[i][k] = (gp[i] - gm[i]) / (2.0 * h);
    }
    return hess;
}

inline double frobenius_norm(const CMat3& m) {
    double s = 0.0;
    for (const auto& row : m) {
        for (const auto& v : row) s += std::norm(v);
    }
    return std::sqrt(s);
}

inline std::array<double, 3> spherical_to_cartesian(double r, double theta, double phi) {
    return {r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi), r * std::cos(theta)};
}

}  // namespace bubble
