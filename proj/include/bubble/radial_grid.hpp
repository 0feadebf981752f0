#pragma once

/**
 * @file radial_grid.hpp
 * @brief Uniform vertex-centred grid on [0, 1] with finite-volume weights for
 * integrals over the unit ball, and the matching radial Laplacian.
 *
 * Node i sits at r_i = i h; its control volume is the spherical shell between
 * the face radii max(r_i - h/2, 0) and min(r_i + h/2, 1). The weights are the
 * shell volumes, so they sum to 4 pi / 3 exactly, and the interior Laplacian
 * satisfies a discrete divergence theorem against them.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "bubble/error.hpp"

namespace bubble {

class RadialGrid {
  public:
    explicit RadialGrid(int n) : n_(n) {
        if (n < 3) throw Error(ErrorCode::GridTooCoarse, "radial grid needs n >= 3, got " + std::to_string(n));
        h_ = 1.0 / (n - 1);
        nodes_.resize(n);
        face_lo_.resize(n);
        face_hi_.resize(n);
        weights_.resize(n);
        for (int i = 0; i < n; ++i) {
            nodes_[i] = (i == n - 1) ? 1.0 : i * h_;
            face_lo_[i] = (i == 0) ? 0.0 : nodes_[i] - 0.5 * h_;
            face_hi_[i] = (i == n - 1) ? 1.0 : nodes_[i] + 0.5 * h_;
            weights_[i] = 4.0 * std::numbers::pi / 3.0 *
                          (face_hi_[i] * face_hi_[i] * face_hi_[i] - face_lo_[i] * face_lo_[i] * face_lo_[i]);
        }
    }

    static std::shared_ptr<const RadialGrid> uniform(int n) { return std::make_shared<const RadialGrid>(n); }

    int n() const { return n_; }
    double h() const { return h_; }
    double node(int i) const { return nodes_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    double face_lo(int i) const { return face_lo_[i]; }
    double face_hi(int i) const { return face_hi_[i]; }

  private:
    int n_;
    double h_;
    std::vector<double> nodes_;
    std::vector<double> face_lo_;
    std::vector<double> face_hi_;
    std::vector<double> weights_;
};

struct RadialField {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> values;

    double at_boundary() const { return values.back(); }
};

inline RadialField sample(std::shared_ptr<const RadialGrid> grid, const std::function<double(double)>& fn) {
    RadialField f{grid, std::vector<double>(grid->n())};
    for (int i = 0; i < grid->n(); ++i) f.values[i] = fn(grid->node(i));
    return f;
}

/// Integral over the unit ball of a radial profile.
inline double integrate(const RadialField& f) {
    double s = 0.0;
    for (int i = 0; i < f.grid->n(); ++i) s += f.grid->weights()[i] * f.values[i];
    return s;
}

/// L2(B_1) norm of a radial profile.
inline double l2_norm(const RadialField& f) {
    double s = 0.0;
    for (int i = 0; i < f.grid->n(); ++i) s += f.grid->weights()[i] * f.values[i] * f.values[i];
    return std::sqrt(s);
}

/// d/dr at r = 1, one-sided and second order.
inline double boundary_derivative(const RadialField& f) {
    const auto& v = f.values;
    const std::size_t n = v.size();
    return (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * f.grid->h());
}

namespace detail {

/// Finite-volume row of (1/r^2) d/dr (r^2 d/dr) at interior node i (< n - 1).
/// Returns the coefficients of f_{i-1}, f_i, f_{i+1}.
inline std::array<double, 3> fv_laplacian_row(const RadialGrid& g, int i) {
    const double h = g.h();
    const double lo = g.face_lo(i);
    const double hi = g.face_hi(i);
    const double vol = (hi * hi * hi - lo * lo * lo) / 3.0;
    const double cm = lo * lo / h / vol;
    const double cp = hi * hi / h / vol;
    return {cm, -(cm + cp), cp};
}

}  // namespace detail

/// Discrete (1/r^2)(r^2 f')' - l(l+1) f / r^2, second order.
///
/// Interior nodes use the conservative finite-volume stencil (zero flux
/// through the origin). The node at r = 1 uses one-sided differences that are
/// exact for quadratics. For l >= 1 the regular solution vanishes at the
/// origin and the value returned there is 0.
inline RadialField radial_laplacian(const RadialField& field, int ell) {
    const RadialGrid& g = *field.grid;
    const int n = g.n();
    const auto& f = field.values;
    RadialField out{field.grid, std::vector<double>(n, 0.0)};
    const double centrifugal = double(ell) * (ell + 1);
    for (int i = 0; i < n - 1; ++i) {
        const auto c = detail::fv_laplacian_row(g, i);
        double v = c[1] * f[i] + c[2] * f[i + 1];
        if (i > 0) v += c[0] * f[i - 1];
        if (ell > 0) v = (i == 0) ? 0.0 : v - centrifugal * f[i] / (g.node(i) * g.node(i));
        out.values[i] = v;
    }
    const double h = g.h();
    const double d1 = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    const double d2 = (n >= 4) ? (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h)
                               : (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / (h * h);
    out.values[n - 1] = d2 + 2.0 * d1 - centrifugal * f[n - 1];
    return out;
}

}  // namespace bubble
