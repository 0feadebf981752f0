#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bubble/harmonics.hpp"

using namespace bubble;

namespace {

constexpr double pi = std::numbers::pi;

// Oracle: libstdc++ special functions give Y_l^m(theta, 0) for m >= 0 with
// the Condon-Shortley phase.
cplx oracle_Y(int l, int m, double theta, double phi) {
    const int am = std::abs(m);
    const cplx pos = std::sph_legendre(unsigned(l), unsigned(am), theta) * std::polar(1.0, am * phi);
    if (m >= 0) return pos;
    return (am % 2 == 0 ? 1.0 : -1.0) * std::conj(pos);
}

}  // namespace

TEST(Harmonics, InvalidIndexRejected) {
    EXPECT_THROW(eval_Y({2, 3}, 0.3, 0.1), Error);
    EXPECT_THROW(eval_Y({-1, 0}, 0.3, 0.1), Error);
    try {
        eval_Y({1, -2}, 0.3, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IndexInvalid);
    }
}

TEST(Harmonics, ClosedFormsAtLowDegree) {
    const double th = 0.7, ph = 1.3;
    EXPECT_NEAR(std::abs(eval_Y({0, 0}, th, ph) - 1.0 / std::sqrt(4.0 * pi)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(eval_Y({1, 0}, th, ph) - std::sqrt(3.0 / (4.0 * pi)) * std::cos(th)), 0.0, 1e-15);
    const cplx y11 = -std::sqrt(3.0 / (8.0 * pi)) * std::sin(th) * std::polar(1.0, ph);
    EXPECT_NEAR(std::abs(eval_Y({1, 1}, th, ph) - y11), 0.0, 1e-15);
    const double y20 = std::sqrt(5.0 / (16.0 * pi)) * (3.0 * std::cos(th) * std::cos(th) - 1.0);
    EXPECT_NEAR(std::abs(eval_Y({2, 0}, th, ph) - y20), 0.0, 1e-15);
}

TEST(Harmonics, MatchesLibraryOracle) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uth(0.0, pi), uph(0.0, 2.0 * pi);
    for (int k = 0; k < 50; ++k) {
        const double th = uth(rng), ph = uph(rng);
        for (int l = 0; l <= 12; ++l) {
            for (int m = -l; m <= l; ++m) {
                EXPECT_NEAR(std::abs(eval_Y({l, m}, th, ph) - oracle_Y(l, m, th, ph)), 0.0, 1e-12)
                    << l << " " << m;
            }
        }
    }
}

TEST(Harmonics, ThetaDerivativeMatchesFiniteDifference) {
    const double h = 1e-6;
    for (double th : {0.2, 1.0, 2.4}) {
        for (int l = 0; l <= 6; ++l) {
            for (int m = -l; m <= l; ++m) {
                const cplx fd = (eval_Y({l, m}, th + h, 0.4) - eval_Y({l, m}, th - h, 0.4)) / (2.0 * h);
                EXPECT_NEAR(std::abs(eval_Y_dtheta({l, m}, th, 0.4) - fd), 0.0, 1e-8) << l << " " << m;
            }
        }
    }
}

TEST(Harmonics, ThetaDerivativeRegularAtPoles) {
    // d/dtheta Y_1^0 = -sqrt(3/4pi) sin(theta): zero at both poles
    EXPECT_NEAR(std::abs(eval_Y_dtheta({1, 0}, 0.0, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(eval_Y_dtheta({1, 0}, pi, 0.0)), 0.0, 1e-14);
    // d/dtheta Y_1^1 at the north pole = -sqrt(3/8pi) e^{i phi}
    EXPECT_NEAR(std::abs(eval_Y_dtheta({1, 1}, 0.0, 0.5) + std::sqrt(3.0 / (8.0 * pi)) * std::polar(1.0, 0.5)), 0.0,
                1e-14);
}

TEST(Harmonics, ConjugateSymmetry) {
    for (int l = 0; l <= 5; ++l) {
        for (int m = -l; m <= l; ++m) {
            const cplx lhs = eval_Y({l, -m}, 0.9, 2.1);
            const cplx rhs = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(eval_Y({l, m}, 0.9, 2.1));
            EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-14);
        }
    }
}

TEST(SphereGridTest, WeightsSumToFourPi) {
    for (int n : {1, 4, 17}) EXPECT_NEAR(SphereGrid(n, 2 * n + 1).total_weight(), 4.0 * pi, 1e-12);
    EXPECT_THROW(SphereGrid(0, 3), Error);
}

TEST(SphereGridTest, OrthonormalityOnBandLimitedGrid) {
    const int L = 6;
    auto grid = SphereGrid::for_band_limit(2 * L);
    for (int l1 = 0; l1 <= L; ++l1) {
        for (int m1 = -l1; m1 <= l1; ++m1) {
            HarmonicCoefficients c(L);
            c.set({l1, m1}, 1.0);
            const SurfaceField f = synthesize(c, grid);
            for (int l2 = 0; l2 <= L; ++l2) {
                for (int m2 = -l2; m2 <= l2; ++m2) {
                    const double expect = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
                    EXPECT_NEAR(std::abs(project(f, {l2, m2}) - expect), 0.0, 1e-12);
                }
            }
        }
    }
}

TEST(Transforms, SynthesizeProjectRoundTrip) {
    std::mt19937 rng(11);
    std::normal_distribution<double> nd;
    const int L = 8;
    HarmonicCoefficients c(L);
    for (int l = 0; l <= L; ++l) {
        for (int m = -l; m <= l; ++m) c.set({l, m}, {nd(rng), nd(rng)});
    }
    const SurfaceField f = synthesize(c, SphereGrid::for_band_limit(2 * L));
    const HarmonicCoefficients back = project_all(f, L);
    for (const auto& [idx, v] : c.entries()) EXPECT_NEAR(std::abs(back.get(idx) - v), 0.0, 1e-12);
}

TEST(Transforms, ProjectRejectsCoarseGrid) {
    const SurfaceField f{std::make_shared<const SphereGrid>(3, 7), std::vector<cplx>(21, 1.0)};
    try {
        project(f, {4, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
    }
    EXPECT_THROW(project_all(f, 4), Error);
}

TEST(Transforms, CoefficientSetterRejectsHighDegree) {
    HarmonicCoefficients c(3);
    EXPECT_THROW(c.set({4, 0}, 1.0), Error);
    EXPECT_EQ(c.lowest_degree(), -1);
    c.set({2, 1}, 0.5);
    c.set({3, 0}, 0.5);
    EXPECT_EQ(c.lowest_degree(), 2);
    EXPECT_EQ(c.highest_degree(), 3);
}

TEST(Transforms, SurfaceLaplacianEigenvalues) {
    // spectral Laplacian against a finite-difference Laplace-Beltrami of the synthesized field
    HarmonicCoefficients c(4);
    c.set({3, 2}, {0.4, -0.2});
    c.set({3, -2}, {0.4, 0.2});
    c.set({2, 0}, 1.0);
    const HarmonicCoefficients lap = apply_surface_laplacian(c);
    EXPECT_NEAR(std::abs(lap.get({2, 0}) + 6.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(lap.get({3, 2}) + 12.0 * cplx(0.4, -0.2)), 0.0, 1e-15);

    auto value = [&](double th, double ph) {
        cplx s = 0.0;
        for (const auto& [idx, v] : c.entries()) s += v * eval_Y(idx, th, ph);
        return s;
    };
    auto lvalue = [&](double th, double ph) {
        cplx s = 0.0;
        for (const auto& [idx, v] : lap.entries()) s += v * eval_Y(idx, th, ph);
        return s;
    };
    const double h = 1e-4, th = 1.1, ph = 0.6;
    const cplx dth = (value(th + h, ph) - value(th - h, ph)) / (2.0 * h);
    const cplx d2th = (value(th + h, ph) - 2.0 * value(th, ph) + value(th - h, ph)) / (h * h);
    const cplx d2ph = (value(th, ph + h) - 2.0 * value(th, ph) + value(th, ph - h)) / (h * h);
    const cplx fd = d2th + std::cos(th) / std::sin(th) * dth + d2ph / (std::sin(th) * std::sin(th));
    EXPECT_NEAR(std::abs(fd - lvalue(th, ph)), 0.0, 1e-5);
}

TEST(Transforms, RealFieldHasConjugateSymmetricCoefficients) {
    auto grid = SphereGrid::for_band_limit(12);
    SurfaceField f{grid, std::vector<cplx>(grid->size())};
    for (int i = 0; i < grid->n_theta(); ++i) {
        for (int j = 0; j < grid->n_phi(); ++j) {
            const double x = std::sin(grid->theta(i)) * std::cos(grid->phi(j));
            const double z = std::cos(grid->theta(i));
            f.values[grid->flat(i, j)] = 1.0 + 0.3 * x * z + 0.1 * z * z * z;
        }
    }
    EXPECT_LE(conjugate_symmetry_defect(project_all(f, 6)), 1e-14);
}

TEST(Multipole, GradientMatchesFiniteDifference) {
    MultipoleCoefficients b(4);
    b.set({0, 0}, 0.7);
    b.set({2, 1}, {0.3, 0.1});
    b.set({3, -2}, {-0.2, 0.4});
    const double h = 1e-6, r = 1.7, th = 0.8, ph = 2.2;
    const SphericalGradient g = eval_multipole_gradient(b, r, th, ph);
    const cplx dr = (eval_multipole_potential(b, r + h, th, ph) - eval_multipole_potential(b, r - h, th, ph)) / (2 * h);
    const cplx dt =
        (eval_multipole_potential(b, r, th + h, ph) - eval_multipole_potential(b, r, th - h, ph)) / (2 * h * r);
    const cplx dp = (eval_multipole_potential(b, r, th, ph + h) - eval_multipole_potential(b, r, th, ph - h)) /
                    (2 * h * r * std::sin(th));
    EXPECT_NEAR(std::abs(g.radial - dr), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(g.polar - dt), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(g.azimuthal - dp), 0.0, 1e-8);
}

TEST(Multipole, MonopoleIsPointSource) {
    MultipoleCoefficients b(0);
    b.set({0, 0}, 2.0);
    const double c = 2.0 / std::sqrt(4.0 * pi);
    for (double r : {1.0, 3.0, 10.0}) {
        EXPECT_NEAR(std::abs(eval_multipole_potential(b, r, 0.3, 0.3) - c / r), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(eval_multipole_gradient(b, r, 0.3, 0.3).radial + c / (r * r)), 0.0, 1e-14);
    }
}

TEST(Multipole, PoleAndInteriorHandling) {
    MultipoleCoefficients b(2);
    b.set({2, 1}, 1.0);
    const SphericalGradient g = eval_multipole_gradient(b, 2.0, 0.0, 0.0);
    EXPECT_TRUE(g.at_pole);
    EXPECT_EQ(g.azimuthal, cplx(0.0, 0.0));
    try {
        eval_multipole_potential(b, 0.5, 1.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RadiusInsideBubble);
    }
}

TEST(Multipole, HessianIsTracelessAndSymmetric) {
    MultipoleCoefficients b(3);
    b.set({0, 0}, 1.0);
    b.set({3, 1}, {0.5, 0.2});
    const auto H = multipole_hessian_fd(b, spherical_to_cartesian(3.0, 1.1, 0.4), 1e-4);
    EXPECT_NEAR(std::abs(H[0][0] + H[1][1] + H[2][2]), 0.0, 1e-7);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(H[i][j] - H[j][i]), 0.0, 1e-7);
    }
}
