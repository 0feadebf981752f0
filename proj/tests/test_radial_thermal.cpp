#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bubble/radial_thermal.hpp"

using namespace bubble;

namespace {

constexpr double pi = std::numbers::pi;

struct UnitBubble {
    PhysicalParams p;
    EquilibriumState eq;
    explicit UnitBubble(PhysicalParams params = {}) : p(params), eq(equilibrium_from_mass(mass_for_radius(1.0, p), p)) {}
};

// Admissible state with a cosine density profile: the mass relation fixes a.
MonopoleSystemState cosine_state(const std::shared_ptr<const RadialGrid>& grid, const EquilibriumState& eq,
                                 double amp) {
    MonopoleSystemState s{sample(grid, [&](double r) { return amp * std::cos(pi * r); }), 0.0, 0.0, 0.0};
    s.a = -integrate(s.f) / mass_functional_coefficient(eq);
    return s;
}

}  // namespace

TEST(RadialGrid, WeightsSumToBallVolume) {
    for (int n : {3, 10, 101}) {
        const RadialGrid g(n);
        double s = 0.0;
        for (double w : g.weights()) s += w;
        EXPECT_NEAR(s, 4.0 * pi / 3.0, 1e-14);
    }
    EXPECT_THROW(RadialGrid(2), Error);
}

TEST(RadialGrid, LaplacianExactOnQuadratics) {
    const auto g = RadialGrid::uniform(21);
    const RadialField lap = radial_laplacian(sample(g, [](double r) { return 2.0 - 3.0 * r * r; }), 0);
    for (double v : lap.values) EXPECT_NEAR(v, -18.0, 1e-10);
}

TEST(RadialGrid, LaplacianSecondOrder) {
    // oracle: Lap_r of sin(pi r)/(pi r) is -pi^2 times itself
    auto fn = [](double r) { return r == 0.0 ? 1.0 : std::sin(pi * r) / (pi * r); };
    std::vector<double> err;
    for (int n : {26, 51, 101}) {
        const auto g = RadialGrid::uniform(n);
        const RadialField lap = radial_laplacian(sample(g, fn), 0);
        double e = 0.0;
        for (int i = 1; i < n - 1; ++i) e = std::max(e, std::abs(lap.values[i] + pi * pi * fn(g->node(i))));
        err.push_back(e);
    }
    EXPECT_NEAR(err[0] / err[1], 4.0, 0.5);
    EXPECT_NEAR(err[1] / err[2], 4.0, 0.5);
}

TEST(RadialGrid, BoundaryDerivative) {
    const auto g = RadialGrid::uniform(11);
    EXPECT_NEAR(boundary_derivative(sample(g, [](double r) { return r * r - r; })), 1.0, 1e-12);
}

TEST(Interface, InversionRoundTrip) {
    const UnitBubble s;
    for (double a : {-0.1, 0.0, 0.3}) {
        for (double add : {-2.0, 0.5}) {
            const double f1 = interface_density(a, add, s.p, s.eq);
            EXPECT_NEAR(invert_interface(f1, a, s.p, s.eq), add, 1e-14);
        }
    }
}

TEST(Monopole, ProjectionRemovesMassDefect) {
    const UnitBubble s;
    const auto g = RadialGrid::uniform(51);
    MonopoleSystemState st{sample(g, [](double r) { return 0.1 + r; }), 0.02, 0.0, 0.0};
    const auto proj = project_admissible(st, s.eq);
    EXPECT_NE(proj.defect, 0.0);
    EXPECT_NEAR(mass_residual(proj.state, s.eq), 0.0, 1e-14);
}

TEST(Monopole, OperatorRejectsCoarseGrid) {
    const UnitBubble s;
    try {
        assemble_monopole_operator(RadialGrid::uniform(9), s.p, s.eq);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
    }
}

TEST(Monopole, MassFunctionalIsLeftNullVector) {
    const UnitBubble s;
    const auto op = assemble_monopole_operator(RadialGrid::uniform(101), s.p, s.eq);
    const Eigen::RowVectorXd vA = op.mass_functional().transpose() * op.matrix();
    EXPECT_LE(vA.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Monopole, MassConservedOverThousandSteps) {
    const UnitBubble s;
    const auto g = RadialGrid::uniform(101);
    const MonopoleStepper stepper(assemble_monopole_operator(g, s.p, s.eq), 0.01);
    MonopoleSystemState st = cosine_state(g, s.eq, 0.01);
    st.a_dot = 0.003;
    const double scale = std::abs(integrate(st.f));
    for (int k = 0; k < 1000; ++k) {
        st = stepper.step(st);
        ASSERT_LE(std::abs(mass_residual(st, s.eq)), 1e-9 * scale) << "step " << k;
    }
}

TEST(Monopole, ConstantProfileIsStationaryUnderDiffusion) {
    // constant f with matching a: Lap f = 0, so f changes only through the boundary rate
    const UnitBubble s;
    const auto op = assemble_monopole_operator(RadialGrid::uniform(31), s.p, s.eq);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(op.size());
    for (int i = 0; i < 31; ++i) x[i] = 1.0;
    x[op.index_a()] = -(4.0 * pi / 3.0) / mass_functional_coefficient(s.eq);
    const Eigen::VectorXd dx = op.matrix() * x;
    for (int i = 0; i < 30; ++i) EXPECT_NEAR(dx[i], dx[30] / s.p.gamma, 1e-12);
}

TEST(Monopole, SpectrumStableOverParameterGrid) {
    for (double sigma : {0.1, 0.3, 1.0, 3.0, 10.0}) {
        for (double kappa : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            PhysicalParams p;
            p.sigma = sigma;
            p.kappa_g = kappa;
            const UnitBubble s(p);
            const auto op = assemble_monopole_operator(RadialGrid::uniform(41), s.p, s.eq);
            EXPECT_LT(spectral_abscissa(op), 0.0) << sigma << " " << kappa;
        }
    }
}

TEST(Monopole, RestrictedSpectrumMatchesFullSpectrumMinusZero) {
    // oracle: the full operator has the restricted eigenvalues plus one exact zero
    const UnitBubble s;
    const auto op = assemble_monopole_operator(RadialGrid::uniform(21), s.p, s.eq);
    const auto restricted = admissible_spectrum(op);
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.matrix(), false);
    int zeros = 0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        const cplx z = es.eigenvalues()[k];
        if (std::abs(z) < 1e-9) {
            ++zeros;
            continue;
        }
        double best = 1e300;
        for (const cplx& r : restricted) best = std::min(best, std::abs(r - z));
        EXPECT_LE(best, 1e-8 * std::max(1.0, std::abs(z)));
    }
    EXPECT_EQ(zeros, 1);
}

TEST(Monopole, AbscissaConvergesUnderRefinement) {
    const UnitBubble s;
    std::vector<double> lam;
    for (int n : {51, 101, 201}) lam.push_back(spectral_abscissa(assemble_monopole_operator(RadialGrid::uniform(n), s.p, s.eq)));
    const double ratio = (lam[0] - lam[1]) / (lam[1] - lam[2]);
    EXPECT_NEAR(ratio, 4.0, 0.5);
}

TEST(Monopole, EigenmodeDecaysAtItsRate) {
    const UnitBubble s;
    const auto g = RadialGrid::uniform(61);
    const auto op = assemble_monopole_operator(g, s.p, s.eq);
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.matrix());
    // slowest nonzero mode; the zero eigenvalue belongs to the mass invariant
    int k = -1;
    for (int j = 0; j < es.eigenvalues().size(); ++j) {
        if (std::abs(es.eigenvalues()[j]) <= 1e-9) continue;
        if (k < 0 || es.eigenvalues()[j].real() > es.eigenvalues()[k].real()) k = j;
    }
    ASSERT_GE(k, 0);
    const cplx lam = es.eigenvalues()[k];
    const Eigen::VectorXcd v = es.eigenvectors().col(k);
    // the slowest mode oscillates, so the trapezoid phase error sets the step
    const double dt = 5e-4;
    const int steps = 2000;
    const MonopoleStepper stepper(op, dt);
    MonopoleSystemState st = op.from_vector(v.real(), 0.0);
    EXPECT_NEAR(mass_residual(st, s.eq), 0.0, 1e-10);
    for (int i = 0; i < steps; ++i) st = stepper.step(st);
    const Eigen::VectorXd expect = (v * std::exp(lam * (steps * dt))).real();
    EXPECT_LE((op.to_vector(st) - expect).norm(), 1e-6 * v.norm());
    // discrete oracle: the trapezoid amplification factor per step
    const cplx amp = std::pow((1.0 + 0.5 * dt * lam) / (1.0 - 0.5 * dt * lam), steps);
    EXPECT_LE((op.to_vector(st) - (v * amp).real()).norm(), 1e-9 * v.norm());
}

TEST(Monopole, StepMonopoleMatchesStepper) {
    const UnitBubble s;
    const auto g = RadialGrid::uniform(31);
    const MonopoleSystemState st = cosine_state(g, s.eq, 0.02);
    const auto a = step_monopole(st, s.p, s.eq, 0.05);
    const auto b = MonopoleStepper(assemble_monopole_operator(g, s.p, s.eq), 0.05).step(st);
    for (int i = 0; i < 31; ++i) EXPECT_EQ(a.f.values[i], b.f.values[i]);
    EXPECT_NEAR(a.t, 0.05, 1e-15);
    EXPECT_THROW(MonopoleStepper(assemble_monopole_operator(g, s.p, s.eq), 0.0), Error);
}

TEST(DecayRate, SyntheticExponential) {
    std::vector<double> t, y;
    for (int i = 0; i < 200; ++i) {
        t.push_back(0.1 * i);
        y.push_back(3.0 * std::exp(-0.25 * t.back()));
    }
    const DecayFit fit = measure_decay_rate(t, y);
    EXPECT_NEAR(fit.rate, -0.25, 1e-12);
    EXPECT_TRUE(fit.decaying);
    EXPECT_NEAR(fit.efolds, 0.25 * 19.9, 1e-10);
}

TEST(DecayRate, Failures) {
    std::vector<double> t(10, 0.0), y(10, 1.0);
    EXPECT_THROW(measure_decay_rate(t, y), Error);
    t.clear();
    y.clear();
    for (int i = 0; i < 60; ++i) {
        t.push_back(i);
        y.push_back(std::exp(0.1 * i));
    }
    try {
        measure_decay_rate(t, y);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotDecaying);
    }
    std::vector<double> zeros(60, 0.0);
    EXPECT_FALSE(measure_decay_rate(t, zeros).decaying);
}
