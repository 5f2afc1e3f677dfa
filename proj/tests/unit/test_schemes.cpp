#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cirsim/error.hpp"
#include "cirsim/schemes.hpp"

using namespace cirsim;

TEST(SqrtEulerStepper, RegimeChecks) {
    EXPECT_THROW(SqrtEulerStepper({0.25, 1.0, 1.0, 1.0}, 0.01), RegimeError);
    EXPECT_THROW(SqrtEulerStepper({0.2, 1.0, 1.0, 1.0}, 0.01), RegimeError);
    EXPECT_THROW(SqrtEulerStepper({0.375, -4.0, 1.0, 1.0}, 0.5), RegimeError);
    EXPECT_THROW(SqrtEulerStepper({0.375, 1.0, 1.0, 1.0}, 0.0), ValidationError);
    EXPECT_NO_THROW(SqrtEulerStepper({0.375, -4.0, 1.0, 1.0}, 0.49));
}

TEST(SqrtEulerStep, ClosedFormExample) {
    // gamma = 0, delta - beta^2/4 = 0.25, h = 0.5: sqrt(y') = (1 + sqrt(1 + 0.25)) / 2
    const double root = 0.5 * (1.0 + std::sqrt(1.25));
    EXPECT_NEAR(implicit_sqrt_euler_step({0.5, 0.0, 1.0, 1.0}, 1.0, 0.0, 0.5), root * root, 1e-15);
    EXPECT_THROW(implicit_sqrt_euler_step({0.5, 0.0, 1.0, 1.0}, -1.0, 0.0, 0.5), ValidationError);
}

TEST(SqrtEulerStep, SolvesImplicitEquationInLampertiCoordinates) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const double beta = 0.5 + u(rng);
        const CirParams p{0.25 * beta * beta + 0.01 + u(rng), -1.0 + 3.0 * u(rng), beta, 1.0};
        const double h = std::pow(2.0, -1.0 - 12.0 * u(rng));
        if (2.0 + p.gamma * h <= 0.0 || (p.gamma < 0 && h >= 2.0 / -p.gamma)) continue;
        const double y = i % 10 == 0 ? 0.0 : 3.0 * u(rng) * u(rng);
        const double dw = std::sqrt(h) * 4.0 * (u(rng) - 0.5);
        const double y_next = implicit_sqrt_euler_step(p, y, dw, h);
        ASSERT_GT(y_next, 0.0);
        const auto m = TransformedModel::from(p);
        const double z = lamperti_phi(p, y), z_next = lamperti_phi(p, y_next);
        const double residual = z_next - h * m.drift(z_next) - (z + dw);
        EXPECT_LT(std::abs(residual), 1e-10 * (1.0 + std::abs(z) + std::abs(dw)));
        const double z_root = implicit_additive_step(m, z, dw, h);
        EXPECT_NEAR(lamperti_inv(p, z_root), y_next, 1e-9 * y_next);
    }
}

TEST(SqrtEulerStep, PositiveFromZeroWithAdverseNoise) {
    const CirParams p{0.2501, 2.0, 1.0, 0.0};
    const SqrtEulerStepper stepper(p, 1e-4);
    for (double dw : {-10.0, -1.0, -1e-3, 0.0}) EXPECT_GT(stepper.step(0.0, dw), 0.0);
}

TEST(ImplicitAdditiveStep, MatchesQuadraticRoot) {
    // g(x) = 1/x - x: (1 + h) x^2 - target x - h = 0
    auto g = [](double x) { return 1.0 / x - x; };
    for (double target : {-3.0, -0.1, 0.0, 0.7, 5.0})
        for (double h : {1e-4, 0.01, 0.5}) {
            const double expected = (target + std::sqrt(target * target + 4.0 * (1.0 + h) * h)) / (2.0 * (1.0 + h));
            EXPECT_NEAR(implicit_additive_step(g, 0.0, 0.0, target, h), expected, 1e-12 * (1.0 + expected));
        }
}

TEST(ImplicitAdditiveStep, StepRestrictionAndFailures) {
    const TransformedModel m{0.25, -1.0};
    EXPECT_THROW(implicit_additive_step(m, 1.0, 0.0, 2.0), RegimeError);
    EXPECT_NO_THROW(implicit_additive_step(m, 1.0, 0.0, 1.99));
    EXPECT_THROW(implicit_additive_step(m, -1.0, 0.0, 0.1), ValidationError);
    EXPECT_THROW(implicit_additive_step(m, 1.0, std::nan(""), 0.1), ValidationError);
    EXPECT_THROW(implicit_additive_step(TransformedModel{0.0, 1.0}, 1.0, 0.0, 0.1), RegimeError);
    // F(x) = x + h/x - target stays positive near zero: no bracket
    auto bad = [](double x) { return -1.0 / x; };
    EXPECT_THROW(implicit_additive_step(bad, 0.0, 0.0, 0.0, 0.1), NumericalError);
}

TEST(ImplicitAdditiveStep, ContractionOfInverse) {
    // |F^{-1}(a) - F^{-1}(b)| <= |a - b| / (1 - hL)
    const TransformedModel m{0.25, -1.0};
    const double h = 0.5, L = m.lipschitz_L();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 4.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng), b = u(rng);
        const double za = implicit_additive_step(m, 0.0, a, h), zb = implicit_additive_step(m, 0.0, b, h);
        EXPECT_LE(std::abs(za - zb), std::abs(a - b) / (1.0 - h * L) * (1.0 + 1e-9) + 1e-15);
    }
}

TEST(Simulation, ZeroIncrementsGiveMonotonePath) {
    const CirParams p{0.375, 0.0, 1.0, 0.5};
    const TimeGrid g(1.0, 16);
    const auto traj = simulate_cir_implicit(p, g, std::vector<double>(16, 0.0));
    ASSERT_EQ(traj.values.size(), 17u);
    EXPECT_EQ(traj.values[0], 0.5);
    for (std::size_t k = 1; k < traj.values.size(); ++k) EXPECT_GT(traj.values[k], traj.values[k - 1]);
    EXPECT_THROW(simulate_cir_implicit(p, g, std::vector<double>(15, 0.0)), ValidationError);
}

TEST(Simulation, TransformedPathMatchesStateScheme) {
    const CirParams p{0.375, 1.0, 1.0, 1.0};
    const TimeGrid g(1.0, 256);
    const auto inc = generate_increments(1, 0, g);
    const auto x = simulate_cir_implicit(p, g, inc);
    const auto z = simulate_transformed(TransformedModel::from(p), lamperti_phi(p, p.x0), g, inc);
    EXPECT_EQ(z.kind, TrajectoryKind::Transformed);
    for (std::size_t k = 0; k < x.values.size(); ++k)
        EXPECT_NEAR(lamperti_phi(p, x.values[k]), z.values[k], 1e-9 * (1.0 + z.values[k]));
}

TEST(Interpolation, LinearBetweenNodes) {
    Trajectory t{TimeGrid(1.0, 4), {0.0, 1.0, 3.0, 3.0, 7.0}, TrajectoryKind::Scheme};
    EXPECT_DOUBLE_EQ(interpolate_linear(t, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(interpolate_linear(t, 0.125), 0.5);
    EXPECT_DOUBLE_EQ(interpolate_linear(t, 0.375), 2.0);
    EXPECT_DOUBLE_EQ(interpolate_linear(t, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(interpolate_linear(t, 1.0), 7.0);
    EXPECT_THROW(interpolate_linear(t, 1.5), ValidationError);
}

TEST(TrajectoryCsv, SeventeenDigits) {
    const auto file = std::filesystem::temp_directory_path() / "cirsim_traj_test.csv";
    Trajectory t{TimeGrid(1.0, 2), {0.1, 1.0 / 3.0, 2.0}, TrajectoryKind::Scheme};
    write_trajectory_csv(file, t);
    std::ifstream is(file);
    std::stringstream ss;
    ss << is.rdbuf();
    EXPECT_EQ(ss.str(), "t,value\n0,0.10000000000000001\n0.5,0.33333333333333331\n1,2\n");
    std::filesystem::remove(file);
}
