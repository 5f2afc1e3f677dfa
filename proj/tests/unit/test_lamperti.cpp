#include <cmath>

#include <gtest/gtest.h>

#include "cirsim/error.hpp"
#include "cirsim/lamperti.hpp"
#include "cirsim/model.hpp"

using namespace cirsim;

namespace {

GeneralDiffusion cir_diffusion(const CirParams& p) {
    return {[p](double x) { return p.delta - p.gamma * x; },
            [p](double x) { return p.beta * std::sqrt(x); },
            [p](double) { return p.beta * p.beta; }, 10.0};
}

// sigma(x) = sqrt(x) (1 + x): phi(y) = 2 atan(sqrt(y)), phi^{-1}(z) = tan(z/2)^2.
GeneralDiffusion perturbed_diffusion(double delta) {
    return {[delta](double x) { return delta - x; },
            [](double x) { return std::sqrt(x) * (1.0 + x); },
            [](double x) { return (1.0 + x) * (1.0 + 3.0 * x); }, 10.0};
}

double perturbed_drift_closed_form(double delta, double z) {
    const double x = std::pow(std::tan(0.5 * z), 2);
    return (delta - x - 0.25 * (1.0 + x) * (1.0 + 3.0 * x)) / (std::sqrt(x) * (1.0 + x));
}

}  // namespace

TEST(GeneralLamperti, ReproducesCirTransform) {
    const CirParams p{0.375, 1.0, 1.0, 1.0};
    const auto lamperti = general_lamperti(cir_diffusion(p), 64);
    const auto model = TransformedModel::from(p);
    for (double y : {1e-10, 1e-4, 0.3, 1.0, 7.5}) EXPECT_NEAR(lamperti.phi(y), lamperti_phi(p, y), 1e-12);
    for (double z : {0.01, 0.5, 1.0, 2.0, 5.0}) {
        EXPECT_NEAR(lamperti.phi_inverse(z), lamperti_inv(p, z), 1e-12 * (1.0 + z * z));
        EXPECT_NEAR(lamperti.drift(z), model.drift(z), 1e-8);
    }
}

TEST(GeneralLamperti, PerturbedDiffusionMatchesClosedForm) {
    const double delta = 0.5;
    const auto lamperti = general_lamperti(perturbed_diffusion(delta), 64);
    for (double y : {1e-8, 0.1, 1.0, 9.0}) EXPECT_NEAR(lamperti.phi(y), 2.0 * std::atan(std::sqrt(y)), 1e-12);
    EXPECT_NEAR(lamperti.drift(1.0), perturbed_drift_closed_form(delta, 1.0), 1e-9);
}

TEST(GeneralLamperti, ResolutionIndependentSpotValue) {
    const auto coarse = general_lamperti(perturbed_diffusion(0.5), 32);
    const auto fine = general_lamperti(perturbed_diffusion(0.5), 320);
    EXPECT_NEAR(coarse.drift(1.0), fine.drift(1.0), 1e-10);
}

TEST(GeneralLamperti, TablesAreConsistent) {
    const auto lamperti = general_lamperti(perturbed_diffusion(0.5), 16);
    ASSERT_EQ(lamperti.states().size(), 17u);
    EXPECT_EQ(lamperti.states().front(), 0.0);
    EXPECT_EQ(lamperti.transformed().front(), 0.0);
    for (std::size_t i = 1; i < lamperti.states().size(); ++i) {
        EXPECT_GT(lamperti.transformed()[i], lamperti.transformed()[i - 1]);
        EXPECT_NEAR(lamperti.transformed()[i], 2.0 * std::atan(std::sqrt(lamperti.states()[i])), 1e-12);
    }
}

TEST(GeneralLamperti, LipschitzBoundCoversTable) {
    const CirParams p{0.5, -1.0, 1.0, 1.0};
    const auto lamperti = general_lamperti(cir_diffusion(p), 128);
    EXPECT_GE(lamperti.lipschitz_L(), TransformedModel::from(p).lipschitz_L() * 0.99);
    EXPECT_LE(lamperti.lipschitz_L(), TransformedModel::from(p).lipschitz_L() * 1.06);
}

TEST(GeneralLamperti, BoundaryConditionIsStrict) {
    // mu(0) = (sigma^2)'(0) / 4 exactly
    EXPECT_THROW(general_lamperti(cir_diffusion({0.25, 1.0, 1.0, 1.0}), 16), RegimeError);
    EXPECT_THROW(general_lamperti(perturbed_diffusion(0.25), 16), RegimeError);
}

TEST(GeneralLamperti, OutOfRangeQueries) {
    const auto lamperti = general_lamperti(perturbed_diffusion(0.5), 16);
    EXPECT_THROW(lamperti.phi(-1.0), ValidationError);
    EXPECT_THROW(lamperti.phi(11.0), ValidationError);
    EXPECT_THROW(lamperti.drift(0.0), ValidationError);
    EXPECT_THROW(lamperti.phi_inverse(10.0), ValidationError);
}
