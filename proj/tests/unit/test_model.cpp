#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "cirsim/error.hpp"
#include "cirsim/model.hpp"

using namespace cirsim;

TEST(CirParams, RejectsInvalidFields) {
    EXPECT_THROW((CirParams{0.375, 1.0, 0.0, 1.0}.validate()), ValidationError);
    EXPECT_THROW((CirParams{0.375, 1.0, -1.0, 1.0}.validate()), ValidationError);
    EXPECT_THROW((CirParams{-0.1, 1.0, 1.0, 1.0}.validate()), ValidationError);
    EXPECT_THROW((CirParams{0.375, 1.0, 1.0, -1.0}.validate()), ValidationError);
    EXPECT_THROW((CirParams{0.375, std::nan(""), 1.0, 1.0}.validate()), ValidationError);
    EXPECT_NO_THROW((CirParams{0.0, -3.0, 2.0, 0.0}.validate()));
}

TEST(ClassifyRegime, InaccessibleBoundary) {
    const auto r = classify_regime({1.0, 1.0, 1.0, 1.0});
    EXPECT_DOUBLE_EQ(r.feller_index, 2.0);
    EXPECT_FALSE(r.boundary_accessible);
    EXPECT_DOUBLE_EQ(r.alpha, 1.5);
}

TEST(ClassifyRegime, AccessibleBoundary) {
    const auto r = classify_regime({0.375, 1.0, 1.0, 1.0});
    EXPECT_DOUBLE_EQ(r.feller_index, 0.75);
    EXPECT_TRUE(r.boundary_accessible);
    EXPECT_DOUBLE_EQ(r.alpha, 0.25);
    EXPECT_TRUE(r.scheme_applicable);
    EXPECT_TRUE(r.theorem_applicable);
    EXPECT_TRUE(std::isinf(r.max_step_reversion));
}

TEST(ClassifyRegime, BelowSchemeThreshold) {
    const auto r = classify_regime({0.2, 0.0, 1.0, 1.0});
    EXPECT_DOUBLE_EQ(r.feller_index, 0.4);
    EXPECT_FALSE(r.theorem_applicable);
    EXPECT_FALSE(r.scheme_applicable);
}

TEST(ClassifyRegime, NegativeReversionLimitsStep) {
    EXPECT_DOUBLE_EQ(classify_regime({0.5, -0.5, 1.0, 1.0}).max_step_reversion, 4.0);
}

TEST(TheoreticalRate, ExponentFormula) {
    EXPECT_DOUBLE_EQ(theoretical_rate({0.375, 1.0, 1.0, 1.0}, 1.0), 0.25);
    EXPECT_DOUBLE_EQ(theoretical_rate({0.75, 1.0, 1.0, 1.0}, 2.0), 0.25);
    EXPECT_DOUBLE_EQ(theoretical_rate({0.375, 1.0, 1.0, 1.0}, 2.0), 0.125);
}

TEST(TheoreticalRate, NamesHypothesisWhenViolated) {
    try {
        theoretical_rate({0.2, 1.0, 1.0, 1.0}, 1.0);
        FAIL() << "expected RegimeError";
    } catch (const RegimeError& e) {
        EXPECT_NE(std::string(e.what()).find("2*delta/beta^2 > 1/2"), std::string::npos);
    }
    EXPECT_THROW(theoretical_rate({0.375, 1.0, 1.0, 1.0}, 0.5), ValidationError);
}

TEST(Lamperti, ExamplesAndRoundTrip) {
    EXPECT_DOUBLE_EQ(lamperti_phi({1.0, 0.0, 2.0, 1.0}, 4.0), 2.0);
    EXPECT_DOUBLE_EQ(lamperti_phi({1.0, 0.0, 1.0, 1.0}, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(lamperti_phi({1.0, 0.0, 0.5, 1.0}, 1.0), 4.0);
    EXPECT_THROW(lamperti_phi({1.0, 0.0, 1.0, 1.0}, -1e-3), ValidationError);
    const CirParams params{0.3, 0.7, 1.3, 1.0};
    for (double x : {0.0, 1e-12, 0.25, 1.0, 17.0})
        EXPECT_NEAR(lamperti_inv(params, lamperti_phi(params, x)), x, 1e-15 * (1.0 + x));
}

TEST(TransformedDrift, Examples) {
    EXPECT_DOUBLE_EQ(transformed_drift({0.25, 0.0}, 0.05), 5.0);
    EXPECT_DOUBLE_EQ(transformed_drift({0.25, 1.0}, 1.0), -0.25);
    EXPECT_DOUBLE_EQ(transformed_drift({1.5, -2.0}, 2.0), 2.75);
    EXPECT_THROW(transformed_drift({0.25, 1.0}, 0.0), ValidationError);
}

TEST(TransformedModel, FromParams) {
    const auto m = TransformedModel::from({0.375, 1.0, 1.0, 1.0});
    EXPECT_DOUBLE_EQ(m.alpha, 0.25);
    EXPECT_DOUBLE_EQ(m.lipschitz_L(), 0.0);
    EXPECT_DOUBLE_EQ(TransformedModel::from({0.5, -1.0, 1.0, 1.0}).lipschitz_L(), 0.5);
}

TEST(TransformedModel, OneSidedLipschitzHolds) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> z(1e-3, 10.0);
    for (double gamma : {-2.0, -0.5, 0.0, 1.0}) {
        const TransformedModel m{0.25, gamma};
        const double L = m.lipschitz_L();
        for (int i = 0; i < 1000; ++i) {
            const double x = z(rng), y = z(rng);
            EXPECT_LE((x - y) * (m.drift(x) - m.drift(y)), L * (x - y) * (x - y) * (1 + 1e-12) + 1e-300);
        }
    }
}

TEST(TransformedModel, ZTimesDriftTendsToAlpha) {
    const TransformedModel m{0.25, 1.0};
    EXPECT_NEAR(1e-8 * m.drift(1e-8), 0.25, 1e-15);
}
