#include <set>

#include <gtest/gtest.h>

#include "cirsim/bounds.hpp"
#include "cirsim/error.hpp"

using namespace cirsim;

namespace {

std::vector<BoundSpec> at_time(const std::vector<BoundSpec>& specs, double t) {
    std::vector<BoundSpec> out;
    for (const auto& s : specs)
        if (s.t == t && (s.kind != BoundKind::SqrtIncrement || s.s == t)) out.push_back(s);
    return out;
}

}  // namespace

TEST(DefaultBoundSpecs, CoversEveryBoundAtBothTimes) {
    const CirParams p{0.375, 1.0, 1.0, 1.0};
    const auto specs = default_bound_specs(p, 1, 0x1p-8);
    EXPECT_EQ(specs.size(), 25u);
    std::set<std::string> labels;
    for (const auto& s : specs) labels.insert(s.label);
    EXPECT_EQ(labels.size(), specs.size());
    std::size_t pairs = 0;
    for (const auto& s : specs)
        if (s.kind == BoundKind::SqrtIncrement && s.t > 0.0) {
            ++pairs;
            EXPECT_LT(s.s, s.t);
            EXPECT_LE(s.t, 1.0);
        }
    EXPECT_EQ(pairs, 10u);
    EXPECT_EQ(default_bound_parameter_sets().size(), 3u);
    EXPECT_THROW(default_bound_specs({0.25, 1.0, 1.0, 1.0}, 1, 0x1p-8), RegimeError);
}

TEST(BoundSuite, TimeZeroChecksAreExact) {
    for (const auto& params : default_bound_parameter_sets()) {
        const auto specs = at_time(default_bound_specs(params, 2, 0x1p-6), 0.0);
        ASSERT_EQ(specs.size(), 8u);
        const auto checks = bound_check_suite(params, 2, 50, 0x1p-6, specs);
        for (std::size_t i = 0; i < checks.size(); ++i) {
            EXPECT_TRUE(checks[i].pass) << checks[i].label;
            EXPECT_EQ(checks[i].slack_factor, 1.0);
            EXPECT_EQ(checks[i].se_multiplier, 0.0);
            if (specs[i].kind != BoundKind::IntegratedInverseMoment)
                EXPECT_EQ(checks[i].mc_lhs, checks[i].oracle_rhs) << checks[i].label;
            else
                EXPECT_EQ(checks[i].mc_lhs, 0.0);
        }
    }
}

TEST(BoundSuite, PositiveMomentAndIncrementsPass) {
    const CirParams a{0.375, 1.0, 1.0, 1.0};
    const BoundSpec positive{.kind = BoundKind::PositiveMoment, .label = "positive", .t = 1.0, .q = 2.0};
    const auto checks = bound_check_suite(a, 3, 400, 0x1p-7, std::span(&positive, 1));
    EXPECT_TRUE(checks[0].pass);
    EXPECT_DOUBLE_EQ(checks[0].slack_factor, kBoundSlack);
    EXPECT_GT(checks[0].std_error, 0.0);

    const CirParams b{0.375, 0.0, 1.0, 1.0};
    std::vector<BoundSpec> pairs;
    for (const auto& s : default_bound_specs(b, 3, 0x1p-7))
        if (s.kind == BoundKind::SqrtIncrement) pairs.push_back(s);
    for (const auto& c : bound_check_suite(b, 3, 400, 0x1p-7, pairs)) EXPECT_TRUE(c.pass) << c.label;
}

TEST(BoundSuite, SurfacesHypothesisViolations) {
    const CirParams a{0.375, 1.0, 1.0, 1.0};
    const BoundSpec too_large_p{.kind = BoundKind::ExpInverseMoment, .label = "x", .t = 1.0, .p = 1.5};
    EXPECT_THROW(bound_check_suite(a, 1, 10, 0x1p-4, std::span(&too_large_p, 1)), ValidationError);
    const BoundSpec wrong_c{.kind = BoundKind::IntegratedInverseMoment, .label = "x", .t = 1.0, .p = 1.2, .c = 3.0};
    EXPECT_THROW(bound_check_suite(a, 1, 10, 0x1p-4, std::span(&wrong_c, 1)), ValidationError);
    const BoundSpec off_grid{.kind = BoundKind::PositiveMoment, .label = "x", .t = 0.3};
    EXPECT_THROW(bound_check_suite(a, 1, 10, 0x1p-4, std::span(&off_grid, 1)), ValidationError);
    const BoundSpec ok{.kind = BoundKind::PositiveMoment, .label = "x", .t = 1.0};
    EXPECT_THROW(bound_check_suite(a, 1, 1, 0x1p-4, std::span(&ok, 1)), ValidationError);
}

TEST(BoundSuite, IndependentOfThreadCount) {
    const CirParams c{0.5, -0.5, 1.0, 0.5};
    const auto specs = default_bound_specs(c, 4, 0x1p-5);
    const auto one = bound_check_suite(c, 4, 60, 0x1p-5, specs, 1);
    const auto three = bound_check_suite(c, 4, 60, 0x1p-5, specs, 3);
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].mc_lhs, three[i].mc_lhs);
        EXPECT_EQ(one[i].std_error, three[i].std_error);
    }
}

TEST(RecursionCheck, InitialNodeAndPass) {
    const CirParams p{0.375, 1.0, 1.0, 1.0};
    const auto checks = recursion_bound_check(p, 5, 20, 0x1p-4, 0x1p-8);
    ASSERT_EQ(checks.size(), 17u);
    EXPECT_EQ(checks[0].mc_lhs, 0.0);
    EXPECT_EQ(checks[0].oracle_rhs, 0.0);
    for (const auto& c : checks) {
        EXPECT_TRUE(c.pass) << c.label;
        EXPECT_DOUBLE_EQ(c.slack_factor, kRecursionSlack);
    }
}

TEST(RecursionCheck, NegativeReversionAndRegimes) {
    const CirParams p{0.5, -0.5, 1.0, 0.5};
    for (const auto& c : recursion_bound_check(p, 6, 20, 0x1p-3, 0x1p-7)) EXPECT_TRUE(c.pass) << c.label;
    EXPECT_THROW(recursion_bound_check({0.5, -1.0, 1.0, 1.0}, 1, 5, 2.0, 0.25, 4.0), RegimeError);
    EXPECT_THROW(recursion_bound_check({0.2, 1.0, 1.0, 1.0}, 1, 5, 0x1p-3, 0x1p-6), RegimeError);
    EXPECT_THROW(recursion_bound_check({0.375, 1.0, 1.0, 1.0}, 1, 5, 0.3, 0x1p-6), ValidationError);
}

TEST(SchemeMomentSup, UniformAcrossSteps) {
    const CirParams p{0.375, 1.0, 1.0, 1.0};
    const std::vector<double> hs{0x1p-3, 0x1p-5, 0x1p-7};
    const auto sups = scheme_moment_sup(p, 7, 300, hs, 2.0);
    ASSERT_EQ(sups.size(), 3u);
    double lo = sups[0].estimate, hi = sups[0].estimate;
    for (const auto& s : sups) {
        EXPECT_GE(s.estimate, 1.0);
        lo = std::min(lo, s.estimate);
        hi = std::max(hi, s.estimate);
    }
    EXPECT_LE(hi, 2.0 * lo);
    EXPECT_EQ(scheme_moment_sup(p, 7, 300, hs, 2.0)[1].estimate, sups[1].estimate);
    EXPECT_THROW(scheme_moment_sup(p, 7, 300, hs, 1.0), ValidationError);
    const std::vector<double> bad{0x1p-3, 3 * 0x1p-7, 0x1p-7};
    EXPECT_THROW(scheme_moment_sup(p, 7, 300, bad, 2.0), ValidationError);
}

TEST(SchemeMomentSup, SmallNoiseStaysNearInitialScale) {
    const CirParams p{2.0, 4.0, 0.05, 0.5};
    const std::vector<double> hs{0x1p-6};
    const auto sups = scheme_moment_sup(p, 1, 200, hs, 2.0);
    EXPECT_NEAR(sups[0].estimate, 0.5, 0.05);
}
