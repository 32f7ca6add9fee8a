#include <gtest/gtest.h>

#include "besselsg/measure.hpp"
#include "support.hpp"

using namespace besselsg;
using besselsg::testing::Gen;

TEST(Interval, NormalizeSmallCenter) {
    const auto I = interval_normalize(0.5, 1.0);
    EXPECT_DOUBLE_EQ(I.center, 0.75);
    EXPECT_DOUBLE_EQ(I.radius, 0.75);
    EXPECT_DOUBLE_EQ(I.left, 0.0);
    EXPECT_DOUBLE_EQ(I.right, 1.5);
}

TEST(Interval, NormalizeNoChange) {
    const auto I = interval_normalize(2.0, 1.0);
    EXPECT_EQ(I.center, 2.0);
    EXPECT_EQ(I.radius, 1.0);
    EXPECT_EQ(I.left, 1.0);
    EXPECT_EQ(I.right, 3.0);
    const auto J = interval_normalize(1.0, 1.0);
    EXPECT_EQ(J.left, 0.0);
    EXPECT_EQ(J.right, 2.0);
    EXPECT_EQ(J.center, 1.0);
}

TEST(Interval, RejectsNonpositive) {
    EXPECT_THROW(interval_normalize(0.0, 1.0), invalid_argument);
    EXPECT_THROW(interval_normalize(1.0, -1.0), invalid_argument);
    EXPECT_THROW(interval_dilate(interval_normalize(1.0, 1.0), 0.0), invalid_argument);
}

TEST(Interval, Dilate) {
    const auto I = interval_dilate(interval_normalize(2.0, 1.0), 3.0);
    EXPECT_EQ(I.left, 0.0);
    EXPECT_EQ(I.right, 5.0);
    EXPECT_EQ(I.center, 2.5);
    EXPECT_EQ(I.radius, 2.5);
    const auto J = interval_dilate(interval_normalize(10.0, 1.0), 2.0);
    EXPECT_EQ(J.center, 10.0);
    EXPECT_EQ(J.radius, 2.0);
    const auto K = interval_dilate(interval_normalize(2.0, 1.0), 1.0);
    EXPECT_EQ(K.left, 1.0);
    EXPECT_EQ(K.right, 3.0);
}

TEST(Measure, ClosedFormExamples) {
    EXPECT_NEAR(measure_of_interval(MeasureContext(1.0), interval_normalize(2.0, 1.0)), 26.0 / 3.0, 1e-14);
    EXPECT_NEAR(measure_of_interval(MeasureContext(0.5), interval_normalize(0.5, 1.0)), 1.125, 1e-14);
    EXPECT_NEAR(volume_proxy(MeasureContext(1.0), 2.0, 1.0), 5.0, 1e-14);
}

TEST(Measure, MatchesDirectFormula) {
    Gen g(11);
    for (int i = 0; i < 2000; ++i) {
        const MeasureContext ctx(g.lambda());
        const double x = g.log_uniform(1e-3, 1e3), r = g.log_uniform(1e-3, 1e3);
        const auto I = interval_normalize(x, r);
        const double q = ctx.power() + 1.0;
        const double direct = (std::pow(std::max(x + r, 0.0), q) - std::pow(std::max(x - r, 0.0), q)) / q;
        // the direct formula cancels for r << x; the comparison tolerance reflects that
        const double tol = 1e-13 * std::pow(x + r, q) / q;
        EXPECT_NEAR(measure_of_interval(ctx, I), direct, tol);
        EXPECT_GE(I.center, I.radius);
    }
}

TEST(Measure, NarrowIntervalsKeepRelativeAccuracy) {
    const MeasureContext ctx(2.5);
    const auto I = interval_normalize(1e3, 1e-9);
    // m = int y^5 over (x - h, x + h) = 2 h x^5 (1 + O((h/x)^2)); h from the stored endpoints
    const double h = 0.5 * (I.right - I.left), x = 0.5 * (I.right + I.left);
    EXPECT_NEAR(measure_of_interval(ctx, I) / (2 * h * std::pow(x, 5)), 1.0, 1e-14);
}

TEST(Measure, DoublingAndComparabilityProperty) {
    Gen g(12);
    for (double lambda : {0.1, 0.5, 1.0, 2.5}) {
        const MeasureContext ctx(lambda);
        double cd = 0.0, cmax = 0.0, cmin = 1e300;
        for (int i = 0; i < 5000; ++i) {
            const double x = g.log_uniform(1e-4, 1e4), r = g.log_uniform(1e-4, 1e4);
            const auto I = interval_normalize(x, r);
            const double m1 = measure_of_interval(ctx, I);
            const double m2 = measure_of_interval(ctx, interval_normalize(x, 2 * r));
            cd = std::max(cd, m2 / m1);
            const double ratio = m1 / volume_proxy(ctx, x, r);
            cmax = std::max(cmax, ratio);
            cmin = std::min(cmin, ratio);
        }
        // the doubling constant is at most 2^{2 lambda + 1}
        EXPECT_LE(cd, std::pow(2.0, ctx.power() + 1.0) * (1 + 1e-12)) << lambda;
        EXPECT_TRUE(std::isfinite(cmax));
        EXPECT_GT(cmin, 0.0);
        const double C = std::max(cmax, 1.0 / cmin);
        EXPECT_LT(C, 1e3) << lambda;
    }
}

TEST(Grid, LogUniformExample) {
    const MeasureContext ctx(1.0);
    GridSpec spec;
    spec.lo = 1.0;
    spec.hi = 100.0;
    spec.count = 3;
    const Grid grid = build_grid(ctx, spec);
    ASSERT_EQ(grid.size(), 3u);
    EXPECT_EQ(grid.nodes()[0], 1.0);
    EXPECT_NEAR(grid.nodes()[1], 10.0, 1e-13);
    EXPECT_EQ(grid.nodes()[2], 100.0);
}

TEST(Grid, LinearWeightsSumToMeasure) {
    const MeasureContext ctx(1.0);
    GridSpec spec;
    spec.lo = 0.0;
    spec.hi = 2.0;
    spec.count = 3;
    spec.law = SpacingLaw::linear;
    const Grid grid = build_grid(ctx, spec);
    double s = 0.0;
    for (double w : grid.weights()) s += w;
    EXPECT_NEAR(s, 8.0 / 3.0, 1e-14);
}

TEST(Grid, WeightsIntegrateLinearFunctionsExactly) {
    Gen g(13);
    for (int trial = 0; trial < 200; ++trial) {
        const MeasureContext ctx(g.lambda());
        GridSpec spec;
        spec.lo = g.log_uniform(1e-3, 1.0);
        spec.hi = spec.lo * g.log_uniform(2.0, 1e4);
        spec.count = static_cast<std::size_t>(g.integer(2, 60));
        const Grid grid = build_grid(ctx, spec);
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            s0 += grid.weights()[i];
            s1 += grid.weights()[i] * grid.nodes()[i];
        }
        const double q = ctx.power() + 1.0;
        const double m0 = (std::pow(spec.hi, q) - std::pow(spec.lo, q)) / q;
        const double m1 = (std::pow(spec.hi, q + 1) - std::pow(spec.lo, q + 1)) / (q + 1);
        EXPECT_NEAR(s0 / m0, 1.0, 1e-12);
        EXPECT_NEAR(s1 / m1, 1.0, 1e-12);
    }
}

TEST(Grid, RefinementHalvesSpacing) {
    const MeasureContext ctx(1.0);
    GridSpec spec;
    spec.lo = 0.0;
    spec.hi = 10.0;
    spec.count = 11;
    spec.law = SpacingLaw::linear;
    spec.refine.push_back({2.0, 4.0, 2});
    const Grid grid = build_grid(ctx, spec);
    EXPECT_EQ(grid.size(), 13u);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double h = grid.nodes()[i + 1] - grid.nodes()[i];
        const bool inside = grid.nodes()[i] >= 2.0 && grid.nodes()[i + 1] <= 4.0;
        EXPECT_NEAR(h, inside ? 0.5 : 1.0, 1e-14);
    }
    ASSERT_TRUE(grid.support_hint().has_value());
    EXPECT_EQ(grid.support_hint()->left, 2.0);
}

TEST(Grid, SpecErrors) {
    const MeasureContext ctx(1.0);
    GridSpec spec;
    spec.count = 1;
    EXPECT_THROW(build_grid(ctx, spec), invalid_argument);
    spec.count = 5;
    spec.lo = spec.hi = 1.0;
    EXPECT_THROW(build_grid(ctx, spec), invalid_argument);
    EXPECT_THROW(Grid(ctx, {1.0, 0.5}), invalid_argument);
    EXPECT_THROW(Grid(ctx, {1.0, 1.0, 1.0, 2.0}), invalid_argument);
}
