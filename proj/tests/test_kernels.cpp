#include <gtest/gtest.h>

#include "besselsg/kernels.hpp"
#include "support.hpp"

using namespace besselsg;
using besselsg::testing::Gen;
using besselsg::testing::rel_err;

namespace {

struct Reference {
    double lambda, t, x, y, P, W, dt, dx, dydt;
};

const Reference references[] = {
#include "kernel_reference.inc"
};

double poisson_lambda_one(double t, double x, double y) {
    const double a = (x - y) * (x - y) + t * t, b = (x + y) * (x + y) + t * t;
    return 4.0 * t / (std::numbers::pi * a * b);
}

// symbolic derivatives of the closed form above
double poisson_lambda_one_dt(double t, double x, double y) {
    const double a = (x - y) * (x - y) + t * t, b = (x + y) * (x + y) + t * t;
    return 4.0 / std::numbers::pi * (1.0 / (a * b) - 2.0 * t * t * (a + b) / (a * a * b * b));
}

double poisson_lambda_one_dx(double t, double x, double y) {
    const double a = (x - y) * (x - y) + t * t, b = (x + y) * (x + y) + t * t;
    return -4.0 * t / std::numbers::pi * (2.0 * (x - y) * b + 2.0 * (x + y) * a) / (a * a * b * b);
}

// Richardson-extrapolated central difference: (4 D(h/2) - D(h)) / 3
template <class F>
double richardson(F f, double z, double h) {
    const double d1 = (f(z + h) - f(z - h)) / (2 * h);
    const double d2 = (f(z + h / 2) - f(z - h / 2)) / h;
    return (4 * d2 - d1) / 3;
}

}  // namespace

TEST(Kernels, FrozenHighPrecisionReferences) {
    for (const auto& r : references) {
        const MeasureContext ctx(r.lambda);
        const auto rule = theta_rule(ctx, 16);
        const KernelPoint p{r.t, r.x, r.y};
        EXPECT_LT(rel_err(poisson_kernel(ctx, p, rule).value, r.P), 1e-12) << r.lambda << " " << r.t;
        EXPECT_LT(rel_err(heat_kernel(ctx, p, rule).value, r.W), 1e-11) << r.lambda << " " << r.t;
        EXPECT_LT(rel_err(poisson_kernel_dt(ctx, p, rule).value, r.dt), 1e-10) << r.lambda << " " << r.t;
        EXPECT_LT(rel_err(poisson_kernel_dx(ctx, p, rule).value, r.dx), 1e-10) << r.lambda << " " << r.t;
        EXPECT_LT(rel_err(poisson_kernel_dydt(ctx, p, rule).value, r.dydt), 1e-9) << r.lambda << " " << r.t;
    }
}

TEST(Kernels, LambdaOneClosedFormExample) {
    const MeasureContext ctx(1.0);
    const auto rule = theta_rule(ctx, 16);
    EXPECT_NEAR(poisson_kernel(ctx, {1, 1, 1}, rule).value, 4.0 / (5.0 * std::numbers::pi), 1e-15);
}

TEST(Kernels, LambdaOneClosedFormCloud) {
    const MeasureContext ctx(1.0);
    const auto rule = theta_rule(ctx, 16);
    Gen g(41);
    for (int i = 0; i < 20000; ++i) {
        const double t = g.log_uniform(1e-5, 1e4), x = g.log_uniform(1e-5, 1e4);
        const double y = g.coin(0.3) ? x * (1 + g.uniform(-1e-4, 1e-4)) : g.log_uniform(1e-5, 1e4);
        const double got = poisson_kernel(ctx, {t, x, y}, rule).value;
        ASSERT_LT(rel_err(got, poisson_lambda_one(t, x, y)), 1e-12) << t << " " << x << " " << y;
        ASSERT_LT(std::abs(poisson_kernel_dt(ctx, {t, x, y}, rule).value - poisson_lambda_one_dt(t, x, y)),
                  1e-11 * poisson_lambda_one(t, x, y) / t)
            << t << " " << x << " " << y;
        ASSERT_LT(std::abs(poisson_kernel_dx(ctx, {t, x, y}, rule).value - poisson_lambda_one_dx(t, x, y)),
                  1e-11 * poisson_lambda_one(t, x, y) / std::min(t, x))
            << t << " " << x << " " << y;
    }
}

TEST(Kernels, HotPathMatchesCheckedValue) {
    Gen g(42);
    for (int i = 0; i < 3000; ++i) {
        const MeasureContext ctx(g.lambda());
        const auto rule = theta_rule(ctx, 16);
        const double t = g.log_uniform(1e-6, 1e4), x = g.log_uniform(1e-5, 1e5);
        const double y = g.coin(0.3) ? x * (1 + g.uniform(-1e-6, 1e-6)) : g.log_uniform(1e-5, 1e5);
        const auto p = poisson_kernel(ctx, {t, x, y}, rule);
        EXPECT_LT(rel_err(detail::poisson_value(rule, t, x, y), p.value), 1e-13) << ctx.lambda() << " " << t << " " << x << " " << y;
        const auto w = heat_kernel(ctx, {t, x, y}, rule);
        if (w.value > 1e-250)
            EXPECT_LT(rel_err(detail::heat_value(rule, t, x, y), w.value), 1e-12)
                << ctx.lambda() << " " << t << " " << x << " " << y;
    }
}

TEST(Kernels, PositivityAndSymmetry) {
    Gen g(43);
    for (int i = 0; i < 3000; ++i) {
        const MeasureContext ctx(g.lambda());
        const auto rule = theta_rule(ctx, 16);
        const double t = g.log_uniform(1e-3, 1e3), x = g.log_uniform(1e-3, 1e3), y = g.log_uniform(1e-3, 1e3);
        const double p1 = poisson_kernel(ctx, {t, x, y}, rule).value, p2 = poisson_kernel(ctx, {t, y, x}, rule).value;
        EXPECT_GT(p1, 0.0);
        EXPECT_LT(rel_err(p1, p2), 1e-13);
        const double w1 = heat_kernel(ctx, {t, x, y}, rule).value, w2 = heat_kernel(ctx, {t, y, x}, rule).value;
        EXPECT_GE(w1, 0.0);
        if ((x - y) * (x - y) / (2 * t) < 600) {
            EXPECT_GT(w1, 0.0);
            EXPECT_LT(rel_err(w1, w2), 1e-13);
        }
    }
}

TEST(Kernels, HeatScaling) {
    Gen g(44);
    for (int i = 0; i < 500; ++i) {
        const MeasureContext ctx(g.lambda());
        const auto rule = theta_rule(ctx, 16);
        const double t = g.log_uniform(1e-2, 1e2), x = g.log_uniform(1e-2, 1e2), y = x * g.log_uniform(0.5, 2.0);
        const double c = 2.0;
        const double a = heat_kernel(ctx, {c * c * t, c * x, c * y}, rule).value;
        const double b = std::pow(c, -(ctx.power() + 1)) * heat_kernel(ctx, {t, x, y}, rule).value;
        EXPECT_LT(rel_err(a, b), 1e-12);
    }
}

TEST(Kernels, ConservationThroughHalfLineIntegral) {
    for (double l : {0.3, 0.5, 1.0, 2.5}) {
        const MeasureContext ctx(l);
        const auto rule = theta_rule(ctx, 16);
        for (double x : {0.01, 1.0, 30.0}) {
            for (double t : {0.01, 1.0, 30.0}) {
                std::vector<double> bp;
                for (int k = -12; k <= 12; ++k) {
                    const double s = std::ldexp(t, k);
                    if (x - s > 0) bp.push_back(x - s);
                    bp.push_back(x + s);
                }
                const HalfLineRule hl(ctx, bp, 1e-10);
                const double C1 = poisson_majorant_constant(ctx);
                TailMajorant pm{[=](double y) { return C1 * t * std::pow(y, 2 * l) / std::pow((y - x) * (y - x) + t * t, l + 1); },
                                [=](double R) { const double Z = R - x; return C1 * t * std::pow(R / Z, 2 * l) / Z; }};
                const auto P = integrate_halfline(ctx, [&](double y) { return detail::poisson_value(rule, t, x, y); }, hl, pm);
                EXPECT_NEAR(P.value, 1.0, 1e-9) << l << " " << x << " " << t;
                const double CW = heat_majorant_constant(ctx);
                TailMajorant wm{[=](double y) { return CW * std::pow(t, -l - 0.5) * std::pow(y, 2 * l) * std::exp(-(y - x) * (y - x) / (2 * t)); },
                                [=](double R) {
                                    const double Z = R - x;
                                    const double q = 2 * l;
                                    if (Z * Z <= 2 * q * t) return std::numeric_limits<double>::infinity();
                                    return CW * std::pow(t, -l - 0.5) * std::pow(R / Z, q) * std::pow(Z, q) *
                                           std::exp(-Z * Z / (2 * t)) / (Z / t - q / Z);
                                }};
                const auto W = integrate_halfline(ctx, [&](double y) { return detail::heat_value(rule, t, x, y); }, hl, wm);
                EXPECT_NEAR(W.value, 1.0, 1e-9) << l << " " << x << " " << t;
            }
        }
    }
}

TEST(Kernels, DerivativesMatchRichardsonDifferences) {
    Gen g(45);
    for (int i = 0; i < 1000; ++i) {
        const MeasureContext ctx(g.lambda());
        const auto rule = theta_rule(ctx, 16);
        const double t = g.log_uniform(1e-2, 1e2), x = g.log_uniform(1e-2, 1e2);
        const double y = g.coin(0.25) ? x * (1 + g.uniform(-1e-2, 1e-2)) : g.log_uniform(1e-2, 1e2);
        // one fixed rule for every stencil point, so the differences see no order switching
        const JacobiRule& fixed = rule.ladder_at_least(192);
        auto P = [&](double tt, double xx, double yy) {
            return detail::poisson_quantity(rule, &fixed, detail::PoissonQuantity::value, tt, xx, yy).value;
        };
        const double gap = std::max(std::abs(x - y), t);
        // the kernel is analytic in x and y on a scale set by gap; the steps only have to keep x, y > 0
        const double ht = 1e-3 * t, hx = std::min(1e-3 * gap, 0.25 * x), hy = std::min(1e-3 * gap, 0.25 * y);
        const double fd_t = richardson([&](double s) { return P(s, x, y); }, t, ht);
        const double fd_x = richardson([&](double s) { return P(t, s, y); }, x, hx);
        const double fd_yt = richardson([&](double s) { return richardson([&](double r) { return P(r, x, s); }, t, ht); }, y, hy);
        // relative to the size of the terms that cancel inside each derivative
        using detail::PoissonQuantity;
        const double sc_t = detail::poisson_quantity(rule, nullptr, PoissonQuantity::dt, t, x, y).scale;
        const double sc_x = detail::poisson_quantity(rule, nullptr, PoissonQuantity::dx, t, x, y).scale;
        const double sc_yt = detail::poisson_quantity(rule, nullptr, PoissonQuantity::dydt, t, x, y).scale;
        // plus the roundoff floor: each Richardson level turns a noise eta into 3 eta / h
        const double eta = 3e-14 * P(t, x, y);
        EXPECT_LT(std::abs(poisson_kernel_dt(ctx, {t, x, y}, rule).value - fd_t), 1e-6 * sc_t + 3 * eta / ht);
        EXPECT_LT(std::abs(poisson_kernel_dx(ctx, {t, x, y}, rule).value - fd_x), 1e-6 * sc_x + 3 * eta / hx);
        EXPECT_LT(std::abs(poisson_kernel_dydt(ctx, {t, x, y}, rule).value - fd_yt), 1e-6 * sc_yt + 9 * eta / (ht * hy))
            << ctx.lambda() << " " << t << " " << x << " " << y;
        // x <-> y exchange relates the mixed derivatives
        EXPECT_LT(rel_err(poisson_kernel_dxdt(ctx, {t, x, y}, rule).value, poisson_kernel_dydt(ctx, {t, y, x}, rule).value), 1e-12);
    }
}

TEST(Kernels, DtNegativeOnDiagonalForSmallTime) {
    for (double l : {0.5, 1.0, 2.5}) {
        const MeasureContext ctx(l);
        const auto rule = theta_rule(ctx, 16);
        for (double x : {0.1, 1.0, 10.0}) EXPECT_LT(poisson_kernel_dt(ctx, {1e-3 * x, x, x}, rule).value, 0.0);
    }
}

TEST(Bounds, EnvelopeExamples) {
    const MeasureContext ctx(1.0);
    EXPECT_NEAR(bound_envelope(ctx, BoundKind::P_t1, {1, 1, 2}), 0.25, 1e-15);
    EXPECT_NEAR(bound_envelope(ctx, BoundKind::P_t2, {1, 1, 2}), 0.25, 1e-15);
    EXPECT_NEAR(bound_envelope(ctx, BoundKind::measure_form, {1, 4, 1}), 1.0 / ((64.0 / 3.0) * 16.0), 1e-15);
    for (BoundKind k : all_bound_kinds) EXPECT_EQ(parse_bound_kind(to_string(k)), k);
}

TEST(Bounds, PoissonMajorantIsRigorous) {
    Gen g(46);
    for (int i = 0; i < 2000; ++i) {
        const MeasureContext ctx(g.lambda());
        const auto rule = theta_rule(ctx, 16);
        const KernelPoint p{g.log_uniform(1e-3, 1e3), g.log_uniform(1e-3, 1e3), g.log_uniform(1e-3, 1e3)};
        EXPECT_LE(poisson_kernel(ctx, p, rule).value,
                  poisson_majorant_constant(ctx) * bound_envelope(ctx, BoundKind::P_t1, p) * (1 + 1e-12));
        EXPECT_LE(heat_kernel(ctx, p, rule).value,
                  heat_majorant_constant(ctx) * std::pow(p.t, -ctx.lambda() - 0.5) *
                      std::exp(-(p.x - p.y) * (p.x - p.y) / (2 * p.t)) * (1 + 1e-12));
    }
}

TEST(Bounds, FittedConstantScaleInvariant) {
    const MeasureContext ctx(1.0);
    const auto rule = theta_rule(ctx, 16);
    const auto cloud = sample_cloud(2000, 7);
    std::vector<KernelPoint> scaled;
    for (auto p : cloud) scaled.push_back({10 * p.t, 10 * p.x, 10 * p.y});
    const double a = fit_bound_constant(ctx, BoundKind::P_t1, cloud, rule);
    const double b = fit_bound_constant(ctx, BoundKind::P_t1, scaled, rule);
    EXPECT_LT(rel_err(a, b), 1e-10);
}

TEST(Bounds, CloudShape) {
    const auto cloud = sample_cloud(1000, 3);
    int diag = 0;
    for (const auto& p : cloud) {
        EXPECT_GE(p.t, 1e-2);
        EXPECT_LE(p.t, 1e2);
        if (std::abs(p.x - p.y) < 1e-2 * std::min(p.x, p.y)) ++diag;
    }
    EXPECT_GE(diag, 250);
}
