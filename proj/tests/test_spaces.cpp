#include <gtest/gtest.h>

#include "besselsg/spaces.hpp"
#include "support.hpp"

using namespace besselsg;
using besselsg::testing::Gen;

namespace {

GridFunction indicator(const MeasureContext& ctx, double a, double b, double h) {
    return GridFunction(Grid(ctx, {a, b}), {h, h}, "indicator");
}

Interval random_interval(Gen& gen) {
    return interval_normalize(gen.log_uniform(1e-2, 1e2), gen.log_uniform(1e-3, 1e2));
}

// random piecewise-linear function with a few jumps, zero outside its grid
GridFunction random_function(const MeasureContext& ctx, Gen& gen) {
    std::vector<double> nodes, values;
    double y = gen.log_uniform(1e-3, 1.0);
    const int n = gen.integer(3, 40);
    for (int i = 0; i < n; ++i) {
        nodes.push_back(y);
        values.push_back(gen.uniform(-5.0, 5.0));
        if (gen.coin(0.15)) {
            nodes.push_back(y);
            values.push_back(gen.uniform(-5.0, 5.0));
        }
        y += gen.log_uniform(1e-3, 1.0) * y + 1e-3;
    }
    return GridFunction(Grid(ctx, nodes), values, "random");
}

}  // namespace

TEST(Norms, Examples) {
    const MeasureContext ctx(1.0);
    EXPECT_NEAR(lp_norm(ctx, indicator(ctx, 1.0, 3.0, 1.0), 1.0), 26.0 / 3.0, 1e-13);
    const GridFunction two(Grid(ctx, {1.0, 2.0}), {-2.0, 1.0});
    EXPECT_EQ(lp_norm(ctx, two, INFINITY), 2.0);
    EXPECT_THROW(lp_norm(ctx, two, 0.5), invalid_argument);
    const double h = 3.5;
    EXPECT_NEAR(weak_l1(ctx, indicator(ctx, 1.0, 3.0, h)), h * 26.0 / 3.0, 1e-12);
    EXPECT_EQ(weak_l1(ctx, indicator(ctx, 1.0, 3.0, 0.0)), 0.0);
}

TEST(Norms, HomogeneityAndChebyshev) {
    Gen gen(31);
    for (int trial = 0; trial < 300; ++trial) {
        const MeasureContext ctx(gen.lambda());
        const auto f = random_function(ctx, gen);
        const double c = gen.uniform(-4.0, 4.0);
        std::vector<double> cv;
        for (double v : f.values()) cv.push_back(c * v);
        const GridFunction cf(f.grid(), cv);
        for (double p : {1.0, 1.5, 2.0, 4.0, double(INFINITY)})
            EXPECT_NEAR(lp_norm(ctx, cf, p), std::abs(c) * lp_norm(ctx, f, p), 1e-12 * (1 + lp_norm(ctx, cf, p)));
        EXPECT_LE(weak_l1(ctx, f), lp_norm(ctx, f, 1.0) * (1 + 1e-12));
    }
}

TEST(Atoms, HaarBalanceExamples) {
    const MeasureContext one(1.0);
    const auto a = make_atom(one, interval_normalize(2.0, 1.0), AtomShape::haar);
    const auto& v = a.profile.values();
    EXPECT_NEAR(v.back() / v.front(), -7.0 / 19.0, 1e-14);
    const MeasureContext half(0.5);
    const auto b = make_atom(half, interval_normalize(1.0, 1.0), AtomShape::haar);
    EXPECT_NEAR(b.profile.values().back() / b.profile.values().front(), -1.0 / 3.0, 1e-14);
    EXPECT_NEAR(mean_on_interval(one, a.profile, a.interval), 0.0, 1e-14);
}

TEST(Atoms, GeneratedAtomsValidate) {
    Gen gen(32);
    for (int trial = 0; trial < 1000; ++trial) {
        const MeasureContext ctx(gen.lambda());
        const auto I = random_interval(gen);
        const auto shape = std::array{AtomShape::haar, AtomShape::bump_pair, AtomShape::random}[gen.integer(0, 2)];
        const auto a = make_atom(ctx, I, shape, gen.integer(0, 1 << 30));
        const auto r = validate_atom(ctx, a);
        ASSERT_TRUE(r.ok()) << to_string(shape) << " " << I.left << " " << I.right << " " << r.size_slack << " "
                            << r.mean_slack;
        EXPECT_NEAR(a.profile.sup_abs() * measure_of_interval(ctx, I), 1.0, 1e-12);
    }
}

TEST(Atoms, ValidationDetectsViolations) {
    const MeasureContext ctx(1.0);
    const auto a = make_atom(ctx, interval_normalize(2.0, 1.0), AtomShape::bump_pair);
    std::vector<double> doubled;
    for (double v : a.profile.values()) doubled.push_back(2.0 * v);
    const Atom big{a.interval, GridFunction(a.profile.grid(), doubled)};
    const auto rb = validate_atom(ctx, big);
    EXPECT_FALSE(rb.size_ok);
    EXPECT_TRUE(rb.mean_ok);
    std::vector<double> shifted;
    for (double y : a.profile.grid().nodes()) shifted.push_back(y + 5.0);
    const Atom moved{a.interval, GridFunction(Grid(ctx, shifted), a.profile.values())};
    EXPECT_FALSE(validate_atom(ctx, moved).support_ok);
    EXPECT_THROW(make_atom(ctx, interval_normalize(1e8, 2e-8), AtomShape::bump_pair), resolution_error);
    EXPECT_THROW(parse_atom_shape("triangle"), invalid_argument);
    EXPECT_EQ(parse_atom_shape("bump-pair"), AtomShape::bump_pair);
}

TEST(Atoms, AtomicNorm) {
    Gen gen(33);
    const MeasureContext ctx(1.5);
    EXPECT_EQ(atomic_norm_upper(ctx, {}), 0.0);
    AtomicDecomposition single{{1.0}, {make_atom(ctx, interval_normalize(1.0, 0.5), AtomShape::haar)}};
    EXPECT_EQ(atomic_norm_upper(ctx, single), 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        AtomicDecomposition d;
        const int k = gen.integer(1, 5);
        for (int j = 0; j < k; ++j) {
            d.coefficients.push_back(gen.uniform(-2.0, 2.0));
            d.atoms.push_back(make_atom(ctx, random_interval(gen), AtomShape::random, gen.integer(0, 1000)));
        }
        const auto f = synthesize(ctx, d);
        EXPECT_LE(lp_norm(ctx, f, 1.0), atomic_norm_upper(ctx, d) * (1 + 1e-12));
    }
    AtomicDecomposition bad = single;
    bad.atoms[0].profile = GridFunction(bad.atoms[0].profile.grid(), {1e6, 1e6, -1e6, -1e6});
    try {
        atomic_norm_upper(ctx, bad);
        FAIL();
    } catch (const invalid_atom& e) {
        EXPECT_EQ(e.index(), 0u);
    }
}

TEST(BMO, ConstantsAndLogarithm) {
    const MeasureContext ctx(1.0);
    const auto c = constant_function(Grid(ctx, {0.1, 1.0, 10.0}), 4.0);
    EXPECT_EQ(bmo_norm(ctx, c).value, 0.0);
    const auto lg = sample(build_grid(ctx, {1e-3, 1e3, 241, SpacingLaw::log_uniform, {}}),
                           [](double y) { return std::log(y); }, "log", Extension::log_linear, Extension::log_linear);
    const double b1 = bmo_norm(ctx, lg, lattice_intervals(default_bmo_lattice(lg, 1))).value;
    const double b2 = bmo_norm(ctx, lg, lattice_intervals(default_bmo_lattice(lg, 2))).value;
    const double b4 = bmo_norm(ctx, lg, lattice_intervals(default_bmo_lattice(lg, 4))).value;
    EXPECT_GT(b1, 0.1);
    EXPECT_LE(b1, b2);
    EXPECT_LE(b2, b4);
    EXPECT_LT(b4 - b2, 0.05 * b4);
    EXPECT_THROW(bmo_norm(ctx, lg, {}), invalid_argument);
}

TEST(BMO, MonotoneUnderFamilyEnlargement) {
    Gen gen(34);
    for (int trial = 0; trial < 30; ++trial) {
        const MeasureContext ctx(gen.lambda());
        const auto f = random_function(ctx, gen);
        std::vector<Interval> fam;
        double prev = 0.0;
        for (int k = 0; k < 20; ++k) {
            fam.push_back(interval_normalize(gen.uniform(f.grid().lo(), f.grid().hi()), gen.log_uniform(1e-3, 10.0)));
            const double v = bmo_norm(ctx, f, fam).value;
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(BMO, MeanRegularityAcrossDilations) {
    // |f_I - f_{2^k I}| <= C k ||f||_BMO with a single C over the sample
    Gen gen(35);
    const MeasureContext ctx(1.0);
    const auto lg = sample(build_grid(ctx, {1e-4, 1e4, 321, SpacingLaw::log_uniform, {}}),
                           [](double y) { return std::log(y); }, "log", Extension::log_linear, Extension::log_linear);
    const double bmo = bmo_norm(ctx, lg).value;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto I = interval_normalize(gen.log_uniform(1e-2, 10.0), gen.log_uniform(1e-3, 1.0));
        for (int k = 1; k <= 6; ++k) {
            const double d = std::abs(mean_on_interval(ctx, lg, I) - mean_on_interval(ctx, lg, interval_dilate(I, std::ldexp(1.0, k))));
            worst = std::max(worst, d / (k * bmo));
        }
    }
    EXPECT_TRUE(std::isfinite(worst));
    EXPECT_LT(worst, 20.0);
}

TEST(CZ, NoSelectionAboveMaximalAverages) {
    const MeasureContext ctx(1.0);
    const auto f = indicator(ctx, 1.0, 3.0, 2.0);
    const auto out = cz_decompose(ctx, f, 2.5);
    EXPECT_TRUE(out.bad_parts.empty());
    EXPECT_EQ(out.good.sup_abs(), 2.0);
    EXPECT_THROW(cz_decompose(ctx, f, 0.0), invalid_argument);
    EXPECT_THROW(cz_decompose(ctx, constant_function(f.grid(), 1.0), 1.0), invalid_argument);
}

TEST(CZ, PropertiesOnRandomInputs) {
    Gen gen(36);
    double worst_measure = 0.0, worst_bad = 0.0, worst_sup = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const MeasureContext ctx(gen.lambda());
        const auto f = random_function(ctx, gen);
        const double eta = gen.log_uniform(1e-2, 10.0);
        const auto out = cz_decompose(ctx, f, eta);
        const auto r = cz_check(ctx, f, out);
        ASSERT_LT(r.reconstruction, 1e-13) << trial;
        EXPECT_EQ(r.support, 0.0);
        EXPECT_LT(r.mean_zero, 1e-10);
        EXPECT_LE(r.sup_ratio, out.sup_bound * (1 + 1e-12));
        EXPECT_LE(r.overlap, 1);
        EXPECT_LE(r.measure_ratio, 1.0 + 1e-12);
        EXPECT_LE(r.bad_l1_ratio, 2.0 + 1e-12);
        EXPECT_LE(r.good_l1_ratio, 1.0 + 1e-12);
        worst_measure = std::max(worst_measure, r.measure_ratio);
        worst_bad = std::max(worst_bad, r.bad_l1_ratio);
        worst_sup = std::max(worst_sup, r.sup_ratio);
    }
    EXPECT_GT(worst_measure, 0.0);
    EXPECT_GT(worst_bad, 0.0);
    EXPECT_GT(worst_sup, 0.0);
}
