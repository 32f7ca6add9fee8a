#pragma once

// Application of the Poisson and heat semigroups to grid functions:
// P_t f(x) = int_0^inf K_t(x, y) f(y) dm_lambda(y).
//
// The y-axis is cut at the pieces of f and at x +- s 8^k (s = t for Poisson,
// sqrt(t) for heat). Each panel gets a Gauss rule whose order comes from the
// Bernstein ellipse through the nearest complex singularity of the
// integrand; the panel through the origin absorbs y^{2 lambda} into a
// Jacobi(0, 2 lambda) weight. A constant right extension c is handled as
// c + P_t(f - c), which needs no truncation since the kernel integrates to 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "besselsg/error.hpp"
#include "besselsg/grid_function.hpp"
#include "besselsg/kernels.hpp"
#include "besselsg/norms.hpp"
#include "besselsg/quadrature.hpp"
#include "besselsg/time_grid.hpp"

namespace besselsg {

enum class SemigroupKind { poisson, heat };

inline std::string to_string(SemigroupKind k) { return k == SemigroupKind::poisson ? "poisson" : "heat"; }

inline SemigroupKind parse_semigroup_kind(const std::string& s) {
    if (s == "poisson") return SemigroupKind::poisson;
    if (s == "heat") return SemigroupKind::heat;
    throw invalid_argument("unknown semigroup kind '" + s + "' (expected poisson or heat)");
}

struct ApplyOptions {
    double tolerance = 1e-10;       // per-panel target, relative to the size of f
    double tail_tolerance = 1e-10;  // certified tail bound, same scale
    int max_panel_order = 24;
    bool estimate_error = false;    // rerun every panel at a higher order
};

namespace detail {

constexpr int max_split_depth = 48;

/// Piece of f - shift, prepared for repeated application.
struct ApplyPiece {
    Piece piece;
    double abs_integral;  // int_piece |f - shift| dm_lambda
};

struct ApplyPlan {
    double lambda = 1.0;
    double shift = 0.0;
    double scale = 0.0;  // size of f - shift used for relative tolerances
    double hi = 0.0;     // end of the explicitly integrated range
    std::vector<ApplyPiece> pieces;
    // log-linear right extension f = tail_a + tail_b log(y / hi) beyond hi
    bool log_tail = false;
    double tail_a = 0.0, tail_b = 0.0;
};

inline bool piece_is_zero(const Piece& p) {
    return p.log_form ? (p.vref == 0.0 && p.slope == 0.0) : (p.va == 0.0 && p.vb == 0.0);
}

inline double piece_value(const Piece& p, double y) {
    if (p.log_form) return p.vref + p.slope * std::log(y / p.yref);
    return p.va + (p.vb - p.va) * ((y - p.a) / (p.b - p.a));
}

inline ApplyPlan make_plan(const MeasureContext& ctx, const GridFunction& f) {
    f.grid().check_context(ctx);
    ApplyPlan plan;
    plan.lambda = ctx.lambda();
    const Extension right = f.right_extension();
    if (right == Extension::none)
        throw coverage_error("apply: '" + f.label() + "' is undefined right of its grid", f.grid().hi(),
                             std::numeric_limits<double>::infinity());
    if (right == Extension::constant) plan.shift = f.values().back();
    plan.hi = f.grid().hi();
    for (double v : f.values()) plan.scale = std::max(plan.scale, std::abs(v - plan.shift));
    for_each_piece(f, 0.0, plan.hi, [&](const Piece& pc) {
        Piece q = pc;
        if (q.log_form) {
            q.vref -= plan.shift;
        } else {
            q.va -= plan.shift;
            q.vb -= plan.shift;
        }
        if (piece_is_zero(q)) return;
        plan.pieces.push_back({q, piece_abs_integral(ctx.power(), q, 0.0)});
        if (q.log_form) plan.scale = std::max({plan.scale, std::abs(q.vref), std::abs(q.slope)});
    });
    if (right == Extension::log_linear) {
        plan.log_tail = true;
        plan.tail_a = f.values().back();
        plan.tail_b = f.log_slope(true);
        plan.scale = std::max({plan.scale, std::abs(plan.tail_a), std::abs(plan.tail_b)});
    }
    return plan;
}

/// Bernstein parameter of z with respect to [a, b].
inline double bernstein_rho(std::complex<double> z, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const std::complex<double> w = (z - mid) / half;
    const std::complex<double> r = w + std::sqrt(w - 1.0) * std::sqrt(w + 1.0);
    return std::max(std::abs(r), 1.0 / std::abs(r));
}

class KernelAt {
public:
    KernelAt(const ThetaRule& rule, SemigroupKind kind, double t, double x)
        : rule_(rule), kind_(kind), t_(t), x_(x), lambda_(rule.lambda()) {
        scale_ = kind == SemigroupKind::poisson ? t : std::sqrt(t);
        if (kind == SemigroupKind::poisson) {
            // the Poisson integrand is singular on the arc |y| = sqrt(x^2 + t^2), |Im y| >= t
            for (int k = 0; k <= 16; ++k) {
                const double s = std::cos(std::numbers::pi * k / 16.0);
                sing_.emplace_back(x * s, std::sqrt(t * t + x * x * (1.0 - s * s)));
            }
        } else {
            // the Gaussian grows like e^{eta^2 / 2t} off the axis; treat x +- i 2 sqrt(t) as poles
            sing_.emplace_back(x, 2.0 * scale_);
            sing_.emplace_back(-x, 2.0 * scale_);
        }
    }

    double operator()(double y) const {
        return kind_ == SemigroupKind::poisson ? poisson_value(rule_, t_, x_, y) : heat_value(rule_, t_, x_, y, 0);
    }

    double scale() const noexcept { return scale_; }
    double x() const noexcept { return x_; }

    /// Upper bound for the kernel on points at distance >= d from x.
    double bound_at_distance(double d) const {
        if (kind_ == SemigroupKind::poisson)
            return 2.0 * lambda_ / std::numbers::pi * sine_power_integral(lambda_) * t_ /
                   std::pow(d * d + t_ * t_, lambda_ + 1.0);
        return std::exp(heat_log_constant(lambda_) - (lambda_ + 0.5) * std::log(t_) - d * d / (2.0 * t_)) *
               sine_power_integral(lambda_);
    }

    /// Smallest Bernstein parameter over the kernel singularities (and the
    /// origin for panels away from it).
    double rho(double a, double b, bool include_origin) const {
        double r = std::numeric_limits<double>::infinity();
        for (const auto& z : sing_) r = std::min(r, bernstein_rho(z, a, b));
        if (include_origin) r = std::min(r, bernstein_rho({0.0, 0.0}, a, b));
        return r;
    }

    SemigroupKind kind() const noexcept { return kind_; }
    double t() const noexcept { return t_; }

private:
    const ThetaRule& rule_;
    SemigroupKind kind_;
    double t_, x_, lambda_;
    double scale_;
    std::vector<std::complex<double>> sing_;
};

struct PanelSums {
    double value = 0.0;
    double error = 0.0;
};

class PanelIntegrator {
public:
    PanelIntegrator(const MeasureContext& ctx, const KernelAt& kernel, const ApplyOptions& opt)
        : p_(ctx.power()), kernel_(kernel), opt_(opt),
          log_target_(std::log(1.0 / std::max(opt.tolerance, 1e-16))) {
        if (kernel.kind() == SemigroupKind::heat) log_target_ += 2.0;
        if (opt.max_panel_order < 2 || opt.max_panel_order > 32)
            throw invalid_argument("apply: max panel order must lie in 2..32");
    }

    /// Adds int_a^b K(y) g(y) dm_lambda for the piece g restricted to [a, b].
    void panel(const Piece& g, double a, double b, PanelSums& out, int depth = 0) const {
        const bool origin = a == 0.0;
        const double r = kernel_.rho(a, b, !origin);
        int n = static_cast<int>(std::ceil(log_target_ / (2.0 * std::log(r)))) + 2;
        n = std::max(n, 2);
        if (origin && g.log_form)
            throw invalid_argument("apply: log-form piece reaching the origin must be graded first");
        if (n > opt_.max_panel_order) {
            if (depth >= max_split_depth) throw accuracy_error("apply: panel cannot be resolved", b - a, 0.0);
            const double m = 0.5 * (a + b);
            panel(g, a, m, out, depth + 1);
            panel(g, m, b, out, depth + 1);
            return;
        }
        const double v = origin ? origin_sum(g, b, n) : gauss_sum(g, a, b, n);
        out.value += v;
        if (opt_.estimate_error) {
            const int n2 = std::min(2 * n, 32);
            const double v2 = origin ? origin_sum(g, b, n2) : gauss_sum(g, a, b, n2);
            out.error += std::abs(v2 - v);
        }
    }

private:
    double gauss_sum(const Piece& g, double a, double b, int n) const {
        const JacobiRule& gl = legendre(n);
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double y = mid + half * gl.nodes[k];
            s += gl.weights[k] * kernel_(y) * piece_value(g, y) * std::pow(y, p_);
        }
        const double v = half * s;
        if (!std::isfinite(v)) throw evaluation_error("apply: non-finite integrand on a panel", a);
        return v;
    }

    double origin_sum(const Piece& g, double b, int n) const {
        auto& slot = origin_rules_[n];
        if (!slot) slot = shared_gauss_jacobi(n, 0.0, p_);
        const JacobiRule& r = *slot;
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double y = 0.5 * b * (1.0 + r.nodes[k]);
            s += r.weights[k] * kernel_(y) * piece_value(g, y);
        }
        const double v = std::pow(0.5 * b, p_ + 1.0) * s;
        if (!std::isfinite(v)) throw evaluation_error("apply: non-finite integrand on the origin panel", b);
        return v;
    }

    double p_;
    const KernelAt& kernel_;
    const ApplyOptions& opt_;
    double log_target_;
    mutable std::array<std::shared_ptr<const JacobiRule>, 33> origin_rules_{};
};

/// Tail bound for int_R^inf K |A + B log(y / hi)| dm_lambda, R >= max(2x, hi).
inline double log_tail_bound(const KernelAt& k, double lambda, double R, double hi, double A, double B) {
    const double a = std::abs(A) + std::abs(B) * std::log(R / hi), b = std::abs(B);
    const double x = k.x(), t = k.t();
    if (k.kind() == SemigroupKind::poisson) {
        // K <= C t (y - x)^{-2l-2} and y - x >= y (1 - x/R)
        const double c1 = 2.0 * lambda / std::numbers::pi * sine_power_integral(lambda);
        const double kappa = std::pow(1.0 - x / R, -2.0 * lambda - 2.0);
        return c1 * t * kappa * (a + b) / R;
    }
    // y^{2l} <= 4^l (y - x)^{2l}; log(y / hi) <= log(R / hi) + (y - R) / R
    const double U = R - x;
    const double q = 2.0 * lambda + 1.0;
    if (U * U < 2.0 * q * t) return std::numeric_limits<double>::infinity();
    const double cw = std::exp(heat_log_constant(lambda) - (lambda + 0.5) * std::log(t)) * sine_power_integral(lambda);
    const double g = std::exp(-U * U / (4.0 * t)) * std::sqrt(std::numbers::pi * t) *
                     std::erfc(U / (2.0 * std::sqrt(t)));
    return cw * std::pow(4.0, lambda) * (a * std::pow(U, 2.0 * lambda) + b / R * std::pow(U, q)) * g;
}

/// P_t f(x) for a prepared plan.
inline Estimate apply_at(const MeasureContext& ctx, const ThetaRule& rule, SemigroupKind kind, const ApplyPlan& plan,
                         double t, double x, const ApplyOptions& opt) {
    if (!(t > 0.0) || !std::isfinite(t)) throw invalid_argument("apply: t must be positive");
    if (!(x > 0.0) || !std::isfinite(x)) throw invalid_argument("apply: x must be positive");
    if (plan.pieces.empty() && !plan.log_tail) return {plan.shift, 0.0};

    const KernelAt kernel(rule, kind, t, x);
    const double abs_tol = opt.tolerance * std::max(plan.scale, std::numeric_limits<double>::min());
    const double tail_tol = opt.tail_tolerance * std::max(plan.scale, std::numeric_limits<double>::min());
    const double skip_tol = 1e-3 * abs_tol;
    const PanelIntegrator integ(ctx, kernel, opt);
    PanelSums sums;
    double skipped = 0.0, tail = 0.0;

    double R = plan.hi;
    if (plan.log_tail) {
        R = std::max({2.0 * plan.hi, 2.0 * x, x + 8.0 * kernel.scale()});
        int doublings = 0;
        while (!(log_tail_bound(kernel, ctx.lambda(), R, plan.hi, plan.tail_a, plan.tail_b) <= tail_tol)) {
            if (++doublings > 2000) throw truncation_error("apply: tail bound never met tolerance");
            R *= 2.0;
        }
        tail = log_tail_bound(kernel, ctx.lambda(), R, plan.hi, plan.tail_a, plan.tail_b);
        const double next = log_tail_bound(kernel, ctx.lambda(), 1.001 * R, plan.hi, plan.tail_a, plan.tail_b);
        if (!(next <= tail))
            throw truncation_error("apply: tail majorant not decreasing at truncation radius " + std::to_string(R) +
                                   " (x = " + std::to_string(x) + ")");
    }

    // kernel breakpoints x +- s 8^k
    std::vector<double> kb{x};
    for (double d = kernel.scale(); kb.size() < 800; d *= 8.0) {
        if (x - d > 0.0) kb.push_back(x - d);
        if (x + d >= R) break;
        kb.push_back(x + d);
    }
    std::sort(kb.begin(), kb.end());

    auto do_piece = [&](const Piece& g, double abs_integral) {
        // whole piece negligible?
        const double dist = x < g.a ? g.a - x : (x > g.b ? x - g.b : 0.0);
        if (dist > 0.0) {
            const double bound = kernel.bound_at_distance(dist) * abs_integral;
            if (bound <= skip_tol) {
                skipped += bound;
                return;
            }
        }
        double lo = g.a;
        // a log piece reaching the origin: grade geometrically, bound the remainder
        if (g.log_form && lo == 0.0) {
            double eps = std::min(g.b, x) * 0.5;
            if (!(eps > 0.0)) eps = 0.5 * g.b;
            for (int level = 0; level < 4000; ++level) {
                Piece rest = g;
                rest.b = eps;
                const double kmax = eps < x ? kernel.bound_at_distance(x - eps) : kernel.bound_at_distance(0.0);
                const double bound = kmax * piece_abs_integral(ctx.power(), rest, 0.0);
                if (bound <= skip_tol) {
                    skipped += bound;
                    break;
                }
                eps *= 0.5;
            }
            lo = eps;
            // geometric panels from eps up to the next kernel breakpoint / piece end
            double a = lo;
            while (a < g.b) {
                double b = std::min(2.0 * a, g.b);
                const auto it = std::upper_bound(kb.begin(), kb.end(), a);
                if (it != kb.end() && *it < b) b = *it;
                integ.panel(g, a, b, sums);
                a = b;
            }
            return;
        }
        double a = lo;
        auto it = std::upper_bound(kb.begin(), kb.end(), a);
        while (a < g.b) {
            double b = g.b;
            if (it != kb.end() && *it < g.b) b = *it++;
            const double d = x < a ? a - x : (x > b ? x - b : 0.0);
            if (d > 0.0) {
                Piece sub = g;
                sub.a = a;
                sub.b = b;
                if (!sub.log_form) {
                    sub.va = piece_value(g, a);
                    sub.vb = piece_value(g, b);
                }
                const double bound = kernel.bound_at_distance(d) * piece_abs_integral(ctx.power(), sub, 0.0);
                if (bound <= skip_tol) {
                    skipped += bound;
                    a = b;
                    continue;
                }
            }
            integ.panel(g, a, b, sums);
            a = b;
        }
    };

    for (const auto& ap : plan.pieces) do_piece(ap.piece, ap.abs_integral);

    if (plan.log_tail) {
        const Piece g{plan.hi, R, true, 0, 0, plan.tail_a, plan.tail_b, plan.hi};
        do_piece(g, piece_abs_integral(ctx.power(), g, 0.0));
    }

    return {plan.shift + sums.value, sums.error + skipped + tail};
}

}  // namespace detail

/// P_t f(x) (or W_t f(x)) with an error estimate: the tail and skip bounds,
/// plus the panel order-doubling difference when requested.
inline Estimate apply_point(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double t, double x,
                            const ApplyOptions& opt = {}) {
    const ThetaRule rule(ctx, 16);
    const auto plan = detail::make_plan(ctx, f);
    return detail::apply_at(ctx, rule, kind, plan, t, x, opt);
}

/// Values of P_t f at the given points.
inline std::vector<double> apply_values(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f,
                                        double t, const std::vector<double>& xs, const ApplyOptions& opt = {}) {
    const ThetaRule rule(ctx, 16);
    const auto plan = detail::make_plan(ctx, f);
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = detail::apply_at(ctx, rule, kind, plan, t, xs[i], opt).value;
    return out;
}

/// f's nodes plus 10 log-spaced points on each side, one decade beyond.
inline Grid default_output_grid(const MeasureContext& ctx, const GridFunction& f) {
    std::vector<double> nodes;
    const double lo = f.grid().lo() > 0.0 ? f.grid().lo() : f.grid().nodes()[1];
    for (int k = 10; k >= 1; --k) nodes.push_back(lo * std::pow(10.0, -k / 10.0));
    for (double y : f.grid().nodes())
        if (y > 0.0) nodes.push_back(y);
    for (int k = 1; k <= 10; ++k) nodes.push_back(f.grid().hi() * std::pow(10.0, k / 10.0));
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return Grid(ctx, std::move(nodes));
}

/// P_t f sampled on out_grid. Extensions mirror those of f.
inline GridFunction apply(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double t,
                          const Grid& out_grid, const ApplyOptions& opt = {}) {
    out_grid.check_context(ctx);
    const ThetaRule rule(ctx, 16);
    const auto plan = detail::make_plan(ctx, f);
    const auto& xs = out_grid.nodes();
    std::vector<double> v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0 && xs[i] == xs[i - 1]) {
            v[i] = v[i - 1];
            continue;
        }
        if (!(xs[i] > 0.0)) {
            // the semigroup is continuous up to the origin; evaluate just inside
            const double x0 = xs[i + 1 < xs.size() ? i + 1 : i] * 1e-9;
            v[i] = detail::apply_at(ctx, rule, kind, plan, t, x0, opt).value;
            continue;
        }
        try {
            v[i] = detail::apply_at(ctx, rule, kind, plan, t, xs[i], opt).value;
        } catch (const truncation_error& e) {
            throw truncation_error(std::string(e.what()) + " [x = " + std::to_string(xs[i]) + "]");
        }
    }
    Extension left = f.left_extension(), right = f.right_extension();
    if (left == Extension::none) left = Extension::constant;
    return GridFunction(out_grid, std::move(v), (kind == SemigroupKind::poisson ? "P_t " : "W_t ") + f.label(), left,
                        right);
}

/// Grid resolving P_s f for s >= s_min: uniform step h on [0, H] and ratio
/// 1.02 beyond, up to `reach` times H.
inline Grid resolving_grid(const MeasureContext& ctx, double H, double h, double reach = 1e4) {
    if (!(H > 0.0) || !(h > 0.0)) throw invalid_argument("resolving_grid: need positive extent and step");
    std::vector<double> nodes;
    const auto n = static_cast<std::size_t>(std::ceil(H / h));
    for (std::size_t i = 0; i <= n; ++i) nodes.push_back(H * static_cast<double>(i) / static_cast<double>(n));
    for (double y = H * 1.02; y < reach * H; y *= 1.02) nodes.push_back(y);
    nodes.push_back(reach * H);
    return Grid(ctx, std::move(nodes));
}

struct MaximalResult {
    double value = 0.0;          // max_j |P_{t_j} f(x)| on the grid
    double t_at = 0.0;           // time attaining it
    double stability_gap = 0.0;  // increase under doubling the refinement
};

/// P_t f(x) at each time of `times`.
inline std::vector<double> trajectory(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double x,
                                      const std::vector<double>& times, const ApplyOptions& opt = {}) {
    const ThetaRule rule(ctx, 16);
    const auto plan = detail::make_plan(ctx, f);
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = detail::apply_at(ctx, rule, kind, plan, times[i], x, opt).value;
    return out;
}

/// Default time grid for the maximal function: t_max = 10 diam(supp f),
/// ratio 0.8, 60 anchors.
inline TimeGrid default_maximal_times(const GridFunction& f) {
    const auto [lo, hi] = f.support();
    double diam = std::isfinite(hi) ? hi - lo : f.grid().hi() - f.grid().lo();
    if (!(diam > 0.0)) diam = f.grid().hi() - f.grid().lo();
    return TimeGrid::geometric(10.0 * diam, 0.8, 60, 2);
}

/// Discrete maximal function sup_j |P_{t_j} f(x)|: a lower bound for the
/// supremum over t > 0, with its change under doubling the time refinement.
inline MaximalResult maximal(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double x,
                             const TimeGrid& times, const ApplyOptions& opt = {}) {
    const TimeGrid fine = times.refined();
    const auto traj = trajectory(ctx, kind, f, x, fine.samples(), opt);
    MaximalResult r;
    double fine_max = 0.0;
    // every other fine sample is a coarse sample (interior points nest)
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double a = std::abs(traj[i]);
        fine_max = std::max(fine_max, a);
        if (i % 2 == 0 && a > r.value) {
            r.value = a;
            r.t_at = fine.samples()[i];
        }
    }
    r.stability_gap = fine_max - r.value;
    return r;
}

/// sup over out_grid of |P_t(P_s f) - P_{s+t} f|. The intermediate P_s f is
/// sampled on `mid_grid`.
inline double semigroup_defect(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double s,
                               double t, const Grid& mid_grid, const Grid& out_grid, const ApplyOptions& opt = {}) {
    if (!(s > 0.0) || !(t > 0.0)) throw invalid_argument("semigroup_defect: times must be positive");
    GridFunction ps = apply(ctx, kind, f, s, mid_grid, opt);
    // P_s f outside mid_grid: the far tail is dropped, constants are kept
    if (f.right_extension() == Extension::zero)
        ps = GridFunction(ps.grid(), ps.values(), ps.label(), ps.left_extension(), Extension::zero);
    const auto lhs = apply(ctx, kind, ps, t, out_grid, opt);
    const auto rhs = apply(ctx, kind, f, s + t, out_grid, opt);
    double d = 0.0;
    for (std::size_t i = 0; i < out_grid.size(); ++i) d = std::max(d, std::abs(lhs.values()[i] - rhs.values()[i]));
    return d;
}

/// Defect with a resolving intermediate grid built from the support of f.
inline double semigroup_defect(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double s,
                               double t, const Grid& out_grid, const ApplyOptions& opt = {}) {
    const auto [lo, hi] = f.support();
    const double H = std::isfinite(hi) ? hi + 4.0 * s : f.grid().hi();
    const double h = std::min(kind == SemigroupKind::poisson ? s : std::sqrt(s), H) / 48.0;
    (void)lo;
    return semigroup_defect(ctx, kind, f, s, t, resolving_grid(ctx, H, h), out_grid, opt);
}

/// ||P_t f||_p / ||f||_p with P_t f sampled on out_grid.
inline double contraction_check(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double t,
                                double p, const Grid& out_grid, const ApplyOptions& opt = {}) {
    const double nf = lp_norm(ctx, f, p);
    if (!(nf > 0.0)) throw invalid_argument("contraction_check: ratio undefined for a zero-norm function");
    const auto g = apply(ctx, kind, f, t, out_grid, opt);
    return lp_norm(ctx, g, p) / nf;
}

}  // namespace besselsg
