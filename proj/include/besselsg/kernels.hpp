#pragma once

// Pointwise Poisson and heat kernels of the Bessel operator and the analytic
// derivatives of the Poisson kernel, all in the theta-integral form.
//
// With delta = (x-y)^2 + t^2, b = 2xy and u = 1 - cos th the Poisson
// denominator is D = delta + b u; under the map u = c expm1(tau), c = delta/b,
// it becomes D = delta e^tau, so every moment int w u^j D^{-k} reduces to a
// smooth sum in tau. The heat integrand exp(-xy u / t) uses c = t/(xy).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "besselsg/error.hpp"
#include "besselsg/measure.hpp"
#include "besselsg/quadrature.hpp"

namespace besselsg {

struct KernelPoint {
    double t = 1.0;
    double x = 1.0;
    double y = 1.0;
};

inline void validate_point(const KernelPoint& p) {
    if (!(p.t > 0.0) || !(p.x > 0.0) || !(p.y > 0.0) || !std::isfinite(p.t) || !std::isfinite(p.x) ||
        !std::isfinite(p.y))
        throw invalid_argument("KernelPoint: t, x, y must be positive and finite");
}

namespace detail {

inline void check_rule(const MeasureContext& ctx, const ThetaRule& rule) {
    if (ctx.lambda() != rule.lambda()) throw invalid_argument("kernel: theta rule built for a different lambda");
}

constexpr int max_ladder = 192;

/// Moments J[m] = int w D^{-(l+1+m)} and JU[m] = int w u D^{-(l+1+m)}.
struct PoissonMoments {
    std::array<double, 3> j{};
    std::array<double, 3> ju{};
};

/// Ladder order for `count` Poisson moments at map length T.
inline int poisson_order(double T, int count) {
    const int decay = static_cast<int>(std::ceil(0.35 * count * T)) + 12;
    return std::max(ThetaRule::mapped_order(T), decay);
}

inline PoissonMoments poisson_moments(const ThetaRule& rule, const JacobiRule* forced, double delta, double b,
                                      int count, bool with_u) {
    const double lambda = rule.lambda();
    PoissonMoments out;
    const double c = delta / b;
    const double ld = std::log(delta);
    if (c > mapped_flat_threshold) {
        for (int m = 0; m < count; ++m) {
            out.j[m] = rule.total_weight() * std::exp(-(lambda + 1.0 + m) * ld);
            out.ju[m] = with_u ? out.j[m] : 0.0;
        }
        return out;
    }
    const double T = std::log1p(2.0 / c);
    const JacobiRule& r = forced ? *forced : rule.ladder_at_least(poisson_order(T, count));
    const int n = r.order;
    std::array<double, max_ladder> tau{}, lphi{};
    for (int k = 0; k < n; ++k) {
        tau[k] = 0.5 * T * (1.0 + r.nodes[k]);
        if (lambda != 1.0) lphi[k] = std::log(phi(tau[k]));
    }
    std::array<double, 3> sj{}, su{};
    for (int k = 0; k < n; ++k) {
        const double g =
            r.weights[k] * (lambda != 1.0 ? std::exp((lambda - 1.0) * (lphi[k] + lphi[n - 1 - k]) - tau[k])
                                          : std::exp(-tau[k]));
        const double em1 = std::expm1(tau[k]);
        const double inv = 1.0 / (1.0 + em1);
        double gm = g;
        for (int m = 0; m < count; ++m) {
            sj[m] += gm;
            if (with_u) su[m] += gm * em1;
            gm *= inv;
        }
    }
    const double lscale = (2.0 * lambda - 1.0) * std::log(0.5 * c * T);
    for (int m = 0; m < count; ++m) {
        const double pref = std::exp(lscale - (lambda + 1.0 + m) * ld);
        out.j[m] = pref * sj[m];
        out.ju[m] = with_u ? pref * c * su[m] : 0.0;
    }
    return out;
}

/// Map length beyond which the heat integrand is truncated.
inline int heat_order(double T) {
    return std::max(ThetaRule::mapped_order(T), static_cast<int>(std::ceil(12.0 + 8.0 * T)));
}

/// log of int w exp(-u / c) (the heat theta-integral in scale form).
inline double heat_log_integral(const ThetaRule& rule, double c, int level) {
    const double lambda = rule.lambda();
    if (c > mapped_flat_threshold) return std::log(rule.total_weight());
    const double T = std::log1p(2.0 / c);
    const double cut = ThetaRule::heat_cut;
    double s = 0.0;
    if (T > cut) {
        const JacobiRule& r = rule.cut_rule(level > 0);
        for (int k = 0; k < r.order; ++k) {
            const double tau = 0.5 * cut * (1.0 + r.nodes[k]);
            const double em1 = std::expm1(tau);
            double e = tau - em1;
            if (lambda != 1.0) e += (lambda - 1.0) * (std::log(phi(tau)) + std::log(2.0 - c * em1));
            s += r.weights[k] * std::exp(e);
        }
        return std::log(s) + lambda * std::log(0.5 * c * cut);
    }
    const JacobiRule* r = &rule.ladder_at_least(heat_order(T));
    if (level > 0) r = &rule.ladder_next(*r);
    const int n = r->order;
    std::array<double, max_ladder> tau{}, lphi{};
    for (int k = 0; k < n; ++k) {
        tau[k] = 0.5 * T * (1.0 + r->nodes[k]);
        if (lambda != 1.0) lphi[k] = std::log(phi(tau[k]));
    }
    for (int k = 0; k < n; ++k) {
        double e = lambda * tau[k] - std::expm1(tau[k]);
        if (lambda != 1.0) e += (lambda - 1.0) * (lphi[k] + lphi[n - 1 - k]);
        s += r->weights[k] * std::exp(e);
    }
    return std::log(s) + (2.0 * lambda - 1.0) * std::log(0.5 * c * T);
}

/// log of 2^{(1-2l)/2} / (Gamma(l) sqrt(pi)).
inline double heat_log_constant(double lambda) {
    return 0.5 * (1.0 - 2.0 * lambda) * std::numbers::ln2 - std::lgamma(lambda) - 0.5 * std::log(std::numbers::pi);
}

inline double heat_value(const ThetaRule& rule, double t, double x, double y, int level = 0) {
    const double lambda = rule.lambda();
    const double d = x - y;
    const double li = heat_log_integral(rule, t / (x * y), level);
    return std::exp(heat_log_constant(lambda) - (lambda + 0.5) * std::log(t) - d * d / (2.0 * t) + li);
}

inline double poisson_value(const ThetaRule& rule, double t, double x, double y) {
    const double d = x - y;
    const auto mo = poisson_moments(rule, nullptr, d * d + t * t, 2.0 * x * y, 1, false);
    return 2.0 * rule.lambda() * t / std::numbers::pi * mo.j[0];
}

/// Poisson kernel quantities from one set of moments.
enum class PoissonQuantity { value, dt, dx, dxdt, dydt };

struct SignedWithScale {
    double value;
    double scale;  // same expression with every term taken in absolute value
};

inline SignedWithScale poisson_quantity(const ThetaRule& rule, const JacobiRule* forced, PoissonQuantity q,
                                        double t, double x, double y) {
    const double lambda = rule.lambda();
    const double k = 2.0 * lambda / std::numbers::pi;
    const double d = x - y;
    const double delta = d * d + t * t, b = 2.0 * x * y;
    switch (q) {
        case PoissonQuantity::value: {
            const auto mo = poisson_moments(rule, forced, delta, b, 1, false);
            const double v = k * t * mo.j[0];
            return {v, v};
        }
        case PoissonQuantity::dt: {
            const auto mo = poisson_moments(rule, forced, delta, b, 2, false);
            const double a = mo.j[0], c = 2.0 * (lambda + 1.0) * t * t * mo.j[1];
            return {k * (a - c), k * (a + c)};
        }
        case PoissonQuantity::dx: {
            const auto mo = poisson_moments(rule, forced, delta, b, 2, true);
            const double a = 2.0 * d * mo.j[1], c = 2.0 * y * mo.ju[1];
            const double f = k * t * (lambda + 1.0);
            return {-f * (a + c), f * (std::abs(a) + c)};
        }
        case PoissonQuantity::dxdt:
        case PoissonQuantity::dydt: {
            const auto mo = poisson_moments(rule, forced, delta, b, 3, true);
            const double dd = q == PoissonQuantity::dxdt ? d : -d;
            const double other = q == PoissonQuantity::dxdt ? y : x;
            const double a1 = 2.0 * dd * mo.j[1], c1 = 2.0 * other * mo.ju[1];
            const double tt = 2.0 * (lambda + 2.0) * t * t;
            const double a2 = tt * 2.0 * dd * mo.j[2], c2 = tt * 2.0 * other * mo.ju[2];
            const double f = k * (lambda + 1.0);
            return {-f * ((a1 + c1) - (a2 + c2)), f * (std::abs(a1) + c1 + std::abs(a2) + c2)};
        }
    }
    return {0.0, 0.0};
}

inline Estimate checked_poisson(const MeasureContext& ctx, const KernelPoint& p, const ThetaRule& rule,
                                PoissonQuantity q, const char* name) {
    validate_point(p);
    check_rule(ctx, rule);
    const double d = p.x - p.y;
    const double delta = d * d + p.t * p.t, b = 2.0 * p.x * p.y;
    const double c = delta / b;
    const auto lo = poisson_quantity(rule, nullptr, q, p.t, p.x, p.y);
    if (c > mapped_flat_threshold) return {lo.value, 0.0};
    const int count = q == PoissonQuantity::value ? 1 : (q == PoissonQuantity::dt || q == PoissonQuantity::dx) ? 2 : 3;
    const double T = std::log1p(2.0 / c);
    const JacobiRule& r1 = rule.ladder_at_least(poisson_order(T, count));
    const auto hi = poisson_quantity(rule, &rule.ladder_next(r1), q, p.t, p.x, p.y);
    const double err = std::abs(hi.value - lo.value);
    if (!std::isfinite(hi.value)) throw evaluation_error(std::string(name) + ": non-finite kernel", p.y);
    if (err > rule.tolerance() * hi.scale) throw accuracy_error(name, err, rule.tolerance() * hi.scale);
    return {hi.value, err};
}

}  // namespace detail

/// P_t(x, y); the error field is the difference between two quadrature orders.
inline Estimate poisson_kernel(const MeasureContext& ctx, const KernelPoint& p, const ThetaRule& rule) {
    return detail::checked_poisson(ctx, p, rule, detail::PoissonQuantity::value, "poisson_kernel");
}
inline Estimate poisson_kernel_dt(const MeasureContext& ctx, const KernelPoint& p, const ThetaRule& rule) {
    return detail::checked_poisson(ctx, p, rule, detail::PoissonQuantity::dt, "poisson_kernel_dt");
}
inline Estimate poisson_kernel_dx(const MeasureContext& ctx, const KernelPoint& p, const ThetaRule& rule) {
    return detail::checked_poisson(ctx, p, rule, detail::PoissonQuantity::dx, "poisson_kernel_dx");
}
inline Estimate poisson_kernel_dxdt(const MeasureContext& ctx, const KernelPoint& p, const ThetaRule& rule) {
    return detail::checked_poisson(ctx, p, rule, detail::PoissonQuantity::dxdt, "poisson_kernel_dxdt");
}
inline Estimate poisson_kernel_dydt(const MeasureContext& ctx, const KernelPoint& p, const ThetaRule& rule) {
    return detail::checked_poisson(ctx, p, rule, detail::PoissonQuantity::dydt, "poisson_kernel_dydt");
}

/// W_t(x, y). May underflow to 0 when (x - y)^2 / t is large.
inline Estimate heat_kernel(const MeasureContext& ctx, const KernelPoint& p, const ThetaRule& rule) {
    validate_point(p);
    detail::check_rule(ctx, rule);
    const double a = detail::heat_value(rule, p.t, p.x, p.y, 0);
    const double b = detail::heat_value(rule, p.t, p.x, p.y, 1);
    if (!std::isfinite(b)) throw evaluation_error("heat_kernel: non-finite kernel", p.y);
    const double err = std::abs(b - a);
    if (err > rule.tolerance() * b) throw accuracy_error("heat_kernel", err, rule.tolerance() * b);
    return {b, err};
}

/// Explicit majorant constant: P_t(x, y) <= poisson_majorant_constant * t / ((x-y)^2 + t^2)^{l+1}.
inline double poisson_majorant_constant(const MeasureContext& ctx) {
    return 2.0 * ctx.lambda() / std::numbers::pi * sine_power_integral(ctx.lambda());
}

/// Explicit majorant constant: W_t(x, y) <= heat_majorant_constant * t^{-l-1/2} e^{-(x-y)^2/(2t)}.
inline double heat_majorant_constant(const MeasureContext& ctx) {
    return std::exp(detail::heat_log_constant(ctx.lambda())) * sine_power_integral(ctx.lambda());
}

enum class BoundKind { P_t1, P_t2, dx_1, dx_2, dt_1, dt_2, dxdt_1, dxdt_2, measure_form };

inline constexpr std::array<BoundKind, 9> all_bound_kinds{
    BoundKind::P_t1, BoundKind::P_t2, BoundKind::dx_1,   BoundKind::dx_2,        BoundKind::dt_1,
    BoundKind::dt_2, BoundKind::dxdt_1, BoundKind::dxdt_2, BoundKind::measure_form};

inline std::string to_string(BoundKind k) {
    switch (k) {
        case BoundKind::P_t1: return "P_t1";
        case BoundKind::P_t2: return "P_t2";
        case BoundKind::dx_1: return "dx_1";
        case BoundKind::dx_2: return "dx_2";
        case BoundKind::dt_1: return "dt_1";
        case BoundKind::dt_2: return "dt_2";
        case BoundKind::dxdt_1: return "dxdt_1";
        case BoundKind::dxdt_2: return "dxdt_2";
        case BoundKind::measure_form: return "measure_form";
    }
    return "?";
}

inline BoundKind parse_bound_kind(const std::string& s) {
    for (BoundKind k : all_bound_kinds)
        if (to_string(k) == s) return k;
    throw invalid_argument("unknown bound kind '" + s + "'");
}

/// Constant-free right-hand side of the kernel bound of the given kind.
/// measure_form is +inf on the diagonal x = y.
inline double bound_envelope(const MeasureContext& ctx, BoundKind kind, const KernelPoint& p) {
    validate_point(p);
    const double l = ctx.lambda();
    const double r = std::abs(p.x - p.y);
    const double q = r * r + p.t * p.t;
    const double xy = std::pow(p.x * p.y, l);
    switch (kind) {
        case BoundKind::P_t1: return p.t / std::pow(q, l + 1.0);
        case BoundKind::P_t2: return p.t / (xy * q);
        case BoundKind::dx_1: return p.t / std::pow(q, l + 1.5);
        case BoundKind::dx_2: return p.t / (xy * std::pow(q, 1.5));
        case BoundKind::dt_1: return 1.0 / std::pow(q, l + 1.0);
        case BoundKind::dt_2: return 1.0 / (xy * q);
        case BoundKind::dxdt_1: return 1.0 / std::pow(q, l + 1.5);
        case BoundKind::dxdt_2: return 1.0 / (xy * std::pow(q, 1.5));
        case BoundKind::measure_form: {
            if (r == 0.0) return std::numeric_limits<double>::infinity();
            const double m = measure_of_interval(ctx, interval_normalize(p.y, r));
            return 1.0 / (m * (r + p.t) * (r + p.t));
        }
    }
    return 0.0;
}

/// The kernel side |...| that the envelope of `kind` bounds.
inline double bound_kernel_side(const MeasureContext& ctx, BoundKind kind, const KernelPoint& p,
                                const ThetaRule& rule) {
    switch (kind) {
        case BoundKind::P_t1:
        case BoundKind::P_t2: return std::abs(poisson_kernel(ctx, p, rule).value);
        case BoundKind::dx_1:
        case BoundKind::dx_2: return std::abs(poisson_kernel_dx(ctx, p, rule).value);
        case BoundKind::dt_1:
        case BoundKind::dt_2: return std::abs(poisson_kernel_dt(ctx, p, rule).value);
        case BoundKind::dxdt_1:
        case BoundKind::dxdt_2:
            return std::abs(poisson_kernel_dxdt(ctx, p, rule).value) +
                   std::abs(poisson_kernel_dydt(ctx, p, rule).value);
        case BoundKind::measure_form: return std::abs(poisson_kernel_dydt(ctx, p, rule).value);
    }
    return 0.0;
}

inline double bound_ratio(const MeasureContext& ctx, BoundKind kind, const KernelPoint& p, const ThetaRule& rule) {
    return bound_kernel_side(ctx, kind, p, rule) / bound_envelope(ctx, kind, p);
}

/// max over the cloud of |kernel quantity| / envelope.
inline double fit_bound_constant(const MeasureContext& ctx, BoundKind kind, const std::vector<KernelPoint>& cloud,
                                 const ThetaRule& rule) {
    if (cloud.empty()) throw invalid_argument("fit_bound_constant: empty cloud");
    double c = 0.0;
    for (const auto& p : cloud) c = std::max(c, bound_ratio(ctx, kind, p, rule));
    return c;
}

struct CloudSpec {
    double lo = 1e-2;
    double hi = 1e2;
    double near_diagonal_fraction = 0.25;
    double near_diagonal_gap = 1e-2;  // |x - y| < gap * min(x, y)
};

/// Log-uniform (t, x, y) cloud with a forced near-diagonal share.
inline std::vector<KernelPoint> sample_cloud(std::size_t n, std::uint64_t seed, const CloudSpec& spec = {}) {
    if (!(spec.hi > spec.lo) || !(spec.lo > 0.0)) throw invalid_argument("sample_cloud: bad range");
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double llo = std::log(spec.lo), lhi = std::log(spec.hi);
    auto draw = [&] { return std::exp(llo + (lhi - llo) * unit(gen)); };
    const auto n_diag = static_cast<std::size_t>(std::llround(spec.near_diagonal_fraction * static_cast<double>(n)));
    std::vector<KernelPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        KernelPoint p{draw(), draw(), draw()};
        if (i < n_diag) {
            const double gap = spec.near_diagonal_gap * p.x * (2.0 * unit(gen) - 1.0);
            p.y = std::clamp(p.x + gap / (1.0 + spec.near_diagonal_gap), spec.lo, spec.hi);
            if (p.y == p.x) p.y = std::nextafter(p.x, spec.hi);
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace besselsg
