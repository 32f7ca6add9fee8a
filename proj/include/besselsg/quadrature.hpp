#pragma once

// Integration backends.
//
// The theta-integral int_0^pi (sin th)^{2l-1} g(cos th) dth is computed in
// s = cos th against the Jacobi weight (1 - s^2)^{l-1}. Integrands that peak
// at s = 1 on a scale c (all kernels: x ~ y, t << x) are handled by the map
// u = 1 - s = c * expm1(tau), tau in [0, T], T = log1p(2/c), under which the
// weight keeps its symmetric Jacobi form in tau and the peak is spread evenly.
//
// The half-line integral int_0^inf f dm_lambda is a composite Gauss rule over
// caller-supplied breakpoints, graded toward the origin, with truncation
// certified by a caller-supplied tail majorant.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "besselsg/error.hpp"
#include "besselsg/jacobi.hpp"
#include "besselsg/measure.hpp"

namespace besselsg {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// int_0^pi (sin th)^{2 lambda - 1} dth = Gamma(lambda) sqrt(pi) / Gamma(lambda + 1/2).
inline double sine_power_integral(double lambda) {
    return std::exp(std::lgamma(lambda) - std::lgamma(lambda + 0.5)) * std::sqrt(std::numbers::pi);
}

class ThetaRule {
public:
    static constexpr std::array<int, 14> ladder_orders{8, 12, 16, 20, 24, 32, 40, 48, 64, 80, 96, 128, 160, 192};
    static constexpr double heat_cut = 4.0;  // e^{-expm1(4)} ~ 5e-24

    ThetaRule(const MeasureContext& ctx, int order, double tolerance = 1e-10)
        : lambda_(ctx.lambda()), order_(order), tolerance_(tolerance) {
        if (order < 2) throw invalid_argument("theta_rule: order must be at least 2");
        if (!(tolerance > 0.0)) throw invalid_argument("theta_rule: tolerance must be positive");
        const double a = lambda_ - 1.0;
        base_ = shared_gauss_jacobi(order, a, a);
        doubled_ = shared_gauss_jacobi(2 * order, a, a);
        for (int n : ladder_orders) ladder_.push_back(shared_gauss_jacobi(n, a, a));
        cut_ = shared_gauss_jacobi(32, 0.0, a);
        cut_fine_ = shared_gauss_jacobi(48, 0.0, a);
        total_ = sine_power_integral(lambda_);
        if (!std::isfinite(total_) || total_ == 0.0)
            throw numeric_range_error("theta_rule: weight normalization out of range");
    }

    double lambda() const noexcept { return lambda_; }
    int order() const noexcept { return order_; }
    double tolerance() const noexcept { return tolerance_; }
    /// Rule of the declared order in s = cos th.
    const JacobiRule& base() const noexcept { return *base_; }
    const JacobiRule& doubled() const noexcept { return *doubled_; }
    const std::vector<double>& nodes() const noexcept { return base_->nodes; }
    const std::vector<double>& weights() const noexcept { return base_->weights; }
    /// Closed-form total weight Gamma(l) sqrt(pi) / Gamma(l + 1/2).
    double total_weight() const noexcept { return total_; }

    /// Smallest ladder rule with at least `needed` nodes (the largest if none).
    const JacobiRule& ladder_at_least(int needed) const noexcept {
        for (const auto& r : ladder_)
            if (r->order >= needed) return *r;
        return *ladder_.back();
    }
    /// The ladder rule following `r` (or `r` itself at the top).
    const JacobiRule& ladder_next(const JacobiRule& r) const noexcept {
        for (std::size_t i = 0; i + 1 < ladder_.size(); ++i)
            if (ladder_[i]->order == r.order) return *ladder_[i + 1];
        return *ladder_.back();
    }
    /// Jacobi (0, lambda - 1) rules on the truncated heat range.
    const JacobiRule& cut_rule(bool fine) const noexcept { return fine ? *cut_fine_ : *cut_; }

    /// Ladder order for the mapped integral over tau in [0, T]. The smooth
    /// factor has branch points at tau = 2 pi i k, a strip of half-width
    /// 4 pi / T in the rule variable.
    static int mapped_order(double T) {
        if (!(T > 0.0)) return ladder_orders.front();
        const double sigma = 4.0 * std::numbers::pi / T;
        const double log_rho = std::asinh(sigma);
        return static_cast<int>(std::ceil(17.0 / log_rho)) + 4;
    }

private:
    double lambda_;
    int order_;
    double tolerance_;
    std::shared_ptr<const JacobiRule> base_, doubled_, cut_, cut_fine_;
    std::vector<std::shared_ptr<const JacobiRule>> ladder_;
    double total_ = 0.0;
};

inline ThetaRule theta_rule(const MeasureContext& ctx, int order, double tolerance = 1e-10) {
    return ThetaRule(ctx, order, tolerance);
}

/// int_0^pi (sin th)^{2l-1} g(cos th) dth with the declared-order rule; the
/// error estimate is the difference to the doubled-order rule.
template <class G>
Estimate integrate_theta(const ThetaRule& rule, G&& g) {
    auto apply = [&](const JacobiRule& r) {
        double s = 0.0;
        for (int k = 0; k < r.order; ++k) {
            const double v = g(r.nodes[k]);
            if (!std::isfinite(v)) throw evaluation_error("integrate_theta: non-finite integrand", r.nodes[k]);
            s += r.weights[k] * v;
        }
        return s;
    };
    const double coarse = apply(rule.base());
    const double fine = apply(rule.doubled());
    return {fine, std::abs(fine - coarse)};
}

namespace detail {

/// expm1(z) / z, continuous at 0.
inline double phi(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

/// Large c: the integrand is constant in u to rounding.
inline constexpr double mapped_flat_threshold = 1e14;

/// Sum_k w_k [phi(tau_k) phi(T - tau_k)]^{l-1} e^{l tau_k} h(u_k, tau_k) for
/// the symmetric ladder rule r; returns the sum without the (cT/2)^{2l-1}
/// factor.
template <class H>
double mapped_sum(const JacobiRule& r, double lambda, double c, double T, H&& h) {
    const int n = r.order;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double tau = 0.5 * T * (1.0 + r.nodes[k]);
        const double em1 = std::expm1(tau);
        double w = r.weights[k];
        if (lambda != 1.0) {
            const double tau2 = 0.5 * T * (1.0 - r.nodes[k]);
            w *= std::exp((lambda - 1.0) * (std::log(phi(tau)) + std::log(phi(tau2))) + lambda * tau);
        } else {
            w *= em1 + 1.0;
        }
        s += w * h(c * em1, tau);
    }
    return s;
}

}  // namespace detail

/// int_0^pi (sin th)^{2l-1} h(1 - cos th) dth where h(u) may peak at u = 0 on
/// scale c > 0. The estimate compares two ladder orders.
template <class H>
Estimate integrate_theta_mapped(const ThetaRule& rule, double c, H&& h) {
    if (!(c > 0.0)) throw invalid_argument("integrate_theta_mapped: scale must be positive");
    const double lambda = rule.lambda();
    if (c > detail::mapped_flat_threshold) {
        const double v = h(1.0) * rule.total_weight();
        if (!std::isfinite(v)) throw evaluation_error("integrate_theta_mapped: non-finite integrand", 1.0);
        return {v, 0.0};
    }
    const double T = std::log1p(2.0 / c);
    const double scale = std::pow(0.5 * c * T, 2.0 * lambda - 1.0);
    auto hu = [&](double u, double) {
        const double v = h(u);
        if (!std::isfinite(v)) throw evaluation_error("integrate_theta_mapped: non-finite integrand", 1.0 - u);
        return v;
    };
    const JacobiRule& r1 = rule.ladder_at_least(ThetaRule::mapped_order(T));
    const JacobiRule& r2 = rule.ladder_next(r1);
    const double a = scale * detail::mapped_sum(r1, lambda, c, T, hu);
    const double b = scale * detail::mapped_sum(r2, lambda, c, T, hu);
    return {b, std::abs(b - a)};
}

/// Tail majorant for |f(y)| y^{2 lambda} beyond the last breakpoint:
/// `density` bounds the integrand, `tail(R)` bounds int_R^inf of it.
struct TailMajorant {
    std::function<double(double)> density;
    std::function<double(double)> tail;
};

class HalfLineRule {
public:
    HalfLineRule(const MeasureContext& ctx, std::vector<double> breakpoints, double tolerance = 1e-8,
                 int panel_order = 16, int origin_levels = 30)
        : lambda_(ctx.lambda()), breakpoints_(std::move(breakpoints)), tolerance_(tolerance),
          panel_order_(panel_order), origin_levels_(origin_levels) {
        if (breakpoints_.empty()) throw invalid_argument("HalfLineRule: need at least one breakpoint");
        std::sort(breakpoints_.begin(), breakpoints_.end());
        breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
        if (!(breakpoints_.front() > 0.0))
            throw invalid_argument("HalfLineRule: breakpoints must be positive");
        if (!(tolerance > 0.0)) throw invalid_argument("HalfLineRule: tolerance must be positive");
        if (panel_order < 2 || 2 * panel_order > 32)
            throw invalid_argument("HalfLineRule: panel order must lie in 2..16");
        origin_ = shared_gauss_jacobi(panel_order, 0.0, ctx.power());
        origin_doubled_ = shared_gauss_jacobi(2 * panel_order, 0.0, ctx.power());
    }

    double lambda() const noexcept { return lambda_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    double tolerance() const noexcept { return tolerance_; }
    int panel_order() const noexcept { return panel_order_; }
    int origin_levels() const noexcept { return origin_levels_; }
    const JacobiRule& origin_rule(bool doubled) const noexcept { return doubled ? *origin_doubled_ : *origin_; }

private:
    double lambda_;
    std::vector<double> breakpoints_;
    double tolerance_;
    int panel_order_;
    int origin_levels_;
    std::shared_ptr<const JacobiRule> origin_, origin_doubled_;
};

namespace detail {

/// Gauss-Legendre sum of f(y) y^p over [a, b].
template <class F>
double panel_sum(const JacobiRule& gl, double p, double a, double b, F& f) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (int k = 0; k < gl.order; ++k) {
        const double y = mid + half * gl.nodes[k];
        const double v = f(y);
        if (!std::isfinite(v)) throw evaluation_error("integrate_halfline: non-finite integrand", y);
        s += gl.weights[k] * v * std::pow(y, p);
    }
    return half * s;
}

/// Jacobi-weighted sum of f(y) over [0, b] with y^p absorbed in the weight.
template <class F>
double origin_sum(const JacobiRule& r, double p, double b, F& f) {
    double s = 0.0;
    for (int k = 0; k < r.order; ++k) {
        const double y = 0.5 * b * (1.0 + r.nodes[k]);
        const double v = f(y);
        if (!std::isfinite(v)) throw evaluation_error("integrate_halfline: non-finite integrand", y);
        s += r.weights[k] * v;
    }
    return std::pow(0.5 * b, p + 1.0) * s;
}

}  // namespace detail

/// int_0^inf f(y) dm_lambda(y). Without a majorant f is taken to vanish past
/// the last breakpoint.
template <class F>
Estimate integrate_halfline(const MeasureContext& ctx, F&& f, const HalfLineRule& rule,
                            const std::optional<TailMajorant>& majorant = std::nullopt) {
    if (ctx.lambda() != rule.lambda()) throw invalid_argument("integrate_halfline: rule built for another lambda");
    const double p = ctx.power();
    const JacobiRule& g1 = detail::legendre(rule.panel_order());
    const JacobiRule& g2 = detail::legendre(2 * rule.panel_order());
    double coarse = 0.0, fine = 0.0;
    auto panel = [&](double a, double b) {
        coarse += detail::panel_sum(g1, p, a, b, f);
        fine += detail::panel_sum(g2, p, a, b, f);
    };

    // [0, b0] graded geometrically toward the origin
    const auto& bp = rule.breakpoints();
    double inner = bp.front();
    for (int k = 0; k < rule.origin_levels(); ++k) {
        panel(0.5 * inner, inner);
        inner *= 0.5;
    }
    coarse += detail::origin_sum(rule.origin_rule(false), p, inner, f);
    fine += detail::origin_sum(rule.origin_rule(true), p, inner, f);

    for (std::size_t i = 0; i + 1 < bp.size(); ++i) panel(bp[i], bp[i + 1]);

    double tail = 0.0;
    if (majorant) {
        double R = bp.back();
        int doublings = 0;
        while (majorant->tail(R) > rule.tolerance() * std::max(std::abs(fine), 1e-300)) {
            if (++doublings > 2000) throw truncation_error("integrate_halfline: tail bound never met tolerance");
            panel(R, 2.0 * R);
            R *= 2.0;
        }
        tail = majorant->tail(R);
        if (!(majorant->density(R * 1.001) <= majorant->density(R)))
            throw truncation_error("integrate_halfline: majorant not decreasing at truncation radius " +
                                   std::to_string(R));
    }
    return {fine, std::abs(fine - coarse) + tail};
}

}  // namespace besselsg
