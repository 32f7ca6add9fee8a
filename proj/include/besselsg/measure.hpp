#pragma once

// Geometry of the weighted half-line (R_+, |.|, dm_lambda) with
// dm_lambda(y) = y^{2 lambda} dy: intervals, exact masses, and grids whose
// weights integrate piecewise-linear functions exactly against dm_lambda.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "besselsg/error.hpp"
#include "besselsg/jacobi.hpp"

namespace besselsg {

class MeasureContext {
public:
    explicit MeasureContext(double lambda) : lambda_(lambda) {
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw invalid_argument("MeasureContext: lambda must be a positive finite number");
    }
    double lambda() const noexcept { return lambda_; }
    /// Exponent of the density y^{2 lambda}.
    double power() const noexcept { return 2.0 * lambda_; }

    friend bool operator==(const MeasureContext&, const MeasureContext&) = default;

private:
    double lambda_;
};

/// I(x, r) = (x - r, x + r) intersected with R_+, stored in canonical form
/// (center >= radius).
struct Interval {
    double center = 0.0;
    double radius = 0.0;
    double left = 0.0;
    double right = 0.0;

    bool contains(double y) const noexcept { return y > left && y < right; }
    double length() const noexcept { return right - left; }
};

inline Interval interval_normalize(double x, double r) {
    if (!(x > 0.0) || !(r > 0.0) || !std::isfinite(x) || !std::isfinite(r))
        throw invalid_argument("interval_normalize: center and radius must be positive");
    if (x < r) {
        const double c = 0.5 * (x + r);
        return Interval{c, c, 0.0, x + r};
    }
    return Interval{x, r, x - r, x + r};
}

inline Interval interval_dilate(const Interval& interval, double k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw invalid_argument("interval_dilate: factor must be positive");
    return interval_normalize(interval.center, k * interval.radius);
}

/// Interval with the given endpoints, 0 <= a < b.
inline Interval interval_from_endpoints(double a, double b) {
    if (!(a >= 0.0) || !(b > a)) throw invalid_argument("interval_from_endpoints: need 0 <= a < b");
    if (a == 0.0) return Interval{0.5 * b, 0.5 * b, 0.0, b};
    return Interval{0.5 * (a + b), 0.5 * (b - a), a, b};
}

namespace detail {

/// int_a^b y^{q-1} dy for 0 <= a <= b, q > 0, without cancellation for
/// narrow intervals far from the origin.
inline double power_integral(double q, double a, double b) {
    if (!(b > a)) return 0.0;
    if (a == 0.0) return std::pow(b, q) / q;
    const double x = 0.5 * (a + b);
    const double h = (b - a) / (a + b);
    return std::pow(x, q) * (std::expm1(q * std::log1p(h)) - std::expm1(q * std::log1p(-h))) / q;
}

/// int_a^b y^p log(y) dy, 0 <= a <= b.
inline double log_moment(double p, double a, double b) {
    const double q = p + 1.0;
    auto prim = [q](double y) {
        if (y == 0.0) return 0.0;
        return std::pow(y, q) * (std::log(y) / q - 1.0 / (q * q));
    };
    return prim(b) - prim(a);
}

/// Weights (wl, wr) with int_a^b L(y) y^p dy = wl L(a) + wr L(b) for every
/// linear L.
inline std::pair<double, double> hat_weights(double p, double a, double b) {
    if (!(b > a)) return {0.0, 0.0};
    const double h = b - a;
    if (a == 0.0) {
        const double bq = std::pow(b, p + 1.0);
        return {bq / ((p + 1.0) * (p + 2.0)), bq / (p + 2.0)};
    }
    if (h > 0.5 * b) {
        const double m0 = power_integral(p + 1.0, a, b);
        const double m1 = power_integral(p + 2.0, a, b);
        const double wr = (m1 - a * m0) / h;
        return {m0 - wr, wr};
    }
    const JacobiRule& gl = legendre(12);
    double wl = 0.0, wr = 0.0;
    for (int k = 0; k < gl.order; ++k) {
        const double v = gl.nodes[k];
        const double y = a + 0.5 * h * (1.0 + v);
        const double d = gl.weights[k] * std::pow(y, p);
        wl += d * 0.5 * (1.0 - v);
        wr += d * 0.5 * (1.0 + v);
    }
    return {0.5 * h * wl, 0.5 * h * wr};
}

}  // namespace detail

/// m_lambda of (a, b), 0 <= a < b.
inline double measure_between(const MeasureContext& ctx, double a, double b) {
    return detail::power_integral(ctx.power() + 1.0, std::max(a, 0.0), b);
}

/// Exact m_lambda(I) = (right^{2l+1} - left^{2l+1}) / (2l+1).
inline double measure_of_interval(const MeasureContext& ctx, const Interval& interval) {
    return measure_between(ctx, interval.left, interval.right);
}

/// The comparison quantity x^{2 lambda} r + r^{2 lambda + 1}.
inline double volume_proxy(const MeasureContext& ctx, double x, double r) {
    return std::pow(x, ctx.power()) * r + std::pow(r, ctx.power() + 1.0);
}

/// Finite node set on [0, inf) with weights exact for piecewise-linear
/// functions against dm_lambda. Nodes are nondecreasing; a repeated node
/// (at most twice) marks a jump, carrying the left and right limits.
class Grid {
public:
    Grid() = default;

    Grid(const MeasureContext& ctx, std::vector<double> nodes,
         std::optional<Interval> support_hint = std::nullopt)
        : lambda_(ctx.lambda()), nodes_(std::move(nodes)), support_hint_(support_hint) {
        if (nodes_.size() < 2) throw invalid_argument("Grid: need at least two nodes");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!(nodes_[i] >= 0.0) || !std::isfinite(nodes_[i]))
                throw invalid_argument("Grid: nodes must be finite and nonnegative");
            if (i > 0 && nodes_[i] < nodes_[i - 1])
                throw invalid_argument("Grid: nodes must be nondecreasing");
            if (i > 1 && nodes_[i] == nodes_[i - 2])
                throw invalid_argument("Grid: a node may appear at most twice");
        }
        if (!(nodes_.back() > nodes_.front())) throw invalid_argument("Grid: empty range");
        weights_.assign(nodes_.size(), 0.0);
        seg_.resize(nodes_.size() - 1);
        for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
            seg_[i] = detail::hat_weights(ctx.power(), nodes_[i], nodes_[i + 1]);
            weights_[i] += seg_[i].first;
            weights_[i + 1] += seg_[i].second;
        }
    }

    double lambda() const noexcept { return lambda_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    /// (wl, wr) of segment [nodes[i], nodes[i+1]].
    std::pair<double, double> segment_weights(std::size_t i) const { return seg_.at(i); }
    double lo() const noexcept { return nodes_.front(); }
    double hi() const noexcept { return nodes_.back(); }
    const std::optional<Interval>& support_hint() const noexcept { return support_hint_; }

    void check_context(const MeasureContext& ctx) const {
        if (ctx.lambda() != lambda_)
            throw invalid_argument("Grid: weights were built for a different lambda");
    }

private:
    double lambda_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<std::pair<double, double>> seg_;
    std::optional<Interval> support_hint_;
};

enum class SpacingLaw { log_uniform, linear };

struct RefinementWindow {
    double lo = 0.0;
    double hi = 0.0;
    int factor = 2;  // each segment inside the window is split into `factor` pieces
};

struct GridSpec {
    double lo = 1e-3;
    double hi = 1e3;
    std::size_t count = 241;
    SpacingLaw law = SpacingLaw::log_uniform;
    std::vector<RefinementWindow> refine;
};

inline Grid build_grid(const MeasureContext& ctx, const GridSpec& spec) {
    if (!(spec.hi > spec.lo) || !std::isfinite(spec.hi) || spec.lo < 0.0)
        throw invalid_argument("build_grid: empty or invalid range");
    if (spec.count < 2) throw invalid_argument("build_grid: node count must be at least 2");
    if (spec.law == SpacingLaw::log_uniform && !(spec.lo > 0.0))
        throw invalid_argument("build_grid: log-uniform law needs a positive lower end");

    const std::size_t n = spec.count;
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n - 1);
        nodes[i] = spec.law == SpacingLaw::log_uniform ? spec.lo * std::pow(spec.hi / spec.lo, s)
                                                       : spec.lo + s * (spec.hi - spec.lo);
    }
    nodes.front() = spec.lo;
    nodes.back() = spec.hi;

    for (const auto& w : spec.refine) {
        if (!(w.hi > w.lo) || w.factor < 1)
            throw invalid_argument("build_grid: invalid refinement window");
        std::vector<double> out;
        out.reserve(nodes.size() * 2);
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            out.push_back(nodes[i]);
            const double a = nodes[i], b = nodes[i + 1];
            if (b > w.lo && a < w.hi)
                for (int k = 1; k < w.factor; ++k) out.push_back(a + (b - a) * k / w.factor);
        }
        out.push_back(nodes.back());
        nodes = std::move(out);
    }
    std::optional<Interval> hint;
    if (!spec.refine.empty())
        hint = interval_from_endpoints(std::max(0.0, spec.refine.front().lo), spec.refine.front().hi);
    return Grid(ctx, std::move(nodes), hint);
}

}  // namespace besselsg
