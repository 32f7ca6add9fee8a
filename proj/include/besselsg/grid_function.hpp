#pragma once

// Sampled real functions on a Grid. Between nodes the function is the linear
// interpolant; a doubled node carries a jump. Outside the grid the function
// follows an extension rule on each side.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "besselsg/error.hpp"
#include "besselsg/measure.hpp"

namespace besselsg {

enum class Extension {
    none,        // undefined outside the grid (coverage errors)
    zero,        // compactly supported inside the grid
    constant,    // boundary value continued
    log_linear,  // continued linearly in log(y) from the two boundary nodes
};

class GridFunction {
public:
    GridFunction() = default;

    GridFunction(Grid grid, std::vector<double> values, std::string label = {},
                 Extension left = Extension::zero, Extension right = Extension::zero)
        : grid_(std::move(grid)), values_(std::move(values)), label_(std::move(label)),
          left_(left), right_(right) {
        if (values_.size() != grid_.size())
            throw invalid_argument("GridFunction: value count does not match grid");
        for (double v : values_)
            if (!std::isfinite(v)) throw invalid_argument("GridFunction: values must be finite");
        const auto& y = grid_.nodes();
        if (left_ == Extension::log_linear && !(y[0] > 0.0 && y[1] > y[0]))
            throw invalid_argument("GridFunction: log-linear left extension needs two distinct positive nodes");
        const std::size_t n = y.size();
        if (right_ == Extension::log_linear && !(y[n - 1] > y[n - 2]))
            throw invalid_argument("GridFunction: log-linear right extension needs two distinct nodes");
    }

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::string& label() const noexcept { return label_; }
    Extension left_extension() const noexcept { return left_; }
    Extension right_extension() const noexcept { return right_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// log-linear extension slope d f / d log y on the given side.
    double log_slope(bool right_side) const {
        const auto& y = grid_.nodes();
        const std::size_t n = y.size();
        if (right_side) return (values_[n - 1] - values_[n - 2]) / std::log(y[n - 1] / y[n - 2]);
        return (values_[1] - values_[0]) / std::log(y[1] / y[0]);
    }

    double extension_value(double yq) const {
        const auto& y = grid_.nodes();
        if (yq < y.front()) {
            switch (left_) {
                case Extension::zero: return 0.0;
                case Extension::constant: return values_.front();
                case Extension::log_linear: return values_.front() + log_slope(false) * std::log(yq / y.front());
                case Extension::none: break;
            }
            throw coverage_error("GridFunction '" + label_ + "' undefined left of its grid", yq, y.front());
        }
        switch (right_) {
            case Extension::zero: return 0.0;
            case Extension::constant: return values_.back();
            case Extension::log_linear: return values_.back() + log_slope(true) * std::log(yq / y.back());
            case Extension::none: break;
        }
        throw coverage_error("GridFunction '" + label_ + "' undefined right of its grid", y.back(), yq);
    }

    double left_limit(double yq) const {
        const auto& y = grid_.nodes();
        if (yq == y.front()) return boundary_value(false);
        if (yq < y.front() || yq > y.back()) return extension_value(yq);
        // first node >= yq
        const auto j = static_cast<std::size_t>(std::lower_bound(y.begin(), y.end(), yq) - y.begin());
        if (y[j] == yq) return values_[j];
        return interpolate(j - 1, yq);
    }

    double right_limit(double yq) const {
        const auto& y = grid_.nodes();
        if (yq == y.back()) return boundary_value(true);
        if (yq < y.front() || yq > y.back()) return extension_value(yq);
        // last node <= yq
        const auto j = static_cast<std::size_t>(std::upper_bound(y.begin(), y.end(), yq) - y.begin()) - 1;
        if (y[j] == yq) return values_[j];
        return interpolate(j, yq);
    }

    /// Value at yq; at a jump, the mean of the one-sided limits.
    double operator()(double yq) const {
        const double l = left_limit(yq), r = right_limit(yq);
        return l == r ? l : 0.5 * (l + r);
    }

    double sup_abs() const {
        double s = 0.0;
        for (double v : values_) s = std::max(s, std::abs(v));
        return s;
    }

    /// [first, last] node carrying a nonzero value; empty range gives {0, 0}.
    std::pair<double, double> support() const {
        const auto& y = grid_.nodes();
        std::size_t i0 = values_.size(), i1 = 0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_[i] != 0.0) {
                i0 = std::min(i0, i);
                i1 = i;
            }
        if (i0 == values_.size()) return {0.0, 0.0};
        double lo = y[i0], hi = y[i1];
        if (i0 > 0) lo = y[i0 - 1];
        if (i1 + 1 < y.size()) hi = y[i1 + 1];
        if (left_ != Extension::zero) lo = 0.0;
        if (right_ != Extension::zero) hi = std::numeric_limits<double>::infinity();
        return {lo, hi};
    }

private:
    // One-sided limit across the grid boundary, seen from outside.
    double boundary_value(bool right_side) const {
        const Extension e = right_side ? right_ : left_;
        if (e == Extension::zero) return 0.0;
        return right_side ? values_.back() : values_.front();
    }

    double interpolate(std::size_t i, double yq) const {
        const auto& y = grid_.nodes();
        const double a = y[i], b = y[i + 1];
        const double s = (yq - a) / (b - a);
        return values_[i] + s * (values_[i + 1] - values_[i]);
    }

    Grid grid_;
    std::vector<double> values_;
    std::string label_;
    Extension left_ = Extension::zero;
    Extension right_ = Extension::zero;
};

inline GridFunction sample(const Grid& grid, const std::function<double(double)>& fn,
                           std::string label = {}, Extension left = Extension::zero,
                           Extension right = Extension::zero) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = fn(grid.nodes()[i]);
    return GridFunction(grid, std::move(v), std::move(label), left, right);
}

inline GridFunction constant_function(const Grid& grid, double c, std::string label = "const") {
    return GridFunction(grid, std::vector<double>(grid.size(), c), std::move(label),
                        Extension::constant, Extension::constant);
}

namespace detail {

/// One piece of a grid function restricted to [a, b] on which it is either
/// linear in y or linear in log y.
struct Piece {
    double a, b;
    bool log_form;
    double va, vb;           // linear form: values at a and b
    double vref, slope, yref;  // log form: f = vref + slope * log(y / yref)
};

template <class Visit>
void for_each_piece(const GridFunction& f, double a, double b, Visit&& visit) {
    if (!(b > a)) return;
    const auto& y = f.grid().nodes();
    const auto& v = f.values();
    auto visit_ext = [&](double lo, double hi, bool right_side) {
        if (!(hi > lo)) return;
        const Extension e = right_side ? f.right_extension() : f.left_extension();
        const std::size_t n = y.size();
        switch (e) {
            case Extension::none:
                throw coverage_error("GridFunction '" + f.label() + "' does not cover the interval", lo, hi);
            case Extension::zero: visit(Piece{lo, hi, false, 0.0, 0.0, 0, 0, 0}); return;
            case Extension::constant: {
                const double c = right_side ? v[n - 1] : v[0];
                visit(Piece{lo, hi, false, c, c, 0, 0, 0});
                return;
            }
            case Extension::log_linear: {
                const double yref = right_side ? y[n - 1] : y[0];
                const double vref = right_side ? v[n - 1] : v[0];
                visit(Piece{lo, hi, true, 0, 0, vref, f.log_slope(right_side), yref});
                return;
            }
        }
    };
    visit_ext(a, std::min(b, y.front()), false);
    const double ga = std::max(a, y.front()), gb = std::min(b, y.back());
    if (gb > ga) {
        std::size_t i = static_cast<std::size_t>(std::upper_bound(y.begin(), y.end(), ga) - y.begin());
        i = i == 0 ? 0 : i - 1;
        for (; i + 1 < y.size() && y[i] < gb; ++i) {
            const double s0 = y[i], s1 = y[i + 1];
            if (!(s1 > s0)) continue;
            const double lo = std::max(s0, ga), hi = std::min(s1, gb);
            if (!(hi > lo)) continue;
            const double d = (v[i + 1] - v[i]) / (s1 - s0);
            const double va = lo == s0 ? v[i] : v[i] + d * (lo - s0);
            const double vb = hi == s1 ? v[i + 1] : v[i] + d * (hi - s0);
            visit(Piece{lo, hi, false, va, vb, 0, 0, 0});
        }
    }
    visit_ext(std::max(a, y.back()), b, true);
}

/// int_piece (f - c) dm_lambda.
inline double piece_integral(double p, const Piece& s, double c) {
    if (!s.log_form) {
        const auto [wl, wr] = hat_weights(p, s.a, s.b);
        return wl * (s.va - c) + wr * (s.vb - c);
    }
    const double m0 = power_integral(p + 1.0, s.a, s.b);
    return (s.vref - c) * m0 + s.slope * (log_moment(p, s.a, s.b) - std::log(s.yref) * m0);
}

/// int_piece |f - c| dm_lambda, exact for both piece forms.
inline double piece_abs_integral(double p, const Piece& s, double c) {
    if (!s.log_form) {
        const double da = s.va - c, db = s.vb - c;
        if ((da >= 0.0 && db >= 0.0) || (da <= 0.0 && db <= 0.0))
            return std::abs(piece_integral(p, s, c));
        const double root = s.a + (s.b - s.a) * da / (da - db);
        const double below = hat_weights(p, s.a, root).first;
        const double above = hat_weights(p, root, s.b).second;
        return std::abs(below * da) + std::abs(above * db);
    }
    if (s.slope == 0.0) return std::abs(s.vref - c) * power_integral(p + 1.0, s.a, s.b);
    const double root = s.yref * std::exp((c - s.vref) / s.slope);
    if (!(root > s.a && root < s.b)) return std::abs(piece_integral(p, s, c));
    Piece lo = s, hi = s;
    lo.b = root;
    hi.a = root;
    return std::abs(piece_integral(p, lo, c)) + std::abs(piece_integral(p, hi, c));
}

}  // namespace detail

/// int_a^b f dm_lambda (exact for the piecewise representation).
inline double integrate(const MeasureContext& ctx, const GridFunction& f, double a, double b) {
    f.grid().check_context(ctx);
    double s = 0.0;
    detail::for_each_piece(f, a, b, [&](const detail::Piece& pc) { s += detail::piece_integral(ctx.power(), pc, 0.0); });
    return s;
}

/// Weighted mean f_{I,lambda}. For f constant on I the result equals that
/// constant exactly.
inline double mean_on_interval(const MeasureContext& ctx, const GridFunction& f, const Interval& interval) {
    f.grid().check_context(ctx);
    const double ref = f.right_limit(interval.left);
    double s = 0.0;
    detail::for_each_piece(f, interval.left, interval.right,
                           [&](const detail::Piece& pc) { s += detail::piece_integral(ctx.power(), pc, ref); });
    return ref + s / measure_of_interval(ctx, interval);
}

/// (1 / m(I)) int_I |f - f_I| dm_lambda.
inline double mean_oscillation(const MeasureContext& ctx, const GridFunction& f, const Interval& interval) {
    const double mean = mean_on_interval(ctx, f, interval);
    double s = 0.0;
    detail::for_each_piece(f, interval.left, interval.right,
                           [&](const detail::Piece& pc) { s += detail::piece_abs_integral(ctx.power(), pc, mean); });
    return s / measure_of_interval(ctx, interval);
}

/// sum_k c_k f_k on the union of the input grids (jumps preserved). Each
/// side's extension is the most permissive among the inputs.
inline GridFunction linear_combination(const MeasureContext& ctx, std::span<const double> coeffs,
                                       std::span<const GridFunction* const> funcs, std::string label = {}) {
    if (coeffs.size() != funcs.size() || funcs.empty())
        throw invalid_argument("linear_combination: need matching nonempty inputs");
    std::vector<double> pos;
    for (const auto* f : funcs) {
        f->grid().check_context(ctx);
        pos.insert(pos.end(), f->grid().nodes().begin(), f->grid().nodes().end());
    }
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

    auto rank = [](Extension e) {
        switch (e) {
            case Extension::zero: return 0;
            case Extension::constant: return 1;
            case Extension::log_linear: return 2;
            case Extension::none: return 3;
        }
        return 3;
    };
    Extension left = Extension::zero, right = Extension::zero;
    for (const auto* f : funcs) {
        if (rank(f->left_extension()) > rank(left)) left = f->left_extension();
        if (rank(f->right_extension()) > rank(right)) right = f->right_extension();
    }

    std::vector<double> nodes, values;
    nodes.reserve(pos.size() * 2);
    values.reserve(pos.size() * 2);
    const double lo = pos.front(), hi = pos.back();
    for (double p : pos) {
        double vl = 0.0, vr = 0.0;
        for (std::size_t k = 0; k < funcs.size(); ++k) {
            const auto& f = *funcs[k];
            const bool outside_l = p < f.grid().lo() && f.left_extension() == Extension::none;
            const bool outside_r = p > f.grid().hi() && f.right_extension() == Extension::none;
            if (outside_l || outside_r) continue;
            vl += coeffs[k] * (p == lo ? f.right_limit(p) : f.left_limit(p));
            vr += coeffs[k] * (p == hi ? f.left_limit(p) : f.right_limit(p));
        }
        nodes.push_back(p);
        values.push_back(vl);
        if (vr != vl) {
            nodes.push_back(p);
            values.push_back(vr);
        }
    }
    return GridFunction(Grid(ctx, std::move(nodes)), std::move(values), std::move(label), left, right);
}

}  // namespace besselsg
