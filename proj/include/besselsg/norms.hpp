#pragma once

// L^p and weak-L^1 norms of grid functions in dm_lambda, by grid quadrature.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "besselsg/error.hpp"
#include "besselsg/grid_function.hpp"

namespace besselsg {

/// (sum_i w_i |f_i|^p)^{1/p} over the grid; p = inf gives max |f_i|.
inline double lp_norm(const MeasureContext& ctx, const GridFunction& f, double p) {
    f.grid().check_context(ctx);
    if (!(p >= 1.0)) throw invalid_argument("lp_norm: p must be at least 1");
    if (std::isinf(p)) return f.sup_abs();
    const auto& w = f.grid().weights();
    const auto& v = f.values();
    const double scale = f.sup_abs();
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::abs(v[i]) / scale, p);
    return scale * std::pow(s, 1.0 / p);
}

/// sup_eta eta * m(|f| > eta) with masses from the grid weights; the sup is
/// approached from below each level, so it is attained as |f_i| * m(|f| >= |f_i|).
inline double weak_l1(const MeasureContext& ctx, const GridFunction& f) {
    f.grid().check_context(ctx);
    const auto& w = f.grid().weights();
    const auto& v = f.values();
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(v[a]) > std::abs(v[b]); });
    double best = 0.0, mass = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double level = std::abs(v[order[i]]);
        while (i < order.size() && std::abs(v[order[i]]) == level) mass += w[order[i++]];
        best = std::max(best, level * mass);
    }
    return best;
}

}  // namespace besselsg
