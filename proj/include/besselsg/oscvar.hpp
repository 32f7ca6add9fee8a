#pragma once

// Oscillation and rho-variation of t -> P_t f(x) on a discrete time grid.
// Both are lower bounds for the continuum operators; the change under
// doubling the grid refinement is reported alongside.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "besselsg/error.hpp"
#include "besselsg/grid_function.hpp"
#include "besselsg/semigroup.hpp"
#include "besselsg/time_grid.hpp"

namespace besselsg {

struct VariationResult {
    double value = 0.0;
    std::vector<std::size_t> subsequence;  // indices into the input, increasing
    double rho = 0.0;
};

namespace detail {

/// Power of two near the spread of the values. Differences are divided by it
/// before pow, so scaling the input by 2^k scales the result by exactly 2^k.
template <class Values>
double power_of_two_scale(const Values& v) {
    if (v.empty()) return 1.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double spread = *hi - *lo;
    return spread > 0.0 && std::isfinite(spread) ? std::ldexp(1.0, std::ilogb(spread)) : 1.0;
}

/// (sum_k |a[i_{k+1}] - a[i_k]|^rho)^{1/rho}, summed left to right.
inline double variation_along(const std::vector<double>& a, const std::vector<std::size_t>& idx, double rho) {
    std::vector<double> sub;
    for (std::size_t i : idx) sub.push_back(a[i]);
    const double scale = power_of_two_scale(sub);
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < sub.size(); ++k) s += std::pow(std::abs(sub[k + 1] - sub[k]) / scale, rho);
    return scale * std::pow(s, 1.0 / rho);
}

inline void check_rho(double rho) {
    if (!(rho > 1.0) || !std::isfinite(rho)) throw invalid_argument("rho-variation: rho must be a finite number > 1");
}

}  // namespace detail

/// Exact maximum over increasing index subsequences of the rho-variation.
/// For rho > 1 an interior point of a monotone run never helps (u -> u^rho is
/// superadditive), so the O(n^2) recursion best(i) = max_j |a_j - a_i|^rho +
/// best(j) runs over the endpoints and the turning points only.
inline VariationResult rho_variation_of_sequence(const std::vector<double>& values, double rho) {
    detail::check_rho(rho);
    VariationResult out;
    out.rho = rho;
    for (double v : values)
        if (!std::isfinite(v)) throw invalid_argument("rho-variation: values must be finite");
    if (values.size() < 2) return out;

    // candidates: first, last, and strict turning points (plateaus collapsed)
    std::vector<std::size_t> cand{0};
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double d0 = values[i] - values[cand.back()];
        if (d0 == 0.0) continue;
        std::size_t j = i + 1;
        while (j + 1 < values.size() && values[j] == values[i]) ++j;
        const double d1 = values[j] - values[i];
        if ((d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0)) cand.push_back(i);
    }
    cand.push_back(values.size() - 1);

    const std::size_t n = cand.size();
    const double scale = detail::power_of_two_scale(values);
    std::vector<double> best(n, 0.0);
    std::vector<std::size_t> next(n, n);
    for (std::size_t i = n - 1; i-- > 0;) {
        const double ai = values[cand[i]];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = values[cand[j]] - ai;
            if (d == 0.0) continue;
            const double v = std::pow(std::abs(d) / scale, rho) + best[j];
            if (v > best[i]) {
                best[i] = v;
                next[i] = j;
            }
        }
    }
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (best[i] > best[start]) start = i;
    if (best[start] == 0.0) return out;
    for (std::size_t i = start; i < n; i = next[i]) out.subsequence.push_back(cand[i]);
    out.value = detail::variation_along(values, out.subsequence, rho);
    return out;
}

/// Exhaustive search over all subsequences (at most 14 values).
inline VariationResult rho_variation_bruteforce(const std::vector<double>& values, double rho) {
    detail::check_rho(rho);
    if (values.size() > 14) throw invalid_argument("rho_variation_bruteforce: at most 14 values");
    VariationResult out;
    out.rho = rho;
    const std::size_t n = values.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1U) idx.push_back(i);
        if (idx.size() < 2) continue;
        const double v = detail::variation_along(values, idx, rho);
        if (v > out.value) {
            out.value = v;
            out.subsequence = idx;
        }
    }
    return out;
}

/// (sum_j (max - min over slot j)^2)^{1/2} for samples laid out as in `grid`.
inline double oscillation_of_trajectory(const std::vector<double>& traj, const TimeGrid& grid) {
    if (traj.size() != grid.samples().size())
        throw invalid_argument("oscillation: trajectory does not match the time grid");
    double s = 0.0;
    for (std::size_t j = 0; j < grid.slots(); ++j) {
        const auto [first, last] = grid.slot_range(j);
        const auto [lo, hi] = std::minmax_element(traj.begin() + first, traj.begin() + last + 1);
        s += (*hi - *lo) * (*hi - *lo);
    }
    return std::sqrt(s);
}

struct OperatorValue {
    double value = 0.0;          // on the declared grid
    double stability_gap = 0.0;  // increase under doubling the refinement
};

struct OperatorOptions {
    bool stability = true;
    ApplyOptions apply{};
};

namespace detail {

/// Trajectory on `grid`, and on grid.refined() when requested (the coarse
/// samples are every other refined sample).
struct Trajectories {
    std::vector<double> coarse, fine;
};

inline Trajectories sample_trajectories(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double x,
                                        const TimeGrid& grid, const OperatorOptions& opt) {
    Trajectories tr;
    if (!opt.stability) {
        tr.coarse = trajectory(ctx, kind, f, x, grid.samples(), opt.apply);
        return tr;
    }
    const TimeGrid fine = grid.refined();
    tr.fine = trajectory(ctx, kind, f, x, fine.samples(), opt.apply);
    for (std::size_t i = 0; i < tr.fine.size(); i += 2) tr.coarse.push_back(tr.fine[i]);
    return tr;
}

}  // namespace detail

/// V_rho(P_*) f(x): rho-variation of P_t f(x) over all samples of `grid`,
/// ordered by decreasing t.
inline OperatorValue variation_operator(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double x,
                                        const TimeGrid& grid, double rho, const OperatorOptions& opt = {}) {
    if (!(rho > 2.0)) throw invalid_argument("variation_operator: rho must exceed 2");
    const auto tr = detail::sample_trajectories(ctx, kind, f, x, grid, opt);
    OperatorValue r;
    r.value = rho_variation_of_sequence(tr.coarse, rho).value;
    if (opt.stability) r.stability_gap = rho_variation_of_sequence(tr.fine, rho).value - r.value;
    return r;
}

/// O(P_*) f(x) over the slots [t_{j+1}, t_j] of `grid`.
inline OperatorValue oscillation_operator(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f,
                                          double x, const TimeGrid& grid, const OperatorOptions& opt = {}) {
    const auto tr = detail::sample_trajectories(ctx, kind, f, x, grid, opt);
    OperatorValue r;
    r.value = oscillation_of_trajectory(tr.coarse, grid);
    if (opt.stability) r.stability_gap = oscillation_of_trajectory(tr.fine, grid.refined()) - r.value;
    return r;
}

struct MPDefect {
    double defect = 0.0;     // maximal - variation - |f(x)|
    double maximal = 0.0;
    double variation = 0.0;
    double abs_f = 0.0;
    double slack = 0.0;      // |P_{t_min} f(x) - f(x)|, the discrete stand-in for t -> 0
};

/// Pointwise comparison sup_t |P_t f(x)| <= V_rho f(x) + |f(x)| on one grid.
/// On the grid, max_k |a_k| <= |a_k - a_last| + |a_last| and |a_last| <=
/// |f(x)| + slack, so defect <= slack up to rounding.
inline MPDefect mp_defect(const MeasureContext& ctx, SemigroupKind kind, const GridFunction& f, double x, double rho,
                          const TimeGrid& grid, const ApplyOptions& opt = {}) {
    if (!(rho > 2.0)) throw invalid_argument("mp_defect: rho must exceed 2");
    const auto traj = trajectory(ctx, kind, f, x, grid.samples(), opt);
    MPDefect d;
    for (double v : traj) d.maximal = std::max(d.maximal, std::abs(v));
    d.variation = rho_variation_of_sequence(traj, rho).value;
    d.abs_f = std::abs(f(x));
    d.slack = std::abs(traj.back() - f(x));
    d.defect = d.maximal - d.variation - d.abs_f;
    return d;
}

}  // namespace besselsg
