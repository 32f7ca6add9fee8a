#pragma once

// H^1 atoms, BMO norms over interval lattices, and the Calderon-Zygmund
// decomposition on (R_+, dm_lambda).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "besselsg/error.hpp"
#include "besselsg/grid_function.hpp"
#include "besselsg/measure.hpp"
#include "besselsg/norms.hpp"

namespace besselsg {

// ---------------------------------------------------------------- atoms

enum class AtomShape { haar, bump_pair, random };

inline std::string to_string(AtomShape s) {
    switch (s) {
        case AtomShape::haar: return "haar";
        case AtomShape::bump_pair: return "bump-pair";
        case AtomShape::random: return "random";
    }
    return "?";
}

inline AtomShape parse_atom_shape(const std::string& s) {
    if (s == "haar") return AtomShape::haar;
    if (s == "bump-pair" || s == "bump_pair") return AtomShape::bump_pair;
    if (s == "random") return AtomShape::random;
    throw invalid_argument("unknown atom shape '" + s + "' (expected haar, bump-pair or random)");
}

struct Atom {
    Interval interval;
    GridFunction profile;
};

namespace detail {

/// Points a + (b - a) k / n, k = 0..n, requiring them to be distinct doubles.
inline std::vector<double> resolved_points(double a, double b, int n) {
    std::vector<double> p(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) p[k] = k == n ? b : a + (b - a) * k / n;
    for (int k = 1; k <= n; ++k)
        if (!(p[k] > p[k - 1]))
            throw resolution_error("make_atom: interval too narrow for its position to be resolved");
    return p;
}

}  // namespace detail

/// An H^1 atom on I: mean zero in dm_lambda, sup |a| = 1 / m(I), supported in I.
/// Positive and negative parts are balanced in dm_lambda and the result is
/// rescaled. `seed` only matters for the random shape.
inline Atom make_atom(const MeasureContext& ctx, const Interval& interval, AtomShape shape, std::uint64_t seed = 0) {
    const double a = interval.left, b = interval.right;
    if (!(b > a)) throw invalid_argument("make_atom: empty interval");
    const double mI = measure_of_interval(ctx, interval);
    if (!(mI > 0.0) || !std::isfinite(mI)) throw resolution_error("make_atom: interval measure out of range");
    std::vector<double> nodes, values;
    const double m = 0.5 * (a + b);
    switch (shape) {
        case AtomShape::haar: {
            detail::resolved_points(a, b, 4);
            const double left = measure_between(ctx, a, m), right = measure_between(ctx, m, b);
            nodes = {a, m, m, b};
            values = {1.0, 1.0, -left / right, -left / right};
            break;
        }
        case AtomShape::bump_pair: {
            const int n = 16;
            const auto pl = detail::resolved_points(a, m, n);
            const auto pr = detail::resolved_points(m, b, n);
            auto bump = [](int k) {
                const double s = std::sin(std::numbers::pi * k / n);
                return s * s;
            };
            std::vector<double> vl(n + 1), vr(n + 1);
            for (int k = 0; k <= n; ++k) vl[k] = vr[k] = bump(k);
            const GridFunction gl(Grid(ctx, pl), vl), gr(Grid(ctx, pr), vr);
            const double il = integrate(ctx, gl, a, m), ir = integrate(ctx, gr, m, b);
            nodes = pl;
            values = vl;
            for (int k = 1; k <= n; ++k) {
                nodes.push_back(pr[k]);
                values.push_back(-il / ir * vr[k]);
            }
            break;
        }
        case AtomShape::random: {
            std::mt19937_64 eng(seed);
            const int pieces = std::uniform_int_distribution<int>(2, 6)(eng);
            const auto p = detail::resolved_points(a, b, pieces);
            std::vector<double> h(pieces);
            for (auto& v : h) v = std::uniform_real_distribution<double>(-1.0, 1.0)(eng);
            double mean = 0.0;
            for (int k = 0; k < pieces; ++k) mean += h[k] * measure_between(ctx, p[k], p[k + 1]);
            mean /= mI;
            for (auto& v : h) v -= mean;
            for (int k = 0; k < pieces; ++k) {
                nodes.push_back(p[k]);
                values.push_back(h[k]);
                nodes.push_back(p[k + 1]);
                values.push_back(h[k]);
            }
            break;
        }
    }
    double sup = 0.0;
    for (double v : values) sup = std::max(sup, std::abs(v));
    if (!(sup > 0.0)) throw resolution_error("make_atom: degenerate profile");
    for (auto& v : values) v /= sup * mI;
    // merge equal adjacent values at piece boundaries of the random shape
    std::vector<double> n2, v2;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0 && nodes[i] == nodes[i - 1] && values[i] == values[i - 1]) continue;
        n2.push_back(nodes[i]);
        v2.push_back(values[i]);
    }
    return Atom{interval, GridFunction(Grid(ctx, std::move(n2), interval), std::move(v2), to_string(shape) + " atom")};
}

struct AtomReport {
    bool support_ok = false;
    bool size_ok = false;
    bool mean_ok = false;
    double support_slack = 0.0;  // distance of the furthest nonzero value outside I
    double size_slack = 0.0;     // sup |a| m(I) - 1
    double mean_slack = 0.0;     // |int a dm| / (m(I) sup |a|)
    bool ok() const noexcept { return support_ok && size_ok && mean_ok; }
};

inline AtomReport validate_atom(const MeasureContext& ctx, const Atom& atom, double tol = 1e-10) {
    AtomReport r;
    const auto& f = atom.profile;
    const auto& y = f.grid().nodes();
    const auto& v = f.values();
    const Interval& I = atom.interval;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (v[i] == 0.0) continue;
        const double out = std::max(I.left - y[i], y[i] - I.right);
        r.support_slack = std::max(r.support_slack, out);
    }
    bool ext_ok = f.left_extension() == Extension::zero && f.right_extension() == Extension::zero;
    if (!ext_ok) r.support_slack = std::numeric_limits<double>::infinity();
    r.support_ok = r.support_slack <= 0.0;
    const double mI = measure_of_interval(ctx, I);
    const double sup = f.sup_abs();
    r.size_slack = sup * mI - 1.0;
    r.size_ok = r.size_slack <= tol;
    const double total = integrate(ctx, f, 0.0, f.grid().hi());
    r.mean_slack = sup > 0.0 ? std::abs(total) / (mI * sup) : 0.0;
    r.mean_ok = r.mean_slack <= tol;
    return r;
}

struct AtomicDecomposition {
    std::vector<double> coefficients;
    std::vector<Atom> atoms;
};

/// sum |alpha_j|: an upper bound for the H^1 norm of sum alpha_j a_j.
inline double atomic_norm_upper(const MeasureContext& ctx, const AtomicDecomposition& d, double tol = 1e-10) {
    if (d.coefficients.size() != d.atoms.size())
        throw invalid_argument("atomic_norm_upper: coefficient and atom counts differ");
    double s = 0.0;
    for (std::size_t j = 0; j < d.atoms.size(); ++j) {
        const auto rep = validate_atom(ctx, d.atoms[j], tol);
        if (!rep.ok()) throw invalid_atom("atomic_norm_upper: atom fails validation", j);
        s += std::abs(d.coefficients[j]);
    }
    return s;
}

/// sum alpha_j a_j as one grid function.
inline GridFunction synthesize(const MeasureContext& ctx, const AtomicDecomposition& d) {
    if (d.atoms.empty()) throw invalid_argument("synthesize: empty decomposition");
    std::vector<const GridFunction*> fs;
    for (const auto& a : d.atoms) fs.push_back(&a.profile);
    return linear_combination(ctx, d.coefficients, fs, "atom sum");
}

// ---------------------------------------------------------------- BMO

/// Radii r_min 2^{k/refine} up to r_max, centers on multiples of
/// r / (2 refine) inside [lo, hi]. Doubling `refine` gives a superset.
struct BMOLattice {
    double r_min = 1e-2;
    double r_max = 10.0;
    double lo = 0.0;
    double hi = 10.0;
    int refine = 1;
};

inline std::vector<Interval> lattice_intervals(const BMOLattice& L) {
    if (!(L.r_min > 0.0) || !(L.r_max >= L.r_min) || !(L.hi > L.lo) || L.refine < 1)
        throw invalid_argument("BMO lattice: invalid parameters");
    std::vector<Interval> out;
    const int kmax = static_cast<int>(std::floor(L.refine * std::log2(L.r_max / L.r_min) + 1e-9));
    for (int k = 0; k <= kmax; ++k) {
        const double r = L.r_min * std::exp2(static_cast<double>(k) / L.refine);
        const double step = r / (2.0 * L.refine);
        const auto j0 = static_cast<long long>(std::max(1.0, std::ceil(L.lo / step)));
        for (long long j = j0;; ++j) {
            const double x = step * static_cast<double>(j);
            if (x > L.hi) break;
            out.push_back(interval_normalize(x, r));
        }
    }
    return out;
}

/// Three decades of radii below the extent of f's grid, centers within it.
inline BMOLattice default_bmo_lattice(const GridFunction& f, int refine = 1) {
    const double hi = f.grid().hi();
    BMOLattice L;
    L.r_max = 0.5 * hi;
    L.r_min = L.r_max * 1e-3;
    L.lo = f.grid().lo();
    L.hi = hi;
    L.refine = refine;
    return L;
}

struct BMOResult {
    double value = 0.0;
    Interval argmax{};
    std::size_t intervals = 0;
};

/// max over the family of (1/m(I)) int_I |f - f_I| dm_lambda.
inline BMOResult bmo_norm(const MeasureContext& ctx, const GridFunction& f, const std::vector<Interval>& family) {
    if (family.empty()) throw invalid_argument("bmo_norm: empty interval family");
    BMOResult r;
    r.intervals = family.size();
    for (const auto& I : family) {
        const double v = mean_oscillation(ctx, f, I);
        if (v > r.value) {
            r.value = v;
            r.argmax = I;
        }
    }
    return r;
}

inline BMOResult bmo_norm(const MeasureContext& ctx, const GridFunction& f) {
    return bmo_norm(ctx, f, lattice_intervals(default_bmo_lattice(f)));
}

// ---------------------------------------------------------------- CZ

struct CZBadPart {
    GridFunction b;
    Interval interval;
};

struct CZOutput {
    GridFunction good;
    std::vector<CZBadPart> bad_parts;
    double threshold = 0.0;
    double sup_constant = 0.0;   // sup |g| / eta, measured
    double sup_bound = 0.0;      // 2^{2 lambda + 1}: parent average <= eta
    int overlap = 0;             // max_x sum_j chi_{I_j}(x) over the grid nodes
};

namespace detail {

inline double abs_integral(double p, const GridFunction& f, double a, double b) {
    double s = 0.0;
    for_each_piece(f, a, b, [&](const Piece& pc) { s += piece_abs_integral(p, pc, 0.0); });
    return s;
}

inline double sup_on(const GridFunction& f, double a, double b) {
    double s = 0.0;
    for_each_piece(f, a, b, [&](const Piece& pc) {
        if (pc.log_form) {
            for (double z : {pc.a, pc.b})
                if (z > 0.0) s = std::max(s, std::abs(pc.vref + pc.slope * std::log(z / pc.yref)));
        } else {
            s = std::max({s, std::abs(pc.va), std::abs(pc.vb)});
        }
    });
    return s;
}

}  // namespace detail

/// Dyadic stopping-time decomposition f = g + sum_j b_j at height eta: the
/// I_j are the maximal dyadic intervals [k 2^j, (k+1) 2^j) whose
/// dm_lambda-average of |f| exceeds eta, b_j = (f - f_{I_j}) chi_{I_j}, and g
/// equals f_{I_j} on I_j and f elsewhere. The I_j are disjoint.
inline CZOutput cz_decompose(const MeasureContext& ctx, const GridFunction& f, double eta) {
    f.grid().check_context(ctx);
    if (!(eta > 0.0) || !std::isfinite(eta)) throw invalid_argument("cz_decompose: eta must be positive");
    if (f.right_extension() != Extension::zero)
        throw invalid_argument("cz_decompose: f must vanish beyond its grid to be integrable");
    if (f.left_extension() == Extension::log_linear || f.left_extension() == Extension::none)
        throw invalid_argument("cz_decompose: f must be bounded near the origin");
    const double p = ctx.power();
    const auto& y = f.grid().nodes();

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < y.size(); ++i)
        if (y[i + 1] > y[i]) min_gap = std::min(min_gap, y[i + 1] - y[i]);
    const double floor_len = 0.25 * min_gap;

    double top = std::exp2(std::ceil(std::log2(f.grid().hi())));
    while (detail::abs_integral(p, f, 0.0, top) > eta * measure_between(ctx, 0.0, top)) top *= 2.0;

    std::vector<std::pair<double, double>> selected;
    std::vector<std::pair<double, double>> stack{{0.0, top}};
    while (!stack.empty()) {
        const auto [a, b] = stack.back();
        stack.pop_back();
        const double h = 0.5 * (b - a);
        for (const auto& [c0, c1] : {std::pair{a, a + h}, std::pair{a + h, b}}) {
            const double mass = detail::abs_integral(p, f, c0, c1);
            if (mass == 0.0) continue;
            if (mass > eta * measure_between(ctx, c0, c1)) {
                selected.emplace_back(c0, c1);
                continue;
            }
            if (c1 - c0 < floor_len || detail::sup_on(f, c0, c1) <= eta) continue;
            stack.emplace_back(c0, c1);
        }
    }
    std::sort(selected.begin(), selected.end());

    CZOutput out;
    out.threshold = eta;
    out.sup_bound = std::pow(2.0, p + 1.0);
    std::vector<double> means;
    for (const auto& [a, b] : selected) {
        const Interval I = interval_from_endpoints(a, b);
        const double mean = mean_on_interval(ctx, f, I);
        means.push_back(mean);
        std::vector<double> nodes, values;
        detail::for_each_piece(f, a, b, [&](const detail::Piece& pc) {
            const double va = pc.va - mean, vb = pc.vb - mean;
            if (nodes.empty() || nodes.back() != pc.a || values.back() != va) {
                nodes.push_back(pc.a);
                values.push_back(va);
            }
            nodes.push_back(pc.b);
            values.push_back(vb);
        });
        out.bad_parts.push_back({GridFunction(Grid(ctx, std::move(nodes), I), std::move(values), "b_j"), I});
    }

    // g: f outside the selected intervals, their means inside
    std::vector<double> pts(y.begin(), y.end());
    if (f.left_extension() == Extension::constant) pts.push_back(0.0);
    for (const auto& [a, b] : selected) {
        pts.push_back(a);
        pts.push_back(b);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto owner = [&](double z, bool right_side) -> int {
        // index of the selected [a, b) holding z from the given side
        auto it = std::upper_bound(selected.begin(), selected.end(), std::pair{z, std::numeric_limits<double>::infinity()});
        if (it == selected.begin()) return -1;
        --it;
        const bool inside = right_side ? (z >= it->first && z < it->second) : (z > it->first && z <= it->second);
        if (inside) return static_cast<int>(it - selected.begin());
        if (!right_side && it != selected.begin() && z == it->first) {
            --it;
            if (z > it->first && z <= it->second) return static_cast<int>(it - selected.begin());
        }
        return -1;
    };
    std::vector<double> gn, gv;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double z = pts[i];
        const int ol = owner(z, false), orr = owner(z, true);
        double vl = ol >= 0 ? means[ol] : f.left_limit(z);
        double vr = orr >= 0 ? means[orr] : f.right_limit(z);
        if (i == 0) vl = vr;
        if (i + 1 == pts.size()) vr = vl;
        gn.push_back(z);
        gv.push_back(vl);
        if (vr != vl) {
            gn.push_back(z);
            gv.push_back(vr);
        }
    }
    out.good = GridFunction(Grid(ctx, std::move(gn)), std::move(gv), "g", f.left_extension(), Extension::zero);
    out.sup_constant = out.good.sup_abs() / eta;

    int overlap = 0;
    for (double z : pts) {
        int c = 0;
        for (const auto& bp : out.bad_parts) c += bp.interval.contains(z) ? 1 : 0;
        overlap = std::max(overlap, c);
    }
    out.overlap = std::max(overlap, selected.empty() ? 0 : 1);
    return out;
}

/// Measured quantities of a decomposition against the five properties.
struct CZReport {
    double reconstruction = 0.0;  // max |f - g - sum b_j| at grid points, relative to sup |f|
    double support = 0.0;         // furthest nonzero value of a b_j outside its I_j
    double mean_zero = 0.0;       // max |int b_j| / (m(I_j) sup |b_j|)
    double sup_ratio = 0.0;       // sup |g| / eta
    double good_l1_ratio = 0.0;   // ||g||_1 / ||f||_1
    double bad_l1_ratio = 0.0;    // sum ||b_j||_1 / ||f||_1
    double measure_ratio = 0.0;   // eta sum m(I_j) / ||f||_1
    int overlap = 0;
};

inline CZReport cz_check(const MeasureContext& ctx, const GridFunction& f, const CZOutput& out) {
    CZReport r;
    const double p = ctx.power();
    const double fl1 = detail::abs_integral(p, f, 0.0, f.grid().hi());
    std::vector<double> pts(f.grid().nodes());
    for (const auto& bp : out.bad_parts) {
        pts.push_back(bp.interval.left);
        pts.push_back(bp.interval.right);
        pts.push_back(0.5 * (bp.interval.left + bp.interval.right));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto eval = [](const GridFunction& g, double z, bool right) {
        if (z < g.grid().lo() || z > g.grid().hi()) return g.extension_value(z);
        return right ? g.right_limit(z) : g.left_limit(z);
    };
    const double scale = std::max(f.sup_abs(), std::numeric_limits<double>::min());
    for (double z : pts)
        for (bool right : {false, true}) {
            if (z == 0.0 && !right) continue;
            double s = eval(out.good, z, right);
            for (const auto& bp : out.bad_parts) {
                const bool in = right ? (z >= bp.interval.left && z < bp.interval.right)
                                      : (z > bp.interval.left && z <= bp.interval.right);
                if (in) s += eval(bp.b, z, right);
            }
            r.reconstruction = std::max(r.reconstruction, std::abs(s - eval(f, z, right)) / scale);
        }
    double bad_l1 = 0.0, msum = 0.0;
    for (const auto& bp : out.bad_parts) {
        const auto& y = bp.b.grid().nodes();
        for (std::size_t i = 0; i < y.size(); ++i)
            if (bp.b.values()[i] != 0.0)
                r.support = std::max(r.support, std::max(bp.interval.left - y[i], y[i] - bp.interval.right));
        const double mI = measure_of_interval(ctx, bp.interval);
        const double sup = bp.b.sup_abs();
        if (sup > 0.0)
            r.mean_zero = std::max(r.mean_zero, std::abs(integrate(ctx, bp.b, bp.interval.left, bp.interval.right)) /
                                                    (mI * sup));
        bad_l1 += detail::abs_integral(p, bp.b, bp.interval.left, bp.interval.right);
        msum += mI;
    }
    r.sup_ratio = out.good.sup_abs() / out.threshold;
    if (fl1 > 0.0) {
        r.good_l1_ratio = detail::abs_integral(p, out.good, 0.0, out.good.grid().hi()) / fl1;
        r.bad_l1_ratio = bad_l1 / fl1;
        r.measure_ratio = out.threshold * msum / fl1;
    }
    r.overlap = out.overlap;
    return r;
}

}  // namespace besselsg
