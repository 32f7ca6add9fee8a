#pragma once

// Gauss-Jacobi rules for weight (1-v)^alpha (1+v)^beta on [-1, 1], built by
// Newton iteration on the three-term recurrence with Chebyshev-Gauss initial
// guesses and deflation against roots already found. Work is done in long
// double so that weights next to the endpoints keep full double accuracy; if
// the guesses fail to produce n ordered roots (large exponents), roots are
// bracketed by Sturm counts of the same recurrence and polished.

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "besselsg/error.hpp"

namespace besselsg {

struct JacobiRule {
    int order = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> nodes;    // ascending in (-1, 1)
    std::vector<double> weights;  // positive
};

namespace detail {

/// P_n^{(alpha,beta)}(v) by the three-term recurrence.
template <class R>
R jacobi_value(int n, R alpha, R beta, R v) {
    if (n == 0) return 1;
    const R ab = alpha + beta;
    R p_prev = 1;
    R p = (alpha - beta + (ab + 2) * v) / 2;
    for (int k = 2; k <= n; ++k) {
        const R kk = k;
        const R c = 2 * kk + ab;
        const R a1 = 2 * kk * (kk + ab) * (c - 2);
        const R a2 = (c - 1) * (alpha * alpha - beta * beta);
        const R a3 = (c - 2) * (c - 1) * c;
        const R a4 = 2 * (kk + alpha - 1) * (kk + beta - 1) * c;
        const R next = ((a2 + a3 * v) * p - a4 * p_prev) / a1;
        p_prev = p;
        p = next;
    }
    return p;
}

/// Number of roots of P_n^{(alpha,beta)} below v: sign changes of the
/// normalized recurrence (a Sturm sequence for the orthogonal family).
template <class R>
int jacobi_roots_below(int n, R alpha, R beta, R v) {
    int changes = 0;
    R p_prev = 1;
    R p = (alpha - beta + (alpha + beta + 2) * v) / 2;
    // leading coefficients are positive, so sign changes of P_0..P_n count roots above v
    auto sgn = [](R a, R b) { return (a < 0) != (b < 0) && a != 0; };
    if (sgn(p_prev, p)) ++changes;
    const R ab = alpha + beta;
    for (int k = 2; k <= n; ++k) {
        const R kk = k;
        const R c = 2 * kk + ab;
        const R a1 = 2 * kk * (kk + ab) * (c - 2);
        const R a2 = (c - 1) * (alpha * alpha - beta * beta);
        const R a3 = (c - 2) * (c - 1) * c;
        const R a4 = 2 * (kk + alpha - 1) * (kk + beta - 1) * c;
        R next = ((a2 + a3 * v) * p - a4 * p_prev) / a1;
        if (next == 0) next = -p * std::numeric_limits<R>::epsilon();
        if (sgn(p, next)) ++changes;
        // rescale to keep the sequence in range; signs are unaffected
        const R m = std::abs(next) > 1 ? std::abs(next) : R(1);
        p_prev = p / m;
        p = next / m;
    }
    return n - changes;
}

}  // namespace detail

/// Value and derivative of the Jacobi polynomial P_n^{(alpha,beta)} at v. The
/// derivative uses d/dv P_n = (n + a + b + 1)/2 P_{n-1}^{(a+1,b+1)}, which stays
/// accurate next to the endpoints.
template <class R = double>
std::pair<R, R> jacobi_p(int n, R alpha, R beta, R v) {
    if (n == 0) return {R(1), R(0)};
    const R p = detail::jacobi_value<R>(n, alpha, beta, v);
    const R dp = (n + alpha + beta + 1) / 2 * detail::jacobi_value<R>(n - 1, alpha + 1, beta + 1, v);
    return {p, dp};
}

inline JacobiRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw invalid_argument("gauss_jacobi: order must be >= 1");
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw invalid_argument("gauss_jacobi: exponents must exceed -1");
    using R = long double;
    const R a = alpha, b = beta;

    JacobiRule rule;
    rule.order = n;
    rule.alpha = alpha;
    rule.beta = beta;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const R log_scale = std::lgamma(n + a + 1) + std::lgamma(n + b + 1) - std::lgamma(n + a + b + 1) -
                        std::lgamma(R(n) + 1) + (a + b + 1) * std::log(R(2));
    if (!std::isfinite(log_scale))
        throw numeric_range_error("gauss_jacobi: weight normalization out of range");
    const R scale = std::exp(log_scale);
    if (!std::isfinite(scale) || scale == 0)
        throw numeric_range_error("gauss_jacobi: weight normalization out of range");

    auto newton = [&](R r, const std::vector<R>& found, int k) {
        for (int it = 0; it < 100; ++it) {
            R s = 0;
            for (int i = 0; i < k; ++i) s += 1 / (r - found[i]);
            const auto [p, dp] = jacobi_p<R>(n, a, b, r);
            const R delta = -p / (dp - s * p);
            r += delta;
            if (std::abs(delta) <= 4 * std::numeric_limits<R>::epsilon()) break;
        }
        return r;
    };

    // Chebyshev-Gauss guesses, Newton with deflation
    std::vector<R> v(n);
    for (int k = 0; k < n; ++k) {
        R r = -std::cos((2 * R(k) + 1) * std::numbers::pi_v<R> / (2 * R(n)));
        if (k > 0) r = (r + v[k - 1]) / 2;
        v[k] = newton(r, v, k);
    }
    bool valid = true;
    for (int k = 0; k < n && valid; ++k)
        valid = v[k] > -1 && v[k] < 1 && (k == 0 || v[k] > v[k - 1]);

    // fallback: bracket the k-th root by Sturm counts, then polish
    if (!valid) {
        for (int k = 0; k < n; ++k) {
            R lo = k == 0 ? R(-1) : v[k - 1], hi = 1;
            for (int it = 0; it < 200 && hi - lo > 64 * std::numeric_limits<R>::epsilon(); ++it) {
                const R mid = (lo + hi) / 2;
                if (detail::jacobi_roots_below<R>(n, a, b, mid) > k) hi = mid;
                else lo = mid;
            }
            v[k] = newton((lo + hi) / 2, v, 0);
            if (!(v[k] > lo - 1e-12L && v[k] < hi + 1e-12L)) v[k] = (lo + hi) / 2;
        }
    }

    for (int k = 0; k < n; ++k) {
        const R vk = v[k];
        const R dp = jacobi_p<R>(n, a, b, vk).second;
        const R w = scale / ((1 - vk) * (1 + vk) * dp * dp);
        rule.nodes[k] = static_cast<double>(vk);
        rule.weights[k] = static_cast<double>(w);
        if (!std::isfinite(rule.weights[k]) || !(rule.weights[k] > 0.0) || !(vk > -1 && vk < 1) ||
            (k > 0 && !(rule.nodes[k] > rule.nodes[k - 1])))
            throw numeric_range_error("gauss_jacobi: rule construction failed for order " +
                                      std::to_string(n));
    }
    return rule;
}

inline JacobiRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

/// Process-wide cache of rules; entries are immutable once built.
inline std::shared_ptr<const JacobiRule> shared_gauss_jacobi(int n, double alpha, double beta) {
    static std::mutex mutex;
    static std::map<std::tuple<int, double, double>, std::shared_ptr<const JacobiRule>> cache;
    const auto key = std::make_tuple(n, alpha, beta);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<const JacobiRule>(gauss_jacobi(n, alpha, beta));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(rule)).first->second;
}

/// Sum of weights of the (alpha, beta) rule: 2^{a+b+1} G(a+1) G(b+1) / G(a+b+2).
inline double jacobi_total_weight(double alpha, double beta) {
    return std::exp((alpha + beta + 1.0) * std::numbers::ln2 + std::lgamma(alpha + 1.0) +
                    std::lgamma(beta + 1.0) - std::lgamma(alpha + beta + 2.0));
}

namespace detail {

/// Shared Gauss-Legendre rules of small orders, built once.
inline const JacobiRule& legendre(int n) {
    static const std::vector<JacobiRule> table = [] {
        std::vector<JacobiRule> t;
        for (int k = 1; k <= 32; ++k) t.push_back(gauss_legendre(k));
        return t;
    }();
    if (n < 1 || n > 32) throw invalid_argument("legendre: order out of range 1..32");
    return table[n - 1];
}

}  // namespace detail
}  // namespace besselsg
