#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "besselsg/jacobi.hpp"
#include "support.hpp"

using namespace besselsg;

namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix of the
// monic Jacobi recurrence. Independent of the Newton construction.
JacobiRule golub_welsch(int n, double a, double b) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        J(k, k) = k == 0 ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
        if (k + 1 < n) {
            const double m = k + 1.0;
            const double t = 2.0 * m + a + b;
            // the m = 1 term is written without the removable 0/0 at a + b = -1
            const double off = k == 0 ? 4.0 * (1.0 + a) * (1.0 + b) / (t * t * (t + 1.0))
                                      : 4.0 * m * (m + a) * (m + b) * (m + a + b) / (t * t * (t + 1.0) * (t - 1.0));
            J(k, k + 1) = J(k + 1, k) = std::sqrt(off);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    JacobiRule r;
    r.order = n;
    const double mu0 = jacobi_total_weight(a, b);
    for (int k = 0; k < n; ++k) {
        r.nodes.push_back(es.eigenvalues()(k));
        const double v0 = es.eigenvectors()(0, k);
        r.weights.push_back(mu0 * v0 * v0);
    }
    return r;
}

}  // namespace

TEST(GaussJacobi, MatchesGolubWelsch) {
    for (double a : {-0.8, -0.5, 0.0, 0.5, 1.5, 3.0}) {
        for (double b : {-0.8, -0.5, 0.0, 0.5, 3.0, 7.0}) {
            for (int n : {2, 3, 8, 17, 40}) {
                const auto r = gauss_jacobi(n, a, b);
                const auto o = golub_welsch(n, a, b);
                double wsum = 0.0;
                for (int k = 0; k < n; ++k) wsum += o.weights[k];
                for (int k = 0; k < n; ++k) {
                    EXPECT_NEAR(r.nodes[k], o.nodes[k], 1e-13) << a << " " << b << " " << n << " " << k;
                    EXPECT_NEAR(r.weights[k] / wsum, o.weights[k] / wsum, 1e-12) << a << " " << b << " " << n;
                }
            }
        }
    }
}

TEST(GaussJacobi, ExactForPolynomialMoments) {
    // int (1-v)^a (1+v)^b v^j dv via the Beta function of the shifted variable
    // for j = 1: mean of v under the Beta law is (b - a) / (a + b + 2)
    for (double a : {-0.5, 0.0, 1.5}) {
        for (double b : {-0.5, 0.0, 2.5}) {
            const auto r = gauss_jacobi(6, a, b);
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            for (int k = 0; k < 6; ++k) {
                s0 += r.weights[k];
                s1 += r.weights[k] * r.nodes[k];
                s2 += r.weights[k] * r.nodes[k] * r.nodes[k];
            }
            const double mu0 = jacobi_total_weight(a, b);
            EXPECT_NEAR(s0 / mu0, 1.0, 1e-14);
            EXPECT_NEAR(s1 / mu0, (b - a) / (a + b + 2.0), 1e-14);
            // E[w^2] of w = (1+v)/2 ~ Beta(b+1, a+1)
            const double al = b + 1.0, be = a + 1.0;
            const double ew2 = al * (al + 1.0) / ((al + be) * (al + be + 1.0));
            const double ew = al / (al + be);
            EXPECT_NEAR(s2 / mu0, 4.0 * ew2 - 4.0 * ew + 1.0, 1e-14);
        }
    }
}

TEST(GaussJacobi, LargeOrdersStayOrdered) {
    for (double a : {-0.9, 0.0, 1.5, 3.0}) {
        const auto r = gauss_jacobi(192, a, a);
        for (int k = 1; k < r.order; ++k) EXPECT_LT(r.nodes[k - 1], r.nodes[k]);
        for (int k = 0; k < r.order; ++k) EXPECT_NEAR(r.nodes[k], -r.nodes[r.order - 1 - k], 1e-14);
    }
}

TEST(GaussJacobi, LargeExponentsAndOrders) {
    for (double a : {-0.9, 6.5}) {
        for (int n : {24, 96, 192}) {
            const auto r = gauss_jacobi(n, a, a);
            const auto o = golub_welsch(n, a, a);
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                EXPECT_NEAR(r.nodes[k], o.nodes[k], 1e-12) << a << " " << n;
                s += r.weights[k];
            }
            EXPECT_NEAR(s / jacobi_total_weight(a, a), 1.0, 1e-13) << a << " " << n;
        }
    }
}

TEST(GaussJacobi, SturmCountsBracketRoots) {
    const auto r = gauss_jacobi(30, 2.0, -0.5);
    for (int k = 0; k < 30; ++k) {
        EXPECT_EQ(detail::jacobi_roots_below<long double>(30, 2.0L, -0.5L, r.nodes[k] - 1e-9), k);
        EXPECT_EQ(detail::jacobi_roots_below<long double>(30, 2.0L, -0.5L, r.nodes[k] + 1e-9), k + 1);
    }
}

TEST(GaussJacobi, RejectsBadArguments) {
    EXPECT_THROW(gauss_jacobi(0, 0.0, 0.0), invalid_argument);
    EXPECT_THROW(gauss_jacobi(4, -1.0, 0.0), invalid_argument);
    EXPECT_THROW(gauss_jacobi(4, 0.0, -1.5), invalid_argument);
}
