#pragma once

// Shared helpers for the test suite: seeded generators and tolerance checks.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace besselsg::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng_); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

    /// lambda drawn from a set that covers the singular (< 1/2), flat and large regimes
    double lambda() {
        static const double choices[] = {0.1, 0.3, 0.5, 0.75, 1.0, 1.5, 2.5, 4.0};
        return choices[integer(0, 7)];
    }

    std::vector<double> sequence(int n, double lo = -1.0, double hi = 1.0) {
        std::vector<double> v(n);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

inline double rel_err(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace besselsg::testing
