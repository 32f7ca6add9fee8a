#pragma once

// Decreasing time samples t_1 > t_2 > ... > t_n > 0 (the anchors) with m - 1
// geometric interior points per slot [t_{j+1}, t_j]. Interior points are
// t_{j+1} exp((k/m) log(t_j / t_{j+1})), so doubling m keeps every old sample
// bit for bit.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "besselsg/error.hpp"

namespace besselsg {

class TimeGrid {
public:
    TimeGrid(std::vector<double> anchors, int refine) : anchors_(std::move(anchors)), refine_(refine) {
        if (anchors_.size() < 2) throw invalid_argument("TimeGrid: need at least two anchors");
        if (refine_ < 2) throw invalid_argument("TimeGrid: refinement must be at least 2");
        for (std::size_t i = 0; i < anchors_.size(); ++i) {
            if (!(anchors_[i] > 0.0) || !std::isfinite(anchors_[i]))
                throw invalid_argument("TimeGrid: anchors must be positive and finite");
            if (i > 0 && !(anchors_[i] < anchors_[i - 1]))
                throw invalid_argument("TimeGrid: anchors must be strictly decreasing");
        }
        build();
    }

    /// t_j = 2^{-j} t_max, j = 0..slots.
    static TimeGrid dyadic(double t_max, int slots, int refine) {
        if (slots < 1) throw invalid_argument("TimeGrid: need at least one slot");
        std::vector<double> a(static_cast<std::size_t>(slots) + 1);
        for (int j = 0; j <= slots; ++j) a[j] = std::ldexp(t_max, -j);
        return TimeGrid(std::move(a), refine);
    }

    /// t_j = t_max q^j, j = 0..count-1.
    static TimeGrid geometric(double t_max, double q, int count, int refine) {
        if (!(q > 0.0 && q < 1.0)) throw invalid_argument("TimeGrid: ratio must lie in (0, 1)");
        if (count < 2) throw invalid_argument("TimeGrid: need at least two anchors");
        std::vector<double> a(static_cast<std::size_t>(count));
        for (int j = 0; j < count; ++j) a[j] = t_max * std::pow(q, j);
        return TimeGrid(std::move(a), refine);
    }

    const std::vector<double>& anchors() const noexcept { return anchors_; }
    int refine() const noexcept { return refine_; }
    std::size_t slots() const noexcept { return anchors_.size() - 1; }
    double t_max() const noexcept { return anchors_.front(); }
    double t_min() const noexcept { return anchors_.back(); }

    /// All samples, decreasing.
    const std::vector<double>& samples() const noexcept { return samples_; }

    /// Sample indices [first, last] covering slot j = [t_{j+1}, t_j].
    std::pair<std::size_t, std::size_t> slot_range(std::size_t j) const {
        if (j >= slots()) throw invalid_argument("TimeGrid: slot index out of range");
        const std::size_t first = j * static_cast<std::size_t>(refine_);
        return {first, first + static_cast<std::size_t>(refine_)};
    }

    TimeGrid refined() const { return TimeGrid(anchors_, 2 * refine_); }

    std::string describe() const {
        return "anchors=" + std::to_string(anchors_.size()) + " t_max=" + std::to_string(t_max()) +
               " t_min=" + std::to_string(t_min()) + " refine=" + std::to_string(refine_);
    }

private:
    void build() {
        samples_.clear();
        samples_.reserve(slots() * refine_ + 1);
        for (std::size_t j = 0; j < slots(); ++j) {
            samples_.push_back(anchors_[j]);
            const double lo = anchors_[j + 1];
            const double span = std::log(anchors_[j] / lo);
            for (int k = refine_ - 1; k >= 1; --k)
                samples_.push_back(lo * std::exp(static_cast<double>(k) / refine_ * span));
        }
        samples_.push_back(anchors_.back());
    }

    std::vector<double> anchors_;
    int refine_;
    std::vector<double> samples_;
};

}  // namespace besselsg
