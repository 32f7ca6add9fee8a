#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace besselsg {

/// Bad argument at an API boundary (nonpositive radius, p < 1, ...).
class invalid_argument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A grid function is undefined on part of the region an operation needs.
class coverage_error : public std::runtime_error {
public:
    coverage_error(const std::string& what, double gap_lo, double gap_hi)
        : std::runtime_error(what + " (uncovered: [" + std::to_string(gap_lo) + ", " +
                             std::to_string(gap_hi) + "])"),
          gap_lo_(gap_lo), gap_hi_(gap_hi) {}
    double gap_lo() const noexcept { return gap_lo_; }
    double gap_hi() const noexcept { return gap_hi_; }

private:
    double gap_lo_, gap_hi_;
};

/// Quadrature error estimate exceeded the declared tolerance.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double estimate, double tolerance)
        : std::runtime_error(what + " (estimate " + std::to_string(estimate) + " > tolerance " +
                             std::to_string(tolerance) + ")"),
          estimate_(estimate), tolerance_(tolerance) {}
    double estimate() const noexcept { return estimate_; }
    double tolerance() const noexcept { return tolerance_; }

private:
    double estimate_, tolerance_;
};

/// Half-line truncation could not be certified by the supplied majorant.
class truncation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Overflow or underflow in rule construction.
class numeric_range_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid resolution too coarse for the requested object.
class resolution_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integrand returned a non-finite value at a quadrature node.
class evaluation_error : public std::runtime_error {
public:
    evaluation_error(const std::string& what, double node)
        : std::runtime_error(what + " at node " + std::to_string(node)), node_(node) {}
    double node() const noexcept { return node_; }

private:
    double node_;
};

/// An atom in a decomposition failed validation.
class invalid_atom : public std::runtime_error {
public:
    invalid_atom(const std::string& what, std::size_t index)
        : std::runtime_error(what + " (atom index " + std::to_string(index) + ")"), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Run-config parse or validation failure; `field` names the offending key.
class config_error : public std::runtime_error {
public:
    config_error(const std::string& field, const std::string& what)
        : std::runtime_error("config field '" + field + "': " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace besselsg
