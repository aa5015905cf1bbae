#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ============================================================================
// Tolerances
// ============================================================================
// Every numeric threshold used by the library lives here so the comparisons
// can be audited in one place.
namespace tol {

// LP primal feasibility (absolute, per row).
inline constexpr double feasibility = 1e-8;
// LP objective agreement.
inline constexpr double optimality = 1e-8;
// Reduced-cost / pivot thresholds inside the simplex tableau.
inline constexpr double reduced_cost = 1e-10;
inline constexpr double pivot = 1e-11;

// Leading coefficients below this fraction of max|coeff| are stripped before
// the companion matrix is formed.
inline constexpr double leading_coeff = 1e-12;
// An eigenvalue is real when |imag| <= root_imag * (1 + |real|).
inline constexpr double root_imag = 1e-8;
// Roots closer than root_dedup * interval width are merged.
inline constexpr double root_dedup = 1e-9;

// Relative tolerance for ties between candidate inputs.
inline constexpr double tie = 1e-12;

// Strictness slack for the Lipschitz validation inequality.
inline constexpr double validation_strict = 1e-12;
// Gamma-hat = Gamma_min * (1 + gamma_hat_inflation).
inline constexpr double gamma_hat_inflation = 1e-6;

}  // namespace tol

// ============================================================================
// Errors
// ============================================================================

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector/matrix sizes that do not agree with each other.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Non-finite input or a numerical breakdown.
class NumericError : public Error {
public:
    using Error::Error;
};

// Not enough samples or otherwise unusable data.
class DataError : public Error {
public:
    using Error::Error;
};

// A simulated state became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// Malformed files and configs; carries the offending location.
class ParseError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition)
        throw Error(message);
}

}  // namespace nic
