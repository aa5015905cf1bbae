#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "poly.hpp"

namespace nic {

// Identified one-step-ahead model
//
//     y_{t+1} = sum_i alpha_i phi_i(y_t..y_{t-n+1}, u_t..u_{t-n+1})
//
// Only the terms with nonzero coefficients are stored.  Variable order of a
// full regressor point is (y_t, ..., y_{t-n+1}, u_t, ..., u_{t-n+1}); the
// controller-side regressor q omits u_t:
// q = (y_t, ..., y_{t-n+1}, u_{t-1}, ..., u_{t-n+1}).
struct PolyModel {
    int order = 1;
    int degree = 3;
    AffineScaler scaler;
    std::vector<BasisTerm> terms;
    std::vector<double> coefficients;
    double rho_y = 1.0;
    double rho_u = 1.0;

    [[nodiscard]] std::size_t n_vars() const { return 2 * static_cast<std::size_t>(order); }
    [[nodiscard]] std::size_t input_index() const { return static_cast<std::size_t>(order); }
    [[nodiscard]] std::size_t q_size() const { return n_vars() - 1; }

    [[nodiscard]] double evaluate(std::span<const double> point) const {
        if (point.size() != n_vars())
            throw DimensionError("PolyModel::evaluate: expected " + std::to_string(n_vars()) +
                                 " regressor entries");
        const Vector phi = eval_basis(terms, scaler, point);
        double acc = 0.0;
        for (std::size_t i = 0; i < coefficients.size(); ++i)
            acc += coefficients[i] * phi[static_cast<Eigen::Index>(i)];
        return acc;
    }

    // Splices u_t into q at the input slot.
    [[nodiscard]] std::vector<double> full_point(std::span<const double> q, double u) const {
        if (q.size() != q_size())
            throw DimensionError("PolyModel: q must have 2n-1 = " + std::to_string(q_size()) +
                                 " entries, got " + std::to_string(q.size()));
        std::vector<double> p;
        p.reserve(n_vars());
        const auto n = static_cast<std::size_t>(order);
        p.insert(p.end(), q.begin(), q.begin() + static_cast<std::ptrdiff_t>(n));
        p.push_back(u);
        p.insert(p.end(), q.begin() + static_cast<std::ptrdiff_t>(n), q.end());
        return p;
    }

    [[nodiscard]] double predict(std::span<const double> q, double u) const {
        const auto p = full_point(q, u);
        return evaluate(p);
    }

    [[nodiscard]] std::size_t nonzeros() const {
        std::size_t k = 0;
        for (double a : coefficients)
            if (a != 0.0)
                ++k;
        return k;
    }

    void validate() const {
        if (order < 1)
            throw Error("PolyModel: order must be >= 1");
        if (scaler.size() != n_vars())
            throw DimensionError("PolyModel: scaler arity does not match 2n");
        if (terms.size() != coefficients.size())
            throw DimensionError("PolyModel: term/coefficient count mismatch");
        for (const auto& t : terms)
            if (t.exponents.size() != n_vars())
                throw DimensionError("PolyModel: term arity does not match 2n");
        for (double g : scaler.gain)
            if (!(g > 0.0))
                throw Error("PolyModel: scaler gains must be positive");
        if (!(rho_y > 0.0) || !(rho_u > 0.0))
            throw Error("PolyModel: normalization constants must be positive");
    }
};

// f(q, .) as an explicit polynomial in u.  The argument of the result is the
// scaled input variable, so its coefficients are the model coefficients
// collected by power of u_t.
inline UniPoly restrict_to_u(const PolyModel& model, std::span<const double> q) {
    const auto point = model.full_point(q, model.scaler.offset[model.input_index()]);
    const auto iu = model.input_index();
    const auto powers = detail::scaled_powers(model.scaler, point, detail::max_exponent(model.terms));

    std::vector<double> c(1, 0.0);
    for (std::size_t i = 0; i < model.terms.size(); ++i) {
        const auto& ex = model.terms[i].exponents;
        double w = model.coefficients[i];
        for (std::size_t v = 0; v < ex.size(); ++v)
            if (v != iu)
                w *= powers[v][static_cast<std::size_t>(ex[v])];
        const auto k = static_cast<std::size_t>(ex[iu]);
        if (c.size() <= k)
            c.resize(k + 1, 0.0);
        c[k] += w;
    }
    return UniPoly(std::move(c), model.scaler.offset[iu], model.scaler.gain[iu]);
}

}  // namespace nic
