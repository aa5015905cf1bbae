#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "common.hpp"

namespace nic {

// ============================================================================
// AffineScaler
// ============================================================================
// Maps each raw variable onto [-1, 1] over the range it was fitted on:
// scaled = (raw - offset) / gain.  A variable with zero range keeps gain 1 and
// offset equal to its constant value, so it scales to exactly 0.
struct AffineScaler {
    std::vector<double> offset;
    std::vector<double> gain;

    [[nodiscard]] std::size_t size() const noexcept { return offset.size(); }

    [[nodiscard]] double scale(std::size_t var, double raw) const {
        return (raw - offset[var]) / gain[var];
    }

    [[nodiscard]] double unscale(std::size_t var, double scaled) const {
        return offset[var] + gain[var] * scaled;
    }

    static AffineScaler identity(std::size_t n_vars) {
        return {std::vector<double>(n_vars, 0.0), std::vector<double>(n_vars, 1.0)};
    }

    // One column per variable, one row per sample.
    static AffineScaler fit(const Matrix& samples) {
        if (samples.rows() == 0)
            throw DataError("cannot fit a scaler on zero samples");
        AffineScaler s;
        const auto n = static_cast<std::size_t>(samples.cols());
        s.offset.resize(n);
        s.gain.resize(n);
        for (Eigen::Index j = 0; j < samples.cols(); ++j) {
            const double lo = samples.col(j).minCoeff();
            const double hi = samples.col(j).maxCoeff();
            if (!std::isfinite(lo) || !std::isfinite(hi))
                throw NumericError("non-finite sample while fitting scaler");
            const auto k = static_cast<std::size_t>(j);
            if (hi > lo) {
                s.offset[k] = 0.5 * (hi + lo);
                s.gain[k] = 0.5 * (hi - lo);
            } else {
                s.offset[k] = lo;
                s.gain[k] = 1.0;
            }
        }
        return s;
    }
};

// ============================================================================
// Basis
// ============================================================================

// Monomial in the scaled regressor variables; one exponent per variable.
struct BasisTerm {
    std::vector<int> exponents;

    [[nodiscard]] int degree() const {
        int d = 0;
        for (int e : exponents)
            d += e;
        return d;
    }

    friend bool operator==(const BasisTerm&, const BasisTerm&) = default;
};

namespace detail {

inline void compositions(std::size_t var, int remaining, std::vector<int>& current,
                         std::vector<BasisTerm>& out) {
    if (var + 1 == current.size()) {
        current[var] = remaining;
        out.push_back({current});
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current[var] = e;
        compositions(var + 1, remaining - e, current, out);
    }
    current[var] = 0;
}

}  // namespace detail

// All monomials of total degree <= degree, graded by degree and
// lexicographically descending within a degree:
// (2 vars, degree 2) -> 1, x0, x1, x0^2, x0 x1, x1^2.
inline std::vector<BasisTerm> generate_basis(std::size_t n_vars, int degree) {
    require(n_vars >= 1, "generate_basis: need at least one variable");
    require(degree >= 0, "generate_basis: negative degree");
    std::vector<BasisTerm> out;
    std::vector<int> current(n_vars, 0);
    for (int d = 0; d <= degree; ++d)
        detail::compositions(0, d, current, out);
    return out;
}

namespace detail {

// powers[v][e] = scaled(point[v])^e for e = 0..max_degree
inline std::vector<std::vector<double>> scaled_powers(const AffineScaler& scaler,
                                                      std::span<const double> point,
                                                      int max_degree) {
    std::vector<std::vector<double>> powers(point.size(),
                                            std::vector<double>(static_cast<std::size_t>(max_degree) + 1));
    for (std::size_t v = 0; v < point.size(); ++v) {
        const double x = scaler.scale(v, point[v]);
        double acc = 1.0;
        for (int e = 0; e <= max_degree; ++e) {
            powers[v][static_cast<std::size_t>(e)] = acc;
            acc *= x;
        }
    }
    return powers;
}

inline int max_exponent(const std::vector<BasisTerm>& terms) {
    int m = 0;
    for (const auto& t : terms)
        for (int e : t.exponents)
            m = std::max(m, e);
    return m;
}

}  // namespace detail

// Evaluates every term at a raw point; component i is the product of the
// scaled variables raised to term i's exponents.
inline Vector eval_basis(const std::vector<BasisTerm>& terms, const AffineScaler& scaler,
                         std::span<const double> point) {
    if (point.size() != scaler.size())
        throw DimensionError("eval_basis: point has " + std::to_string(point.size()) +
                             " entries, scaler expects " + std::to_string(scaler.size()));
    const auto powers = detail::scaled_powers(scaler, point, detail::max_exponent(terms));
    Vector out(static_cast<Eigen::Index>(terms.size()));
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& ex = terms[i].exponents;
        if (ex.size() != point.size())
            throw DimensionError("eval_basis: term arity does not match point");
        double p = 1.0;
        for (std::size_t v = 0; v < ex.size(); ++v)
            p *= powers[v][static_cast<std::size_t>(ex[v])];
        out[static_cast<Eigen::Index>(i)] = p;
    }
    return out;
}

// ============================================================================
// UniPoly
// ============================================================================
// Univariate polynomial p(u) = sum_k c_k s^k with s = (u - shift) / scale.
// Keeping the argument in a locally scaled variable keeps the coefficients
// O(1) when u lives on a wide interval, which the root finder relies on.
class UniPoly {
public:
    UniPoly() = default;

    explicit UniPoly(std::vector<double> coefficients, double shift = 0.0, double scale = 1.0)
        : c_(std::move(coefficients)), shift_(shift), scale_(scale) {
        if (!(scale_ > 0.0))
            throw NumericError("UniPoly: argument scale must be positive");
        trim();
    }

    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return c_; }
    [[nodiscard]] double shift() const noexcept { return shift_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }

    // -1 for the zero polynomial.
    [[nodiscard]] int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] bool is_zero() const noexcept { return c_.empty(); }

    [[nodiscard]] double local(double u) const { return (u - shift_) / scale_; }

    [[nodiscard]] double eval_local(double s) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            acc = acc * s + *it;
        return acc;
    }

    double operator()(double u) const { return eval_local(local(u)); }

    [[nodiscard]] bool same_argument(const UniPoly& o) const {
        return shift_ == o.shift_ && scale_ == o.scale_;
    }

    // The linear polynomial u itself, expressed in this polynomial's argument.
    [[nodiscard]] UniPoly identity_like() const { return UniPoly({shift_, scale_}, shift_, scale_); }
    [[nodiscard]] UniPoly constant_like(double v) const { return UniPoly({v}, shift_, scale_); }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        a.check_compatible(b);
        std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i)
            c[i] += b.c_[i];
        return UniPoly(std::move(c), a.shift_, a.scale_);
    }

    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + (-1.0) * b; }

    friend UniPoly operator*(double k, const UniPoly& p) {
        std::vector<double> c = p.c_;
        for (double& x : c)
            x *= k;
        return UniPoly(std::move(c), p.shift_, p.scale_);
    }

    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        a.check_compatible(b);
        if (a.is_zero() || b.is_zero())
            return UniPoly({}, a.shift_, a.scale_);
        std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                c[i + j] += a.c_[i] * b.c_[j];
        return UniPoly(std::move(c), a.shift_, a.scale_);
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0)
            c_.pop_back();
    }

    void check_compatible(const UniPoly& o) const {
        if (!same_argument(o))
            throw DimensionError("UniPoly: operands use different argument maps");
    }

    std::vector<double> c_;
    double shift_ = 0.0;
    double scale_ = 1.0;
};

// Exact derivative with respect to u (not the local variable).
inline UniPoly differentiate(const UniPoly& p) {
    const auto& c = p.coefficients();
    if (c.size() <= 1)
        return UniPoly({}, p.shift(), p.scale());
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k)
        d[k - 1] = static_cast<double>(k) * c[k] / p.scale();
    return UniPoly(std::move(d), p.shift(), p.scale());
}

// ============================================================================
// Real roots
// ============================================================================
// Companion-matrix eigenvalues of the monic polynomial in the local variable,
// followed by a few Newton steps on the original coefficients.
inline std::vector<double> real_roots(const UniPoly& p, double lo, double hi) {
    if (lo > hi)
        throw Error("real_roots: empty interval");
    std::vector<double> c = p.coefficients();
    for (double x : c)
        if (!std::isfinite(x))
            throw NumericError("real_roots: non-finite coefficient");
    if (c.empty())
        return {};

    double cmax = 0.0;
    for (double x : c)
        cmax = std::max(cmax, std::abs(x));
    while (!c.empty() && std::abs(c.back()) < tol::leading_coeff * cmax)
        c.pop_back();
    if (c.size() <= 1)
        return {};

    // Zero roots are split off so the companion matrix stays nonsingular.
    std::size_t zeros = 0;
    while (zeros < c.size() && c[zeros] == 0.0)
        ++zeros;
    std::vector<double> local_roots(zeros > 0 ? 1 : 0, 0.0);
    std::vector<double> q(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end());

    const auto deg = static_cast<Eigen::Index>(q.size()) - 1;
    if (deg == 1) {
        local_roots.push_back(-q[0] / q[1]);
    } else if (deg > 1) {
        Matrix companion = Matrix::Zero(deg, deg);
        for (Eigen::Index i = 1; i < deg; ++i)
            companion(i, i - 1) = 1.0;
        for (Eigen::Index i = 0; i < deg; ++i)
            companion(i, deg - 1) = -q[static_cast<std::size_t>(i)] / q.back();
        Eigen::EigenSolver<Matrix> es(companion, false);
        if (es.info() != Eigen::Success)
            throw NumericError("real_roots: eigenvalue iteration did not converge");
        const auto ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            const std::complex<double> z = ev[i];
            if (std::abs(z.imag()) <= tol::root_imag * (1.0 + std::abs(z.real())))
                local_roots.push_back(z.real());
        }
    }

    const UniPoly local_poly(c);
    const UniPoly local_deriv = differentiate(local_poly);
    for (double& s : local_roots) {
        for (int it = 0; it < 3; ++it) {
            const double f = local_poly.eval_local(s);
            const double df = local_deriv.eval_local(s);
            if (df == 0.0 || !std::isfinite(f / df))
                break;
            const double next = s - f / df;
            if (std::abs(local_poly.eval_local(next)) >= std::abs(f))
                break;
            s = next;
        }
    }

    const double width = hi - lo;
    const double slack = tol::root_dedup * std::max(width, 1e-300);
    std::vector<double> out;
    for (double s : local_roots) {
        const double u = p.shift() + p.scale() * s;
        if (u >= lo - slack && u <= hi + slack)
            out.push_back(std::clamp(u, lo, hi));
    }
    std::sort(out.begin(), out.end());
    std::vector<double> dedup;
    for (double u : out)
        if (dedup.empty() || u - dedup.back() > slack)
            dedup.push_back(u);
    return dedup;
}

}  // namespace nic
