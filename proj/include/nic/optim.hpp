#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "common.hpp"

namespace nic {

// ============================================================================
// Linear programming
// ============================================================================
//
//     minimize    objective^T x
//     subject to  A x <= b,   lower <= x <= upper
//
// Empty `lower`/`upper` mean -inf/+inf for every variable.
//
// The solver converts the problem to  min c^T z, A z <= b, z >= 0  and runs a
// dense two-phase tableau simplex on its dual,
//
//     minimize b^T l   subject to  -A^T l + s = c,   l, s >= 0,
//
// whose tableau has one row per primal variable.  Identification LPs have a
// few dozen variables and thousands of inequality rows, so the dual tableau
// is far smaller than the primal one.  Pricing is Dantzig's rule; after a run
// of degenerate pivots the solver switches to Bland's rule until the
// objective moves again, which rules out cycling.

struct LinearProgram {
    Vector objective;
    Matrix A;
    Vector b;
    Vector lower;
    Vector upper;
};

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LPStatus s) {
    switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    case LPStatus::iteration_limit: return "iteration_limit";
    }
    return "?";
}

struct LPSolution {
    LPStatus status = LPStatus::infeasible;
    Vector x;
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    // Optimal value of the phase-1 problem  min t  s.t.  A x <= b + t.
    double infeasibility = 0.0;
    int iterations = 0;
};

struct LPOptions {
    // Skip the phase-1 residual problem when feasibility is known a priori.
    bool assume_feasible = false;
    // Stop after the phase-1 residual problem; x is then any feasible point.
    bool feasibility_only = false;
    // 0 selects a limit proportional to the tableau size.
    int max_iterations = 0;
};

namespace detail {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct StandardResult {
    enum class Status { optimal, infeasible, unbounded, iteration_limit } status;
    RowMajorMatrix tableau;         // (rows + 1) x (cols + artificials + 1)
    std::vector<Eigen::Index> basis;
    int iterations = 0;
};

// minimize g^T v  subject to  M v = r, v >= 0.
// unit_col[i] is the index of a column equal to e_i, or -1.
class TableauSimplex {
public:
    TableauSimplex(const Matrix& M, const Vector& r, const Vector& g,
                   const std::vector<Eigen::Index>& unit_col, int max_iterations)
        : rows_(M.rows()), cols_(M.cols()), g_(g) {
        std::vector<double> sign(static_cast<std::size_t>(rows_), 1.0);
        std::vector<Eigen::Index> art_rows;
        for (Eigen::Index i = 0; i < rows_; ++i) {
            if (r[i] < 0.0)
                sign[static_cast<std::size_t>(i)] = -1.0;
            if (sign[static_cast<std::size_t>(i)] < 0.0 || unit_col[static_cast<std::size_t>(i)] < 0)
                art_rows.push_back(i);
        }
        n_art_ = static_cast<Eigen::Index>(art_rows.size());
        const Eigen::Index width = cols_ + n_art_ + 1;
        t_ = RowMajorMatrix::Zero(rows_ + 1, width);
        basis_.assign(static_cast<std::size_t>(rows_), -1);
        for (Eigen::Index i = 0; i < rows_; ++i) {
            const double s = sign[static_cast<std::size_t>(i)];
            t_.row(i).head(cols_) = s * M.row(i);
            t_(i, width - 1) = s * r[i];
            if (s > 0.0 && unit_col[static_cast<std::size_t>(i)] >= 0)
                basis_[static_cast<std::size_t>(i)] = unit_col[static_cast<std::size_t>(i)];
        }
        for (Eigen::Index a = 0; a < n_art_; ++a) {
            const Eigen::Index i = art_rows[static_cast<std::size_t>(a)];
            t_(i, cols_ + a) = 1.0;
            basis_[static_cast<std::size_t>(i)] = cols_ + a;
        }
        t0_ = t_.topRows(rows_);
        max_iter_ = max_iterations > 0 ? max_iterations
                                       : static_cast<int>(std::min<Eigen::Index>(50 * (rows_ + width), 2000000));
    }

    StandardResult run() {
        using S = StandardResult::Status;
        if (n_art_ > 0) {
            // Phase 1: minimize the sum of artificials.
            cost_ = Vector::Zero(cols_ + n_art_);
            cost_.tail(n_art_).setOnes();
            load_objective();
            const auto st = iterate(cols_ + n_art_);
            if (st == S::iteration_limit)
                return finish(st);
            reinvert();
            const double phase1 = -t_(rows_, t_.cols() - 1);
            const double scale = 1.0 + t_.col(t_.cols() - 1).head(rows_).cwiseAbs().maxCoeff();
            if (phase1 > tol::feasibility * scale)
                return finish(S::infeasible);
            drive_out_artificials();
        }
        cost_ = Vector::Zero(cols_ + n_art_);
        cost_.head(cols_) = g_;
        load_objective();
        const Vector r0 = t0_.col(t0_.cols() - 1);
        perturb();
        const auto st = iterate(cols_);
        t0_.col(t0_.cols() - 1) = r0;
        reinvert();
        return finish(st);
    }

private:
    StandardResult finish(StandardResult::Status s) {
        return {s, std::move(t_), std::move(basis_), iterations_};
    }

    void load_objective() {
        t_.row(rows_).setZero();
        t_.row(rows_).head(cost_.size()) = cost_.transpose();
        for (Eigen::Index i = 0; i < rows_; ++i) {
            const double cb = cost_[basis_[static_cast<std::size_t>(i)]];
            if (cb != 0.0)
                t_.row(rows_) -= cb * t_.row(i);
        }
    }

    // Shifts every basic value up by a small distinct amount, which breaks
    // ties in the ratio test.  The shift is folded into the stored right-hand
    // side so reinversion reproduces it; reduced costs are unaffected.
    void perturb() {
        const Eigen::Index rhs = t_.cols() - 1;
        const double scale = 1.0 + t_.col(rhs).head(rows_).cwiseAbs().maxCoeff();
        Matrix B(rows_, rows_);
        for (Eigen::Index k = 0; k < rows_; ++k) {
            const double frac = std::fmod(0.6180339887498949 * static_cast<double>(k + 1), 1.0);
            t_(k, rhs) = std::max(t_(k, rhs), 0.0) + kPerturbation * scale * (1.0 + frac);
            B.col(k) = t0_.col(basis_[static_cast<std::size_t>(k)]);
        }
        t0_.col(rhs) = B * t_.col(rhs).head(rows_);
    }

    // Rebuilds the tableau from the original rows and the current basis,
    // discarding the rounding error accumulated by successive pivots.
    void reinvert() {
        Matrix B(rows_, rows_);
        for (Eigen::Index k = 0; k < rows_; ++k)
            B.col(k) = t0_.col(basis_[static_cast<std::size_t>(k)]);
        Eigen::PartialPivLU<Matrix> lu(B);
        const double rc = lu.rcond();
        if (!(rc > 1e-14))
            return;
        RowMajorMatrix fresh = lu.solve(t0_);
        if (!fresh.allFinite())
            return;
        t_.topRows(rows_) = fresh;
        for (Eigen::Index k = 0; k < rows_; ++k) {
            const Eigen::Index j = basis_[static_cast<std::size_t>(k)];
            t_.col(j).head(rows_).setZero();
            t_(k, j) = 1.0;
        }
        load_objective();
    }

    void pivot(Eigen::Index p, Eigen::Index q) {
        t_.row(p) /= t_(p, q);
        t_(p, q) = 1.0;
        for (Eigen::Index i = 0; i <= rows_; ++i) {
            if (i == p)
                continue;
            const double f = t_(i, q);
            if (f != 0.0) {
                t_.row(i) -= f * t_.row(p);
                t_(i, q) = 0.0;
            }
        }
        basis_[static_cast<std::size_t>(p)] = q;
        ++iterations_;
        if (++since_reinvert_ >= kReinvertPeriod) {
            since_reinvert_ = 0;
            reinvert();
        }
    }

    // Columns >= allowed_cols never enter.
    StandardResult::Status iterate(Eigen::Index allowed_cols) {
        using S = StandardResult::Status;
        const Eigen::Index rhs = t_.cols() - 1;
        int degenerate_run = 0;
        bool bland = false;
        for (;;) {
            if (iterations_ >= max_iter_)
                return S::iteration_limit;

            Eigen::Index q = -1;
            double best = -tol::reduced_cost;
            for (Eigen::Index j = 0; j < allowed_cols; ++j) {
                const double d = t_(rows_, j);
                if (d < best) {
                    q = j;
                    if (bland)
                        break;
                    best = d;
                }
            }
            if (q < 0)
                return S::optimal;

            // Harris two-pass ratio test: bound the step with slightly
            // relaxed right-hand sides, then take the largest pivot among
            // the rows that block within that bound.  Under Bland's rule the
            // plain minimum ratio with lowest-index tie-break is used.
            const double slack = bland ? 0.0 : kHarrisSlack;
            double bound = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows_; ++i) {
                const double a = t_(i, q);
                if (a > tol::pivot)
                    bound = std::min(bound, (std::max(t_(i, rhs), 0.0) + slack) / a);
            }
            if (!std::isfinite(bound))
                return S::unbounded;
            if (bland)
                bound += 1e-12 * (1.0 + bound);
            Eigen::Index p = -1;
            double best_a = 0.0;
            for (Eigen::Index i = 0; i < rows_; ++i) {
                const double a = t_(i, q);
                if (a <= tol::pivot || std::max(t_(i, rhs), 0.0) / a > bound)
                    continue;
                const bool take = p < 0 || (bland ? basis_[static_cast<std::size_t>(i)] <
                                                        basis_[static_cast<std::size_t>(p)]
                                                  : a > best_a);
                if (take) {
                    p = i;
                    best_a = a;
                }
            }

            const double before = t_(rows_, rhs);
            pivot(p, q);
            // Keep basic values nonnegative after the relaxed step.
            if (t_(p, rhs) < 0.0)
                t_(p, rhs) = 0.0;
            // The objective row holds -z; progress means it grew.
            if (t_(rows_, rhs) - before <= 1e-12 * (1.0 + std::abs(before))) {
                if (++degenerate_run > 50)
                    bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    void drive_out_artificials() {
        for (Eigen::Index i = 0; i < rows_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < cols_)
                continue;
            Eigen::Index best = -1;
            double mag = tol::pivot;
            for (Eigen::Index j = 0; j < cols_; ++j) {
                const double a = std::abs(t_(i, j));
                if (a > mag) {
                    mag = a;
                    best = j;
                }
            }
            if (best >= 0)
                pivot(i, best);
        }
    }

    static constexpr int kReinvertPeriod = 64;
    static constexpr double kHarrisSlack = 1e-10;
    static constexpr double kPerturbation = 1e-9;

    Eigen::Index rows_, cols_, n_art_ = 0;
    Vector g_;
    Vector cost_;
    RowMajorMatrix t_;
    RowMajorMatrix t0_;  // constraint rows as loaded, without objective
    int since_reinvert_ = 0;
    std::vector<Eigen::Index> basis_;
    int iterations_ = 0;
    int max_iter_ = 0;
};

inline double max_violation(const Matrix& A, const Vector& b, const Vector& z) {
    double v = 0.0;
    if (A.rows() > 0)
        v = std::max(v, (A * z - b).maxCoeff());
    if (z.size() > 0)
        v = std::max(v, (-z).maxCoeff());
    return v;
}

struct NonnegResult {
    LPStatus status;
    Vector z;
    int iterations;
};

// minimize c^T z  subject to  A z <= b,  z >= 0, solved through the dual.
inline NonnegResult solve_nonneg(const Vector& c, const Matrix& A, const Vector& b, int max_iterations) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (n == 0) {
        const bool ok = m == 0 || b.minCoeff() >= -tol::feasibility;
        return {ok ? LPStatus::optimal : LPStatus::infeasible, Vector(0), 0};
    }

    Matrix M(n, m + n);
    M.leftCols(m) = -A.transpose();
    M.rightCols(n).setIdentity();
    Vector g = Vector::Zero(m + n);
    g.head(m) = b;
    std::vector<Eigen::Index> unit(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        unit[static_cast<std::size_t>(i)] = m + i;

    TableauSimplex simplex(M, c, g, unit, max_iterations);
    auto res = simplex.run();
    using S = StandardResult::Status;
    switch (res.status) {
    case S::iteration_limit: return {LPStatus::iteration_limit, Vector::Zero(n), res.iterations};
    // Dual infeasible: the primal is unbounded (or infeasible, which the
    // caller has ruled out with the phase-1 problem).
    case S::infeasible: return {LPStatus::unbounded, Vector::Zero(n), res.iterations};
    // Dual unbounded: Farkas certificate of primal infeasibility.
    case S::unbounded: return {LPStatus::infeasible, Vector::Zero(n), res.iterations};
    case S::optimal: break;
    }

    // Primal values are the reduced costs of the dual slack columns.
    Vector z_tab(n);
    for (Eigen::Index i = 0; i < n; ++i)
        z_tab[i] = std::max(0.0, res.tableau(n, m + i));

    // Refine by solving B^T y = g_B with the original columns; z = -y.
    Vector z = z_tab;
    Matrix B(n, n);
    Vector gB(n);
    bool usable = true;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index j = res.basis[static_cast<std::size_t>(k)];
        if (j >= m + n) {
            usable = false;
            break;
        }
        B.col(k) = M.col(j);
        gB[k] = g[j];
    }
    if (usable) {
        Eigen::PartialPivLU<Matrix> lu(B.transpose());
        Vector z_ref = -(lu.solve(gB));
        if (z_ref.allFinite()) {
            z_ref = z_ref.cwiseMax(0.0);
            if (max_violation(A, b, z_ref) <= max_violation(A, b, z_tab) + 1e-15 &&
                std::abs(c.dot(z_ref) - c.dot(z_tab)) <= 1e-7 * (1.0 + std::abs(c.dot(z_tab))))
                z = z_ref;
        }
    }
    return {LPStatus::optimal, z, res.iterations};
}

// Reformulation of a bounded-variable LP onto z >= 0:  x = S z + shift.
struct NonnegForm {
    Matrix S;
    Vector shift;
    Matrix A;
    Vector b;
    Vector c;
};

inline NonnegForm to_nonneg(const LinearProgram& lp) {
    const Eigen::Index n = lp.objective.size();
    const double inf = std::numeric_limits<double>::infinity();
    auto lo = [&](Eigen::Index j) { return lp.lower.size() ? lp.lower[j] : -inf; };
    auto hi = [&](Eigen::Index j) { return lp.upper.size() ? lp.upper[j] : inf; };

    std::vector<std::pair<Eigen::Index, double>> cols;  // (x index, sign)
    Vector shift = Vector::Zero(n);
    std::vector<std::pair<Eigen::Index, double>> ub_rows;  // (z column, bound)
    for (Eigen::Index j = 0; j < n; ++j) {
        const double l = lo(j), h = hi(j);
        if (std::isfinite(l)) {
            shift[j] = l;
            cols.emplace_back(j, 1.0);
            if (std::isfinite(h))
                ub_rows.emplace_back(static_cast<Eigen::Index>(cols.size()) - 1, h - l);
        } else if (std::isfinite(h)) {
            shift[j] = h;
            cols.emplace_back(j, -1.0);
        } else {
            cols.emplace_back(j, 1.0);
            cols.emplace_back(j, -1.0);
        }
    }
    const auto nz = static_cast<Eigen::Index>(cols.size());
    NonnegForm f;
    f.S = Matrix::Zero(n, nz);
    for (Eigen::Index k = 0; k < nz; ++k)
        f.S(cols[static_cast<std::size_t>(k)].first, k) = cols[static_cast<std::size_t>(k)].second;
    f.shift = shift;

    const Eigen::Index m = lp.A.rows();
    const auto mu = static_cast<Eigen::Index>(ub_rows.size());
    f.A = Matrix::Zero(m + mu, nz);
    f.b = Vector::Zero(m + mu);
    if (m > 0) {
        f.A.topRows(m) = lp.A * f.S;
        f.b.head(m) = lp.b - lp.A * shift;
    }
    for (Eigen::Index r = 0; r < mu; ++r) {
        f.A(m + r, ub_rows[static_cast<std::size_t>(r)].first) = 1.0;
        f.b[m + r] = ub_rows[static_cast<std::size_t>(r)].second;
    }
    f.c = f.S.transpose() * lp.objective;
    return f;
}

inline void check_lp(const LinearProgram& lp) {
    const Eigen::Index n = lp.objective.size();
    if (lp.A.rows() > 0 && lp.A.cols() != n)
        throw DimensionError("LinearProgram: A has " + std::to_string(lp.A.cols()) + " columns, objective has " +
                             std::to_string(n));
    if (lp.b.size() != lp.A.rows())
        throw DimensionError("LinearProgram: b length does not match A rows");
    if ((lp.lower.size() != 0 && lp.lower.size() != n) || (lp.upper.size() != 0 && lp.upper.size() != n))
        throw DimensionError("LinearProgram: bound vectors must be empty or match the variable count");
    if (!lp.objective.allFinite() || !lp.A.allFinite() || !lp.b.allFinite())
        throw NumericError("LinearProgram: non-finite coefficient");
    for (Eigen::Index j = 0; j < lp.lower.size(); ++j)
        if (std::isnan(lp.lower[j]) || lp.lower[j] == std::numeric_limits<double>::infinity())
            throw NumericError("LinearProgram: invalid lower bound");
    for (Eigen::Index j = 0; j < lp.upper.size(); ++j)
        if (std::isnan(lp.upper[j]) || lp.upper[j] == -std::numeric_limits<double>::infinity())
            throw NumericError("LinearProgram: invalid upper bound");
}

// min t  s.t.  A z - t <= b,  z, t >= 0.  Returns (t*, z).
inline std::pair<double, NonnegResult> phase_one(const Matrix& A, const Vector& b, int max_iterations) {
    const Eigen::Index m = A.rows(), n = A.cols();
    if (m == 0 || b.minCoeff() >= 0.0)
        return {0.0, {LPStatus::optimal, Vector::Zero(n), 0}};
    Matrix A1(m, n + 1);
    A1.leftCols(n) = A;
    A1.col(n).setConstant(-1.0);
    Vector c1 = Vector::Zero(n + 1);
    c1[n] = 1.0;
    auto r = solve_nonneg(c1, A1, b, max_iterations);
    if (r.status != LPStatus::optimal)
        return {std::numeric_limits<double>::infinity(), {r.status, Vector::Zero(n), r.iterations}};
    const Vector z = r.z.head(n);
    // Report the residual of the recovered point rather than the LP value.
    const double t = std::max(0.0, (A * z - b).maxCoeff());
    return {t, {LPStatus::optimal, z, r.iterations}};
}

}  // namespace detail

inline LPSolution solve_lp(const LinearProgram& lp, const LPOptions& opts = {}) {
    detail::check_lp(lp);
    const auto f = detail::to_nonneg(lp);
    LPSolution sol;

    if (!opts.assume_feasible) {
        auto [t, p1] = detail::phase_one(f.A, f.b, opts.max_iterations);
        sol.iterations += p1.iterations;
        if (p1.status == LPStatus::iteration_limit) {
            sol.status = LPStatus::iteration_limit;
            return sol;
        }
        sol.infeasibility = t;
        if (t > tol::feasibility) {
            sol.status = LPStatus::infeasible;
            return sol;
        }
        if (opts.feasibility_only) {
            sol.status = LPStatus::optimal;
            sol.x = f.S * p1.z + f.shift;
            sol.objective_value = lp.objective.dot(sol.x);
            return sol;
        }
    }

    auto r = detail::solve_nonneg(f.c, f.A, f.b, opts.max_iterations);
    sol.iterations += r.iterations;
    sol.status = r.status;
    if (r.status == LPStatus::optimal) {
        sol.x = f.S * r.z + f.shift;
        sol.objective_value = lp.objective.dot(sol.x);
        sol.infeasibility = std::max(0.0, detail::max_violation(f.A, f.b, r.z));
    }
    return sol;
}

// ============================================================================
// Regression LPs
// ============================================================================

// Inequalities G beta <= h.
struct LinearConstraints {
    Matrix G;
    Vector h;

    [[nodiscard]] Eigen::Index size() const { return G.rows(); }
};

struct LinfFit {
    LPStatus status = LPStatus::optimal;
    double eta = 0.0;
    Vector beta;
};

// eta = min_beta || y - Phi beta ||_inf, through one bounding slack t:
// -t <= y_k - Phi_k beta <= t.
inline LinfFit min_linf(const Matrix& phi, const Vector& y) {
    if (phi.rows() != y.size())
        throw DimensionError("min_linf: Phi rows must match y length");
    const Eigen::Index N = phi.cols(), m = phi.rows();
    LinfFit out;
    if (m == 0) {
        out.beta = Vector::Zero(N);
        return out;
    }
    if (N == 0 || phi.cwiseAbs().maxCoeff() == 0.0) {
        out.beta = Vector::Zero(N);
        out.eta = y.cwiseAbs().maxCoeff();
        return out;
    }
    LinearProgram lp;
    lp.objective = Vector::Zero(N + 1);
    lp.objective[N] = 1.0;
    lp.A.resize(2 * m, N + 1);
    lp.A.topLeftCorner(m, N) = phi;
    lp.A.bottomLeftCorner(m, N) = -phi;
    lp.A.col(N).setConstant(-1.0);
    lp.b.resize(2 * m);
    lp.b.head(m) = y;
    lp.b.tail(m) = -y;
    lp.lower = Vector::Constant(N + 1, -std::numeric_limits<double>::infinity());
    lp.lower[N] = 0.0;
    lp.upper = Vector::Constant(N + 1, std::numeric_limits<double>::infinity());

    LPOptions opts;
    opts.assume_feasible = true;
    const auto sol = solve_lp(lp, opts);
    out.status = sol.status;
    if (sol.status != LPStatus::optimal) {
        out.beta = Vector::Zero(N);
        out.eta = y.cwiseAbs().maxCoeff();
        return out;
    }
    out.beta = sol.x.head(N);
    out.eta = (y - phi * out.beta).cwiseAbs().maxCoeff();
    return out;
}

namespace detail {

inline LinearProgram l1_program(const Matrix& phi, const Vector& y, const LinearConstraints& sc, double eta,
                                double rho) {
    if (phi.rows() != y.size())
        throw DimensionError("min_l1_constrained: Phi rows must match y length");
    if (sc.size() > 0 && sc.G.cols() != phi.cols())
        throw DimensionError("min_l1_constrained: constraint width must match Phi columns");
    if (sc.h.size() != sc.G.rows())
        throw DimensionError("min_l1_constrained: constraint rhs length mismatch");
    if (!(eta >= 0.0))
        throw Error("min_l1_constrained: eta must be >= 0");
    if (!(rho >= 1.0))
        throw Error("min_l1_constrained: rho must be >= 1");

    const Eigen::Index N = phi.cols(), m = phi.rows(), p = sc.size();
    const double band = eta * rho;
    LinearProgram lp;
    lp.objective = Vector::Ones(2 * N);
    lp.A.resize(p + 2 * m, 2 * N);
    lp.b.resize(p + 2 * m);
    if (p > 0) {
        lp.A.block(0, 0, p, N) = sc.G;
        lp.A.block(0, N, p, N) = -sc.G;
        lp.b.head(p) = sc.h;
    }
    lp.A.block(p, 0, m, N) = phi;
    lp.A.block(p, N, m, N) = -phi;
    lp.b.segment(p, m) = y.array() + band;
    lp.A.block(p + m, 0, m, N) = -phi;
    lp.A.block(p + m, N, m, N) = phi;
    lp.b.segment(p + m, m) = -y.array() + band;
    lp.lower = Vector::Zero(2 * N);
    return lp;
}

inline LPSolution collapse_split(LPSolution sol, Eigen::Index N) {
    if (sol.x.size() == 2 * N) {
        Vector beta = sol.x.head(N) - sol.x.tail(N);
        sol.x = beta;
        sol.objective_value = beta.lpNorm<1>();
    }
    return sol;
}

}  // namespace detail

// alpha = argmin ||beta||_1  s.t.  G beta <= h  and  ||y - Phi beta||_inf <= eta rho.
// x of the returned solution is beta; objective_value is ||beta||_1.
inline LPSolution min_l1_constrained(const Matrix& phi, const Vector& y, const LinearConstraints& sc, double eta,
                                     double rho) {
    const auto lp = detail::l1_program(phi, y, sc, eta, rho);
    return detail::collapse_split(solve_lp(lp), phi.cols());
}

// Same constraint set, feasibility only.
inline LPSolution l1_constraints_feasible(const Matrix& phi, const Vector& y, const LinearConstraints& sc,
                                          double eta, double rho) {
    const auto lp = detail::l1_program(phi, y, sc, eta, rho);
    LPOptions opts;
    opts.feasibility_only = true;
    return detail::collapse_split(solve_lp(lp, opts), phi.cols());
}

}  // namespace nic
