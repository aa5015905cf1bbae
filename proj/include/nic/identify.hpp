#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "data.hpp"
#include "model.hpp"
#include "optim.hpp"

namespace nic {

// ============================================================================
// Regression table
// ============================================================================
// One row per usable time step t = n-L .. -1.  Row k holds the regressors
// y_t = (y_t..y_{t-n+1}), u_t = (u_t..u_{t-n+1}), the basis evaluated at
// them, and the target y_{t+1}.
struct RegressionTable {
    int order = 1;
    Vector target;
    Matrix phi;
    std::vector<long> time;   // t of each row
    Matrix y_regressors;      // rows x n
    Matrix u_regressors;      // rows x n

    [[nodiscard]] Eigen::Index rows() const { return phi.rows(); }

    // rows x 2n raw points in model variable order.
    [[nodiscard]] Matrix points() const {
        Matrix p(y_regressors.rows(), 2 * order);
        p.leftCols(order) = y_regressors;
        p.rightCols(order) = u_regressors;
        return p;
    }
};

// Raw regressor points for every usable row (rows x 2n).
inline Matrix regressor_points(const DataSet& data, int n) {
    data.validate();
    if (n < 1)
        throw Error("regressor_points: order must be >= 1");
    const auto L = static_cast<Eigen::Index>(data.size());
    if (L <= n)
        throw DataError("insufficient data: L = " + std::to_string(L) + " samples for order " + std::to_string(n));
    const Eigen::Index rows = L - n;
    Matrix p(rows, 2 * n);
    for (Eigen::Index k = 0; k < rows; ++k) {
        const Eigen::Index i = k + n - 1;
        for (Eigen::Index j = 0; j < n; ++j) {
            p(k, j) = data.y[static_cast<std::size_t>(i - j)];
            p(k, n + j) = data.u[static_cast<std::size_t>(i - j)];
        }
    }
    return p;
}

inline AffineScaler fit_scaler(const DataSet& data, int n) { return AffineScaler::fit(regressor_points(data, n)); }

inline RegressionTable build_regression(const DataSet& data, int n, const std::vector<BasisTerm>& basis,
                                        const AffineScaler& scaler) {
    const Matrix pts = regressor_points(data, n);
    if (scaler.size() != static_cast<std::size_t>(2 * n))
        throw DimensionError("build_regression: scaler arity must be 2n");
    RegressionTable t;
    t.order = n;
    const Eigen::Index rows = pts.rows();
    t.target.resize(rows);
    t.phi.resize(rows, static_cast<Eigen::Index>(basis.size()));
    t.time.resize(static_cast<std::size_t>(rows));
    t.y_regressors = pts.leftCols(n);
    t.u_regressors = pts.rightCols(n);
    std::vector<double> point(static_cast<std::size_t>(2 * n));
    for (Eigen::Index k = 0; k < rows; ++k) {
        const auto i = static_cast<std::size_t>(k + n - 1);
        for (Eigen::Index j = 0; j < 2 * n; ++j)
            point[static_cast<std::size_t>(j)] = pts(k, j);
        t.phi.row(k) = eval_basis(basis, scaler, point).transpose();
        t.target[k] = data.y[i + 1];
        t.time[static_cast<std::size_t>(k)] = data.time_of(i);
    }
    return t;
}

// ============================================================================
// Neighbour sets
// ============================================================================

struct NeighborSets {
    double zeta = 0.0;
    std::vector<std::vector<std::size_t>> sets;  // sets[k] includes k itself
};

inline double linf_distance(const Matrix& m, Eigen::Index a, Eigen::Index b) {
    return (m.row(a) - m.row(b)).cwiseAbs().maxCoeff();
}

// zeta = smallest radius (l_inf on input regressors) for which every row has
// at least one other row within reach.
inline NeighborSets neighbor_sets(const RegressionTable& table) {
    const Eigen::Index rows = table.rows();
    if (rows < 2)
        throw DataError("neighbor_sets: need at least two regression rows");
    const Matrix& u = table.u_regressors;
    NeighborSets out;
    for (Eigen::Index k = 0; k < rows; ++k) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < rows; ++i)
            if (i != k)
                nearest = std::min(nearest, linf_distance(u, k, i));
        out.zeta = std::max(out.zeta, nearest);
    }
    out.sets.resize(static_cast<std::size_t>(rows));
    for (Eigen::Index k = 0; k < rows; ++k)
        for (Eigen::Index i = 0; i < rows; ++i)
            if (linf_distance(u, k, i) <= out.zeta)
                out.sets[static_cast<std::size_t>(k)].push_back(static_cast<std::size_t>(i));
    return out;
}

// ============================================================================
// SC constraints
// ============================================================================
// For each neighbour pair (k, l), l != k:
//
//   | y_{l+1} - y_{k+1} + (Phi_k - Phi_l) beta | <= gamma rho ||y_l - y_k||_inf + 2 eta rho
//
// The inequality is symmetric in (k, l), so each unordered pair is stored once.
struct SCPairs {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    Matrix diff;          // Phi_k - Phi_l
    Vector delta_target;  // y_{l+1} - y_{k+1}
    Vector y_distance;    // ||y_l - y_k||_inf

    [[nodiscard]] Eigen::Index size() const { return diff.rows(); }
};

inline SCPairs sc_pairs(const RegressionTable& table, const NeighborSets& nbrs) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < nbrs.sets.size(); ++k)
        for (std::size_t l : nbrs.sets[k])
            if (l != k)
                pairs.emplace_back(std::min(k, l), std::max(k, l));
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    SCPairs sc;
    sc.pairs = pairs;
    const auto P = static_cast<Eigen::Index>(pairs.size());
    sc.diff.resize(P, table.phi.cols());
    sc.delta_target.resize(P);
    sc.y_distance.resize(P);
    for (Eigen::Index p = 0; p < P; ++p) {
        const auto k = static_cast<Eigen::Index>(pairs[static_cast<std::size_t>(p)].first);
        const auto l = static_cast<Eigen::Index>(pairs[static_cast<std::size_t>(p)].second);
        sc.diff.row(p) = table.phi.row(k) - table.phi.row(l);
        sc.delta_target[p] = table.target[l] - table.target[k];
        sc.y_distance[p] = linf_distance(table.y_regressors, k, l);
    }
    return sc;
}

inline LinearConstraints sc_constraints(const SCPairs& sc, double gamma, double eta, double rho) {
    if (!(gamma >= 0.0) || !(eta >= 0.0) || !(rho >= 1.0))
        throw Error("sc_constraints: need gamma >= 0, eta >= 0, rho >= 1");
    const Eigen::Index P = sc.size();
    LinearConstraints c;
    c.G.resize(2 * P, sc.diff.cols());
    c.h.resize(2 * P);
    const Vector bound = (gamma * rho) * sc.y_distance.array() + 2.0 * eta * rho;
    c.G.topRows(P) = sc.diff;
    c.h.head(P) = bound - sc.delta_target;
    c.G.bottomRows(P) = -sc.diff;
    c.h.tail(P) = bound + sc.delta_target;
    return c;
}

inline LinearConstraints sc_constraints(const RegressionTable& table, const NeighborSets& nbrs, double gamma,
                                        double eta, double rho) {
    return sc_constraints(sc_pairs(table, nbrs), gamma, eta, rho);
}

// ============================================================================
// Minimal feasible gamma
// ============================================================================

struct GammaSearch {
    bool feasible = false;
    double gamma = std::numeric_limits<double>::infinity();
    int probes = 0;
};

// Doubles the upper end from 1 until feasible, then bisects down to a bracket
// of width <= gamma_tol.  Returns the feasible upper end.
inline GammaSearch bisect_min_feasible(const std::function<bool(double)>& feasible_at, double gamma_tol,
                                       double gamma_cap) {
    GammaSearch s;
    double lo = 0.0, hi = 1.0;
    for (;;) {
        ++s.probes;
        if (feasible_at(hi))
            break;
        lo = hi;
        hi *= 2.0;
        if (hi > gamma_cap)
            return s;
    }
    while (hi - lo > gamma_tol) {
        const double mid = 0.5 * (lo + hi);
        ++s.probes;
        if (feasible_at(mid))
            hi = mid;
        else
            lo = mid;
    }
    s.feasible = true;
    s.gamma = hi;
    return s;
}

inline GammaSearch min_feasible_gamma(const RegressionTable& table, const SCPairs& sc, double eta, double rho,
                                      double gamma_tol = 1e-3, double gamma_cap = 65536.0) {
    return bisect_min_feasible(
        [&](double g) {
            const auto r = l1_constraints_feasible(table.phi, table.target, sc_constraints(sc, g, eta, rho), eta, rho);
            if (r.status == LPStatus::iteration_limit)
                throw NumericError("min_feasible_gamma: LP iteration limit");
            return r.status != LPStatus::infeasible;
        },
        gamma_tol, gamma_cap);
}

inline GammaSearch min_feasible_gamma(const RegressionTable& table, const NeighborSets& nbrs, double eta, double rho,
                                      double gamma_tol = 1e-3, double gamma_cap = 65536.0) {
    return min_feasible_gamma(table, sc_pairs(table, nbrs), eta, rho, gamma_tol, gamma_cap);
}

// ============================================================================
// Self-tuning identification
// ============================================================================

struct IdentConfig {
    int degree = 3;
    int n_min = 1;
    int n_max = 3;
    double rho_init = 1.05;
    double rho_growth = 1.25;
    double rho_max = 4.0;
    double gamma_tol = 1e-3;
    double gamma_cap = 65536.0;
    // Order loop stops once gamma_y improves by less than this fraction.
    double order_improvement = 0.05;
    // Trailing fraction of rows used for the held-out prediction report.
    double holdout_fraction = 0.2;

    void validate() const {
        if (degree < 1 || degree > 8)
            throw Error("IdentConfig: degree must be in [1, 8]");
        if (n_min < 1 || n_max < n_min)
            throw Error("IdentConfig: need 1 <= n_min <= n_max");
        if (!(rho_init > 1.0) || !(rho_growth > 1.0) || !(rho_max >= rho_init))
            throw Error("IdentConfig: need rho_init > 1, rho_growth > 1, rho_max >= rho_init");
        if (!(gamma_tol > 0.0) || !(gamma_cap >= 1.0))
            throw Error("IdentConfig: gamma_tol must be > 0 and gamma_cap >= 1");
        if (!(order_improvement >= 0.0))
            throw Error("IdentConfig: order_improvement must be >= 0");
        if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
            throw Error("IdentConfig: holdout_fraction must be in [0, 1)");
    }
};

struct TraceEntry {
    int order = 0;
    double rho = 0.0;
    double gamma_y = std::numeric_limits<double>::infinity();
    double eta = 0.0;
    std::size_t nonzeros = 0;
    double l1_norm = 0.0;
    bool feasible = false;
};

struct IdentResult {
    bool success = false;
    PolyModel model;
    double eta = 0.0;
    double gamma_y = std::numeric_limits<double>::infinity();
    double rho = 0.0;
    // max |y_{t+1} - f| over the trailing holdout rows
    double holdout_error = 0.0;
    // max |y_{t+1} - f| over all rows
    double fit_error = 0.0;
    bool order_limit_reached = false;
    std::vector<TraceEntry> trace;
    std::string message;
};

namespace detail {

// Zeroes the smallest coefficients while their total magnitude stays below
// half the feasibility tolerance.  Basis functions are bounded by 1 on the
// identification data, so the residual moves by at most that amount.
inline Vector prune_coefficients(Vector alpha) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(alpha.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return std::abs(alpha[a]) < std::abs(alpha[b]); });
    double removed = 0.0;
    for (auto i : idx) {
        if (alpha[i] == 0.0)
            continue;
        if (removed + std::abs(alpha[i]) > 0.5 * tol::feasibility)
            break;
        removed += std::abs(alpha[i]);
        alpha[i] = 0.0;
    }
    return alpha;
}

struct OrderCache {
    std::vector<BasisTerm> basis;
    AffineScaler scaler;
    RegressionTable table;
    SCPairs sc;
    double eta = 0.0;
    double zeta = 0.0;
};

struct Candidate {
    TraceEntry entry;
    Vector alpha;
};

}  // namespace detail

inline PolyModel make_model(int order, int degree, const std::vector<BasisTerm>& basis, const AffineScaler& scaler,
                            const Vector& alpha, const Normalization& norm) {
    PolyModel m;
    m.order = order;
    m.degree = degree;
    m.scaler = scaler;
    m.rho_y = norm.rho_y;
    m.rho_u = norm.rho_u;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double a = alpha[static_cast<Eigen::Index>(i)];
        if (a != 0.0) {
            m.terms.push_back(basis[i]);
            m.coefficients.push_back(a);
        }
    }
    return m;
}

inline IdentResult identify_model(const DataSet& data, const IdentConfig& cfg) {
    data.validate();
    cfg.validate();
    const Normalization norm = normalization_constants(data);

    std::map<int, detail::OrderCache> cache;
    auto prepare = [&](int n) -> detail::OrderCache& {
        auto it = cache.find(n);
        if (it != cache.end())
            return it->second;
        detail::OrderCache c;
        c.basis = generate_basis(static_cast<std::size_t>(2 * n), cfg.degree);
        c.scaler = fit_scaler(data, n);
        c.table = build_regression(data, n, c.basis, c.scaler);
        const auto nbrs = neighbor_sets(c.table);
        c.zeta = nbrs.zeta;
        c.sc = sc_pairs(c.table, nbrs);
        const auto fit = min_linf(c.table.phi, c.table.target);
        if (fit.status != LPStatus::optimal)
            throw NumericError(std::string("identify: l_inf fit failed (") + to_string(fit.status) + ")");
        c.eta = fit.eta;
        return cache.emplace(n, std::move(c)).first->second;
    };

    auto evaluate = [&](int n, double rho) {
        auto& c = prepare(n);
        detail::Candidate cand;
        cand.entry.order = n;
        cand.entry.rho = rho;
        cand.entry.eta = c.eta;
        const auto g = min_feasible_gamma(c.table, c.sc, c.eta, rho, cfg.gamma_tol, cfg.gamma_cap);
        if (!g.feasible)
            return cand;
        const auto sol = min_l1_constrained(c.table.phi, c.table.target, sc_constraints(c.sc, g.gamma, c.eta, rho),
                                            c.eta, rho);
        if (sol.status != LPStatus::optimal)
            return cand;
        cand.alpha = detail::prune_coefficients(sol.x);
        cand.entry.feasible = true;
        cand.entry.gamma_y = g.gamma;
        cand.entry.l1_norm = cand.alpha.lpNorm<1>();
        cand.entry.nonzeros = static_cast<std::size_t>((cand.alpha.array() != 0.0).count());
        return cand;
    };

    // Usable orders need at least two regression rows.
    const int n_hi = std::min<int>(cfg.n_max, static_cast<int>(data.size()) - 2);
    if (n_hi < cfg.n_min)
        throw DataError("identify: insufficient data for order " + std::to_string(cfg.n_min));

    IdentResult result;
    detail::Candidate last_selected;
    int passes = 0;
    for (double rho = cfg.rho_init; rho <= cfg.rho_max * (1.0 + 1e-12); rho *= cfg.rho_growth, ++passes) {
        std::optional<detail::Candidate> prev, selected;
        for (int n = cfg.n_min; n <= n_hi; ++n) {
            auto cand = evaluate(n, rho);
            result.trace.push_back(cand.entry);
            if (prev) {
                const double gp = prev->entry.gamma_y, gc = cand.entry.gamma_y;
                double improvement;
                if (!std::isfinite(gp))
                    improvement = std::isfinite(gc) ? 1.0 : 0.0;
                else
                    improvement = gp > 0.0 ? (gp - gc) / gp : 0.0;
                if (improvement < cfg.order_improvement) {
                    selected = prev;
                    break;
                }
            }
            prev = std::move(cand);
        }
        if (!selected) {
            selected = prev;
            result.order_limit_reached = true;
        } else {
            result.order_limit_reached = false;
        }
        last_selected = *selected;
        if (selected->entry.feasible && selected->entry.gamma_y < 1.0) {
            result.success = true;
            break;
        }
    }

    const auto& e = last_selected.entry;
    result.eta = e.eta;
    result.gamma_y = e.gamma_y;
    result.rho = e.rho;
    if (!e.feasible) {
        result.message = "no feasible model: SC constraints infeasible up to gamma_cap";
        return result;
    }
    const auto& c = cache.at(e.order);
    result.model = make_model(e.order, cfg.degree, c.basis, c.scaler, last_selected.alpha, norm);
    if (!result.success)
        result.message = "gamma_y >= 1 at rho_max";

    const Vector resid = (c.table.target - c.table.phi * last_selected.alpha).cwiseAbs();
    result.fit_error = resid.maxCoeff();
    const auto rows = resid.size();
    const auto hold = static_cast<Eigen::Index>(std::floor(cfg.holdout_fraction * static_cast<double>(rows)));
    result.holdout_error = hold > 0 ? resid.tail(hold).maxCoeff() : 0.0;
    return result;
}

}  // namespace nic
