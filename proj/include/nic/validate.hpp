#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "data.hpp"
#include "invert.hpp"

namespace nic {

// ============================================================================
// Closed-loop prediction data
// ============================================================================
//
// Along the measured trajectory the controller is asked to reach the next
// measured output,
//
//     u_{t}^nl = K(y_{t+1}, (y_t..y_{t-n+1}, u_{t-1}^nl..u_{t-n+1}^nl))
//     yhat_{t+1} = f(y_t..y_{t-n+1}, u_t^nl..u_{t-n+1}^nl)
//
// and each prediction is paired with the output window
// w_t = (y_t, ..., y_{t-m+1}).

// Quantity whose Lipschitz dependence on the window is estimated.
enum class GainTarget {
    // yhat_{t+1} - y_{t+1}: what the controller-model cascade fails to cancel
    tracking_deviation,
    // yhat_{t+1} itself
    prediction,
};

inline const char* to_string(GainTarget g) {
    return g == GainTarget::prediction ? "prediction" : "tracking_deviation";
}

struct GammaDataSet {
    Matrix windows;       // pairs x m
    Vector values;        // Lipschitz data, one per window
    Vector prediction;    // yhat_{t+1}
    Vector reference;     // y_{t+1}
    std::vector<long> time;
    int m = 0;
    double epsilon = 0.0;
    // controller steps that ended on a bound of U
    std::size_t saturated_steps = 0;

    [[nodiscard]] Eigen::Index size() const { return windows.rows(); }
};

// Bare data set from windows and values, used by tests and tools.
inline GammaDataSet make_gamma_data(const Matrix& windows, const Vector& values, double epsilon) {
    if (windows.rows() != values.size())
        throw DimensionError("make_gamma_data: one value per window required");
    GammaDataSet ds;
    ds.windows = windows;
    ds.values = values;
    ds.prediction = values;
    ds.reference = Vector::Zero(values.size());
    ds.m = static_cast<int>(windows.cols());
    ds.epsilon = epsilon;
    ds.time.resize(static_cast<std::size_t>(values.size()));
    for (std::size_t i = 0; i < ds.time.size(); ++i)
        ds.time[i] = static_cast<long>(i);
    return ds;
}

inline GammaDataSet closed_loop_prediction_data(const PolyModel& model, const ControllerConfig& cfg,
                                                const DataSet& data, int m, double epsilon,
                                                GainTarget target = GainTarget::tracking_deviation) {
    data.validate();
    model.validate();
    cfg.validate();
    const int n = model.order;
    const auto L = static_cast<long>(data.size());
    if (m <= n)
        throw Error("closed_loop_prediction_data: window length m must exceed the model order");
    if (L <= m + 1)
        throw DataError("closed_loop_prediction_data: need L > m + 1 samples, got " + std::to_string(L));
    if (!(epsilon >= 0.0))
        throw Error("closed_loop_prediction_data: epsilon must be >= 0");

    // The first n commands are the measured inputs.
    std::vector<double> unl(data.u.begin(), data.u.begin() + n);
    unl.resize(static_cast<std::size_t>(L - 1));
    std::vector<double> yhat(static_cast<std::size_t>(L), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> q(model.q_size());
    std::vector<double> point(model.n_vars());
    std::size_t saturated = 0;
    for (long j = n; j <= L - 2; ++j) {
        for (int k = 0; k < n; ++k)
            q[static_cast<std::size_t>(k)] = data.y[static_cast<std::size_t>(j - k)];
        for (int k = 1; k < n; ++k)
            q[static_cast<std::size_t>(n + k - 1)] = unl[static_cast<std::size_t>(j - k)];
        const auto res = control_detailed(model, q, data.y[static_cast<std::size_t>(j + 1)], cfg);
        unl[static_cast<std::size_t>(j)] = res.u;
        saturated += res.saturated ? 1u : 0u;
    }
    for (long j = n; j <= L - 2; ++j) {
        for (int k = 0; k < n; ++k) {
            point[static_cast<std::size_t>(k)] = data.y[static_cast<std::size_t>(j - k)];
            point[static_cast<std::size_t>(n + k)] = unl[static_cast<std::size_t>(j - k)];
        }
        yhat[static_cast<std::size_t>(j + 1)] = model.evaluate(point);
    }

    GammaDataSet ds;
    ds.m = m;
    ds.epsilon = epsilon;
    ds.saturated_steps = saturated;
    const long pairs = L - m - 1;
    ds.windows.resize(pairs, m);
    ds.values.resize(pairs);
    ds.prediction.resize(pairs);
    ds.reference.resize(pairs);
    for (long p = 0; p < pairs; ++p) {
        const long i = m + p;
        for (int k = 0; k < m; ++k)
            ds.windows(p, k) = data.y[static_cast<std::size_t>(i - k)];
        const double yh = yhat[static_cast<std::size_t>(i + 1)];
        const double yr = data.y[static_cast<std::size_t>(i + 1)];
        ds.prediction[p] = yh;
        ds.reference[p] = yr;
        ds.values[p] = target == GainTarget::prediction ? yh : yh - yr;
        ds.time.push_back(data.time_of(static_cast<std::size_t>(i)));
    }
    return ds;
}

// ============================================================================
// Lipschitz validation
// ============================================================================

inline double window_distance(const GammaDataSet& ds, const Eigen::Ref<const Vector>& w, Eigen::Index k) {
    return (ds.windows.row(k).transpose() - w).cwiseAbs().maxCoeff();
}

// fbar(Gamma, w) = min_t (v_t + eps + Gamma ||w - w_t||_inf)
inline double f_bar(double gamma, const Eigen::Ref<const Vector>& w, const GammaDataSet& ds) {
    if (ds.size() == 0)
        throw DataError("f_bar: empty data set");
    if (w.size() != ds.windows.cols())
        throw DimensionError("f_bar: window length mismatch");
    if (!(gamma >= 0.0))
        throw Error("f_bar: Gamma must be >= 0");
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < ds.size(); ++k) {
        const double d = window_distance(ds, w, k);
        // Gamma * 0 stays 0 for an infinite Gamma.
        const double lift = d == 0.0 ? 0.0 : gamma * d;
        best = std::min(best, ds.values[k] + ds.epsilon + lift);
    }
    return best;
}

// True iff fbar(Gamma, w_t) > v_t - eps at every data point.
inline bool check_validated(double gamma, const GammaDataSet& ds) {
    if (!(gamma >= 0.0))
        throw Error("check_validated: Gamma must be >= 0");
    for (Eigen::Index t = 0; t < ds.size(); ++t) {
        const Vector w = ds.windows.row(t).transpose();
        if (!(f_bar(gamma, w, ds) > ds.values[t] - ds.epsilon - tol::validation_strict))
            return false;
    }
    return true;
}

struct GammaMin {
    double value = 0.0;
    // Two identical windows whose values differ by more than 2 eps: no
    // finite Gamma validates the data.
    bool invalidated = false;
    // check_validated agrees with the closed form at value * (1 +- delta)
    bool consistent = true;
};

// Gamma_min = max(0, max_{k != t, w_k != w_t} (v_k - v_t - 2 eps) / ||w_k - w_t||_inf)
inline GammaMin gamma_min(const GammaDataSet& ds, bool cross_check = true) {
    if (ds.size() == 0)
        throw DataError("gamma_min: empty data set");
    GammaMin g;
    const Eigen::Index P = ds.size();
    const double two_eps = 2.0 * ds.epsilon;
    for (Eigen::Index k = 0; k < P; ++k) {
        for (Eigen::Index t = k + 1; t < P; ++t) {
            const double dv = std::abs(ds.values[k] - ds.values[t]) - two_eps;
            if (dv <= 0.0)
                continue;
            const double d = (ds.windows.row(k) - ds.windows.row(t)).cwiseAbs().maxCoeff();
            if (d == 0.0) {
                g.invalidated = true;
                continue;
            }
            g.value = std::max(g.value, dv / d);
        }
    }
    if (g.invalidated) {
        g.value = std::numeric_limits<double>::infinity();
        g.consistent = !check_validated(1e300, ds);
        return g;
    }
    if (cross_check) {
        const double delta = tol::gamma_hat_inflation;
        g.consistent = check_validated(g.value * (1.0 + delta), ds);
        if (g.value > 0.0)
            g.consistent = g.consistent && !check_validated(g.value * (1.0 - delta), ds);
    }
    return g;
}

// ============================================================================
// Stability check and mu selection
// ============================================================================

enum class Verdict { validated_stable, validated_unstable, invalidated };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::validated_stable: return "validated-stable";
    case Verdict::validated_unstable: return "validated-unstable";
    case Verdict::invalidated: return "invalidated";
    }
    return "?";
}

struct MuEvaluation {
    double mu = 0.0;
    double gamma_min = 0.0;
    double gamma_hat = 0.0;
    double margin = 0.0;
    Verdict verdict = Verdict::invalidated;
    bool consistent = true;
    std::size_t saturated_steps = 0;
};

struct ValidationConfig {
    int m = 0;                                                    // 0 selects 4n
    double epsilon = std::numeric_limits<double>::quiet_NaN();  // NaN selects eta * rho
    std::vector<double> mu_grid{0.0, 0.001, 0.01, 0.1, 1.0};
    GainTarget target = GainTarget::tracking_deviation;
};

struct ValidationReport {
    double mu = 0.0;
    double gamma_min = 0.0;
    double gamma_hat = 0.0;
    double epsilon = 0.0;
    double gamma_y = 0.0;
    double margin = 0.0;
    int m = 0;
    Verdict verdict = Verdict::invalidated;
    GainTarget target = GainTarget::tracking_deviation;
    std::vector<MuEvaluation> grid;
};

inline Verdict classify(double gamma_hat, double gamma_y, bool invalidated) {
    if (invalidated)
        return Verdict::invalidated;
    return gamma_hat < 1.0 - gamma_y ? Verdict::validated_stable : Verdict::validated_unstable;
}

inline MuEvaluation evaluate_mu(const PolyModel& model, const DataSet& data, ControllerConfig cfg, double mu,
                                double gamma_y, int m, double epsilon, GainTarget target) {
    cfg.mu = mu;
    const auto ds = closed_loop_prediction_data(model, cfg, data, m, epsilon, target);
    const auto g = gamma_min(ds);
    MuEvaluation e;
    e.mu = mu;
    e.gamma_min = g.value;
    e.gamma_hat = g.value * (1.0 + tol::gamma_hat_inflation);
    e.margin = 1.0 - gamma_y - e.gamma_hat;
    e.verdict = classify(e.gamma_hat, gamma_y, g.invalidated);
    e.consistent = g.consistent;
    e.saturated_steps = ds.saturated_steps;
    return e;
}

// Largest grid mu such that every grid point from the smallest up to it
// satisfies Gamma_hat(mu) < 1 - gamma_y.  Falls back to the smallest grid
// point's report when even that fails.
inline ValidationReport select_mu(const PolyModel& model, const DataSet& data, double gamma_y,
                                  const ControllerConfig& base, const ValidationConfig& vc) {
    if (!(gamma_y < 1.0))
        throw Error("select_mu: gamma_y >= 1 leaves no stability margin");
    if (vc.mu_grid.empty())
        throw Error("select_mu: empty mu grid");
    if (std::isnan(vc.epsilon))
        throw Error("select_mu: epsilon must be resolved before validation");
    std::vector<double> grid = vc.mu_grid;
    std::sort(grid.begin(), grid.end());
    for (double mu : grid)
        if (!(mu >= 0.0) || !std::isfinite(mu))
            throw Error("select_mu: grid values must be finite and >= 0");

    ValidationReport rep;
    rep.m = vc.m > 0 ? vc.m : 4 * model.order;
    rep.epsilon = vc.epsilon;
    rep.gamma_y = gamma_y;
    rep.target = vc.target;
    std::size_t chosen = 0;
    bool prefix = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rep.grid.push_back(evaluate_mu(model, data, base, grid[i], gamma_y, rep.m, rep.epsilon, vc.target));
        if (prefix && rep.grid.back().verdict == Verdict::validated_stable)
            chosen = i;
        else
            prefix = false;
    }
    const auto& c = rep.grid[chosen];
    rep.mu = c.mu;
    rep.gamma_min = c.gamma_min;
    rep.gamma_hat = c.gamma_hat;
    rep.margin = c.margin;
    rep.verdict = c.verdict;
    return rep;
}

}  // namespace nic
