#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "model.hpp"

namespace nic {

struct ControllerConfig {
    double u_lo = -1.0;
    double u_hi = 1.0;
    double mu = 0.0;

    void validate() const {
        if (!std::isfinite(u_lo) || !std::isfinite(u_hi) || !(u_lo < u_hi))
            throw Error("ControllerConfig: need finite u_lo < u_hi");
        if (!(mu >= 0.0) || !std::isfinite(mu))
            throw Error("ControllerConfig: mu must be finite and >= 0");
    }
};

// J(u) = (1/rho_y) (r - f(q, u))^2 + (mu/rho_u) u^2
inline UniPoly build_objective(const PolyModel& model, std::span<const double> q, double r,
                               const ControllerConfig& cfg) {
    const UniPoly p = restrict_to_u(model, q);
    const UniPoly e = p.constant_like(r) - p;
    UniPoly J = (1.0 / model.rho_y) * (e * e);
    if (cfg.mu != 0.0) {
        const UniPoly u = p.identity_like();
        J = J + (cfg.mu / model.rho_u) * (u * u);
    }
    return J;
}

// Direct evaluation of the objective, independent of build_objective.
inline double objective_value(const PolyModel& model, std::span<const double> q, double r, double u,
                              const ControllerConfig& cfg) {
    const double e = r - model.predict(q, u);
    return e * e / model.rho_y + cfg.mu / model.rho_u * u * u;
}

// Stationary points of J inside [u_lo, u_hi] plus both endpoints.
inline std::vector<double> candidate_set(const UniPoly& J, const ControllerConfig& cfg) {
    std::vector<double> out;
    const UniPoly dJ = differentiate(J);
    if (!dJ.is_zero())
        out = real_roots(dJ, cfg.u_lo, cfg.u_hi);
    out.push_back(cfg.u_lo);
    out.push_back(cfg.u_hi);
    std::sort(out.begin(), out.end());
    const double dedup = tol::root_dedup * (cfg.u_hi - cfg.u_lo);
    std::vector<double> uniq;
    for (double u : out) {
        if (!uniq.empty() && u - uniq.back() <= dedup) {
            // Keep endpoints exact.
            if (u == cfg.u_hi)
                uniq.back() = u;
            continue;
        }
        uniq.push_back(u);
    }
    return uniq;
}

struct ControlResult {
    double u = 0.0;
    double J = 0.0;
    std::vector<double> candidates;
    int objective_degree = 0;
    // u sits on a bound of [u_lo, u_hi]
    bool saturated = false;
    // dJ/du vanishes identically; the input has no effect on the objective
    bool uncontrollable = false;
};

inline ControlResult control_detailed(const PolyModel& model, std::span<const double> q, double r,
                                      const ControllerConfig& cfg) {
    if (!std::isfinite(r))
        throw NumericError("control: non-finite reference");
    for (double v : q)
        if (!std::isfinite(v))
            throw NumericError("control: non-finite regressor");

    const UniPoly J = build_objective(model, q, r, cfg);
    ControlResult res;
    res.objective_degree = J.degree();
    res.candidates = candidate_set(J, cfg);
    res.uncontrollable = differentiate(J).is_zero();

    std::vector<double> pool = res.candidates;
    if (res.uncontrollable && cfg.u_lo <= 0.0 && 0.0 <= cfg.u_hi)
        pool.push_back(0.0);

    std::vector<double> values;
    values.reserve(pool.size());
    double jmin = std::numeric_limits<double>::infinity();
    for (double u : pool) {
        values.push_back(J(u));
        jmin = std::min(jmin, values.back());
    }
    const double band = jmin + tol::tie * std::abs(jmin);
    bool have = false;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (values[i] > band)
            continue;
        const double u = pool[i];
        if (!have || std::abs(u) < std::abs(res.u) || (std::abs(u) == std::abs(res.u) && u < res.u)) {
            res.u = u;
            res.J = values[i];
            have = true;
        }
    }
    if (!have)
        throw NumericError("control: objective is not finite on the candidate set");
    res.u = std::clamp(res.u, cfg.u_lo, cfg.u_hi);
    res.saturated = res.u == cfg.u_lo || res.u == cfg.u_hi;
    return res;
}

// u_t = argmin over the candidate set of J
inline double control(const PolyModel& model, std::span<const double> q, double r, const ControllerConfig& cfg) {
    return control_detailed(model, q, r, cfg).u;
}

}  // namespace nic
