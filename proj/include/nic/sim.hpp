#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "data.hpp"
#include "invert.hpp"

namespace nic {

// ============================================================================
// Plants
// ============================================================================
//
//     y_{t+1} = g(y_t..y_{t-n+1}, u_t..u_{t-n+1}) + xi_t,   |xi_t| <= xi_bound

using PlantRule = std::function<double(std::span<const double> y, std::span<const double> u)>;

struct Plant {
    std::string name;
    int order = 1;
    PlantRule rule;
    double xi_bound = 0.0;

    [[nodiscard]] double step(std::span<const double> y, std::span<const double> u, double xi) const {
        return rule(y, u) + xi;
    }
};

struct PlantTerm {
    double coefficient = 0.0;
    std::vector<int> exponents;  // length 2n: y_t..y_{t-n+1}, u_t..u_{t-n+1}
};

inline Plant linear_plant(double a, double b, double xi_bound = 0.0) {
    return {"linear", 1, [a, b](auto y, auto u) { return a * y[0] + b * u[0]; }, xi_bound};
}

// Polynomial NARX in raw (unscaled) variables.
inline Plant poly_narx_plant(int order, std::vector<PlantTerm> terms, double xi_bound = 0.0) {
    if (order < 1)
        throw Error("poly_narx_plant: order must be >= 1");
    for (const auto& t : terms)
        if (t.exponents.size() != static_cast<std::size_t>(2 * order))
            throw DimensionError("poly_narx_plant: term exponents must have length 2n");
    auto rule = [order, terms = std::move(terms)](std::span<const double> y, std::span<const double> u) {
        double acc = 0.0;
        for (const auto& t : terms) {
            double p = t.coefficient;
            for (int v = 0; v < order; ++v) {
                p *= std::pow(y[static_cast<std::size_t>(v)], t.exponents[static_cast<std::size_t>(v)]);
                p *= std::pow(u[static_cast<std::size_t>(v)], t.exponents[static_cast<std::size_t>(order + v)]);
            }
            acc += p;
        }
        return acc;
    };
    return {"poly_narx", order, std::move(rule), xi_bound};
}

// Synthetic second-order stand-in for a single-corner vehicle model: lightly
// damped linear dynamics with a stiffening cubic term.
inline Plant corner_plant(double xi_bound = 0.0) {
    auto rule = [](std::span<const double> y, std::span<const double> u) {
        return 0.6 * y[0] - 0.15 * y[1] + 0.5 * u[0] + 0.1 * u[1] - 0.2 * y[0] * y[0] * y[0];
    };
    return {"corner", 2, rule, xi_bound};
}

// Piecewise benchmark: asymmetric input gain and a |y| damping term.
inline Plant piecewise_plant(double xi_bound = 0.0) {
    auto rule = [](std::span<const double> y, std::span<const double> u) {
        return 0.6 * y[0] - 0.1 * y[1] * std::abs(y[1]) + (u[0] >= 0.0 ? 0.8 * u[0] : 0.4 * u[0]);
    };
    return {"piecewise", 2, rule, xi_bound};
}

// An identified model used as the plant.
inline Plant model_plant(const PolyModel& model, double xi_bound = 0.0) {
    model.validate();
    const int n = model.order;
    auto rule = [model, n](std::span<const double> y, std::span<const double> u) {
        std::vector<double> p(static_cast<std::size_t>(2 * n));
        std::copy(y.begin(), y.begin() + n, p.begin());
        std::copy(u.begin(), u.begin() + n, p.begin() + n);
        return model.evaluate(p);
    };
    return {"model", n, std::move(rule), xi_bound};
}

// Named plants: linear (y_{t+1} = 0.5 y_t + 0.3 u_t), identity (y_{t+1} = u_t),
// corner, piecewise.
inline Plant make_plant(const std::string& name, double xi_bound = 0.0) {
    if (name == "linear")
        return linear_plant(0.5, 0.3, xi_bound);
    if (name == "identity") {
        Plant p = linear_plant(0.0, 1.0, xi_bound);
        p.name = "identity";
        return p;
    }
    if (name == "corner")
        return corner_plant(xi_bound);
    if (name == "piecewise")
        return piecewise_plant(xi_bound);
    throw Error("unknown plant '" + name + "' (known: linear, identity, corner, piecewise)");
}

inline constexpr double kDivergenceLimit = 1e12;

// Returns (y_0, y_1, ..., y_N) for N = u.size(); y0 = (y_0, y_{-1}, ...,
// y_{1-n}) and inputs before t = 0 are zero.
inline std::vector<double> simulate_open_loop(const Plant& plant, std::span<const double> u,
                                              std::span<const double> xi, std::span<const double> y0) {
    const auto n = static_cast<std::size_t>(plant.order);
    if (y0.size() != n)
        throw DimensionError("simulate_open_loop: y0 must have plant-order entries");
    if (xi.size() != u.size())
        throw DimensionError("simulate_open_loop: u and xi lengths differ");
    std::vector<double> yh(y0.begin(), y0.end());  // most recent first
    std::vector<double> uh(n, 0.0);
    std::vector<double> out{y0[0]};
    out.reserve(u.size() + 1);
    for (std::size_t t = 0; t < u.size(); ++t) {
        std::rotate(uh.rbegin(), uh.rbegin() + 1, uh.rend());
        uh[0] = u[t];
        const double next = plant.step(yh, uh, xi[t]);
        if (!std::isfinite(next) || std::abs(next) > kDivergenceLimit)
            throw DivergenceError(t, "plant '" + plant.name + "' diverged");
        std::rotate(yh.rbegin(), yh.rbegin() + 1, yh.rend());
        yh[0] = next;
        out.push_back(next);
    }
    return out;
}

// ============================================================================
// Signals
// ============================================================================

enum class ExcitationKind { uniform, multisine, steps };

inline ExcitationKind parse_excitation(const std::string& s) {
    if (s == "uniform")
        return ExcitationKind::uniform;
    if (s == "multisine")
        return ExcitationKind::multisine;
    if (s == "steps")
        return ExcitationKind::steps;
    throw Error("unknown excitation kind '" + s + "' (known: uniform, multisine, steps)");
}

struct ExcitationOptions {
    int hold_min = 3;   // steps: dwell range in samples
    int hold_max = 15;
    int sines = 8;      // multisine: number of components
};

inline std::vector<double> generate_excitation(ExcitationKind kind, std::size_t length, double lo, double hi,
                                               std::uint64_t seed, const ExcitationOptions& opt = {}) {
    if (length < 1)
        throw Error("generate_excitation: length must be >= 1");
    if (!(lo <= hi))
        throw Error("generate_excitation: need lo <= hi");
    std::vector<double> u(length, lo);
    if (lo == hi)
        return u;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> level(lo, hi);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    switch (kind) {
    case ExcitationKind::uniform:
        for (auto& x : u)
            x = level(rng);
        break;
    case ExcitationKind::steps: {
        std::uniform_int_distribution<int> dwell(std::max(1, opt.hold_min), std::max(opt.hold_min, opt.hold_max));
        std::size_t t = 0;
        while (t < length) {
            const double v = level(rng);
            const auto d = static_cast<std::size_t>(dwell(rng));
            for (std::size_t k = 0; k < d && t < length; ++k, ++t)
                u[t] = v;
        }
        break;
    }
    case ExcitationKind::multisine: {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        std::uniform_real_distribution<double> freq(0.01, 0.45);
        const int K = std::max(1, opt.sines);
        std::vector<double> f(static_cast<std::size_t>(K)), ph(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            f[static_cast<std::size_t>(k)] = freq(rng);
            ph[static_cast<std::size_t>(k)] = phase(rng);
        }
        const double fm = 0.5 / static_cast<double>(length) + 0.003, pm = phase(rng);
        for (std::size_t t = 0; t < length; ++t) {
            double s = 0.0;
            for (int k = 0; k < K; ++k)
                s += std::sin(2.0 * std::numbers::pi * f[static_cast<std::size_t>(k)] * static_cast<double>(t) +
                              ph[static_cast<std::size_t>(k)]);
            s /= K;
            const double mod = 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * fm * static_cast<double>(t) + pm);
            u[t] = std::clamp(mid + half * mod * std::clamp(2.0 * s, -1.0, 1.0), lo, hi);
        }
        break;
    }
    }
    return u;
}

inline std::vector<double> uniform_noise(std::size_t length, double bound, std::uint64_t seed) {
    std::vector<double> xi(length, 0.0);
    if (bound <= 0.0)
        return xi;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-bound, bound);
    for (auto& x : xi)
        x = d(rng);
    return xi;
}

// Open-loop data set of `length` samples; the log starts after `warmup`
// discarded steps from y0 = 0.
inline DataSet generate_data(const Plant& plant, ExcitationKind kind, std::size_t length, double u_lo, double u_hi,
                             std::uint64_t seed, std::size_t warmup = 50, const ExcitationOptions& opt = {}) {
    const auto u = generate_excitation(kind, length + warmup, u_lo, u_hi, seed, opt);
    const auto xi = uniform_noise(length + warmup, plant.xi_bound, seed ^ 0x9e3779b97f4a7c15ULL);
    const std::vector<double> y0(static_cast<std::size_t>(plant.order), 0.0);
    const auto y = simulate_open_loop(plant, u, xi, y0);
    DataSet ds;
    // y has one more entry than u: align y_t with u_t.
    ds.u.assign(u.begin() + static_cast<std::ptrdiff_t>(warmup), u.end());
    ds.y.assign(y.begin() + static_cast<std::ptrdiff_t>(warmup), y.end() - 1);
    return ds;
}

enum class ReferenceKind { constant, steps, sinusoid, filtered_random };

inline ReferenceKind parse_reference(const std::string& s) {
    if (s == "constant")
        return ReferenceKind::constant;
    if (s == "steps")
        return ReferenceKind::steps;
    if (s == "sinusoid")
        return ReferenceKind::sinusoid;
    if (s == "filtered_random")
        return ReferenceKind::filtered_random;
    throw Error("unknown reference kind '" + s + "' (known: constant, steps, sinusoid, filtered_random)");
}

struct ReferenceSpec {
    ReferenceKind kind = ReferenceKind::steps;
    double offset = 0.0;
    double amplitude = 0.5;
    int period = 50;       // steps: dwell; sinusoid: period in samples
    double smoothing = 0.9;  // filtered_random: pole of the low-pass filter
    std::uint64_t seed = 1;
};

// r_1 .. r_length
inline std::vector<double> generate_reference(const ReferenceSpec& spec, std::size_t length) {
    if (spec.period < 1)
        throw Error("reference: period must be >= 1");
    std::vector<double> r(length, spec.offset);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    switch (spec.kind) {
    case ReferenceKind::constant:
        break;
    case ReferenceKind::steps: {
        double level = spec.offset + spec.amplitude * d(rng);
        for (std::size_t t = 0; t < length; ++t) {
            if (t > 0 && t % static_cast<std::size_t>(spec.period) == 0)
                level = spec.offset + spec.amplitude * d(rng);
            r[t] = level;
        }
        break;
    }
    case ReferenceKind::sinusoid:
        for (std::size_t t = 0; t < length; ++t)
            r[t] = spec.offset + spec.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t + 1) /
                                                           static_cast<double>(spec.period));
        break;
    case ReferenceKind::filtered_random: {
        const double a = std::clamp(spec.smoothing, 0.0, 0.999);
        double s = 0.0;
        for (std::size_t t = 0; t < length; ++t) {
            s = a * s + (1.0 - a) * d(rng);
            // the filtered sequence stays inside [-1, 1]
            r[t] = spec.offset + spec.amplitude * s;
        }
        break;
    }
    }
    return r;
}

// ============================================================================
// Closed loop
// ============================================================================

struct Scenario {
    std::string name = "scenario";
    std::vector<double> y0;   // (y_0, y_{-1}, ...); missing entries repeat the last one
    ReferenceSpec reference;
    std::size_t horizon = 500;
    double xi_bound = 0.0;
    std::uint64_t seed = 1;

    void validate() const {
        if (horizon < 1)
            throw Error("scenario '" + name + "': horizon must be >= 1");
        if (!(xi_bound >= 0.0))
            throw Error("scenario '" + name + "': xi_bound must be >= 0");
        for (double v : y0)
            if (!std::isfinite(v))
                throw Error("scenario '" + name + "': non-finite initial condition");
    }
};

// Entry k holds the step t = k: command u_t, disturbance xi_t, the reference
// r_{t+1} handed to the controller and the resulting output y_{t+1}.
struct Trajectory {
    std::vector<long> t;
    std::vector<double> r, y, u, xi, J;
    std::vector<bool> saturated;
    bool diverged = false;
    long divergence_step = -1;

    [[nodiscard]] std::size_t size() const { return t.size(); }
};

inline Trajectory run_closed_loop(const Plant& plant, const PolyModel& model, const ControllerConfig& cfg,
                                  const Scenario& sc) {
    sc.validate();
    cfg.validate();
    model.validate();
    const auto ng = static_cast<std::size_t>(plant.order);
    const auto nm = static_cast<std::size_t>(model.order);
    const std::size_t depth = std::max(ng, nm);

    // Histories, most recent first.  Before t = 0 the output repeats the
    // initial condition and commands are zero.
    std::vector<double> yh(depth, sc.y0.empty() ? 0.0 : sc.y0.back());
    for (std::size_t k = 0; k < std::min(depth, sc.y0.size()); ++k)
        yh[k] = sc.y0[k];
    std::vector<double> uh(depth, 0.0);

    const auto ref = generate_reference(sc.reference, sc.horizon);
    const auto xi = uniform_noise(sc.horizon, sc.xi_bound, sc.seed);

    Trajectory tr;
    std::vector<double> q(model.q_size());
    for (std::size_t k = 0; k < sc.horizon; ++k) {
        for (std::size_t j = 0; j < nm; ++j)
            q[j] = yh[j];
        for (std::size_t j = 1; j < nm; ++j)
            q[nm + j - 1] = uh[j - 1];
        ControlResult c;
        try {
            c = control_detailed(model, q, ref[k], cfg);
        } catch (const NumericError&) {
            tr.diverged = true;
            tr.divergence_step = static_cast<long>(k);
            break;
        }
        std::rotate(uh.rbegin(), uh.rbegin() + 1, uh.rend());
        uh[0] = c.u;
        const double next = plant.step(std::span(yh).first(ng), std::span(uh).first(ng), xi[k]);
        if (!std::isfinite(next) || std::abs(next) > kDivergenceLimit) {
            tr.diverged = true;
            tr.divergence_step = static_cast<long>(k);
            break;
        }
        std::rotate(yh.rbegin(), yh.rbegin() + 1, yh.rend());
        yh[0] = next;

        tr.t.push_back(static_cast<long>(k));
        tr.r.push_back(ref[k]);
        tr.y.push_back(next);
        tr.u.push_back(c.u);
        tr.xi.push_back(xi[k]);
        tr.J.push_back(c.J);
        tr.saturated.push_back(c.saturated);
    }
    return tr;
}

struct Metrics {
    double rms_error = 0.0;
    double linf_error = 0.0;
    double energy = 0.0;          // sum u_t^2
    double saturation_duty = 0.0;  // fraction of steps with u on a bound
    std::size_t steps = 0;
    bool diverged = false;
};

inline Metrics metrics(const Trajectory& tr) {
    if (tr.size() == 0)
        throw Error("metrics: empty trajectory");
    Metrics m;
    m.steps = tr.size();
    m.diverged = tr.diverged;
    double se = 0.0;
    std::size_t sat = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const double e = tr.y[k] - tr.r[k];
        se += e * e;
        m.linf_error = std::max(m.linf_error, std::abs(e));
        m.energy += tr.u[k] * tr.u[k];
        sat += tr.saturated[k] ? 1 : 0;
    }
    m.rms_error = std::sqrt(se / static_cast<double>(tr.size()));
    m.saturation_duty = static_cast<double>(sat) / static_cast<double>(tr.size());
    return m;
}

}  // namespace nic
