#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"

namespace nic {

namespace fs = std::filesystem;

enum class Command { generate_data, identify, validate, simulate };

inline const char* to_string(Command c) {
    switch (c) {
    case Command::generate_data: return "generate-data";
    case Command::identify: return "identify";
    case Command::validate: return "validate";
    case Command::simulate: return "simulate";
    }
    return "?";
}

// Plant used by generate-data and simulate.
struct PlantConfig {
    std::string type = "linear";  // linear, identity, corner, piecewise, polynomial, model
    double a = 0.5;
    double b = 0.3;
    int order = 1;
    std::vector<PlantTerm> terms;
    fs::path model_path;
    double xi_bound = 0.0;
};

struct GenerateConfig {
    ExcitationKind excitation = ExcitationKind::uniform;
    std::size_t length = 200;
    double u_lo = -1.0;
    double u_hi = 1.0;
    std::size_t warmup = 50;
    ExcitationOptions options;
    std::string output = "data.csv";
};

struct SimulateConfig {
    std::vector<Scenario> scenarios;
    fs::path validation_path;  // when set, mu comes from this validation report
};

// Relative input paths are resolved against the directory holding the config
// file; outputs go to output_dir.
struct RunConfig {
    fs::path base_dir = ".";
    fs::path output_dir = "out";
    std::uint64_t seed = 1;
    fs::path data_path;
    fs::path model_path;
    PlantConfig plant;
    GenerateConfig generate;
    IdentConfig identify;
    std::string model_output = "model.json";
    ControllerConfig controller;
    ValidationConfig validation;
    std::string validation_output = "validation.json";
    SimulateConfig simulate;

    // Input files a command reads; all must exist before it runs.
    [[nodiscard]] std::vector<std::pair<std::string, fs::path>> inputs(Command c) const {
        std::vector<std::pair<std::string, fs::path>> out;
        switch (c) {
        case Command::generate_data:
            if (plant.type == "model")
                out.emplace_back("plant.path", plant.model_path);
            break;
        case Command::identify:
            out.emplace_back("data", data_path);
            break;
        case Command::validate:
            out.emplace_back("data", data_path);
            out.emplace_back("model", model_path);
            break;
        case Command::simulate:
            out.emplace_back("model", model_path);
            if (plant.type == "model")
                out.emplace_back("plant.path", plant.model_path);
            if (!simulate.validation_path.empty())
                out.emplace_back("simulate.validation", simulate.validation_path);
            break;
        }
        return out;
    }

    // Replaces the global seed; scenario k then uses seed + k.
    void override_seed(std::uint64_t s) {
        seed = s;
        for (std::size_t k = 0; k < simulate.scenarios.size(); ++k) {
            simulate.scenarios[k].seed = s + k;
            simulate.scenarios[k].reference.seed = s + k;
        }
    }

    void check_inputs(Command c) const {
        std::string missing;
        for (const auto& [key, p] : inputs(c)) {
            if (p.empty())
                missing += "\n  " + key + ": not set";
            else if (!fs::exists(p))
                missing += "\n  " + key + ": '" + p.string() + "' does not exist";
        }
        if (!missing.empty())
            throw ParseError(std::string(to_string(c)) + ": missing input files:" + missing);
    }
};

namespace detail {

inline fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

inline PlantConfig parse_plant(io::Reader r, const fs::path& base) {
    PlantConfig p;
    p.type = r.text("type");
    p.xi_bound = r.real("xi_bound", 0.0);
    if (!(p.xi_bound >= 0.0))
        throw ParseError(r.path("xi_bound") + ": must be >= 0");
    if (p.type == "linear") {
        p.a = r.real("a", p.a);
        p.b = r.real("b", p.b);
    } else if (p.type == "polynomial") {
        p.order = static_cast<int>(r.integer("order"));
        if (p.order < 1)
            throw ParseError(r.path("order") + ": must be >= 1");
        const auto& terms = r.at("terms");
        if (!terms.is_array())
            throw ParseError(r.path("terms") + ": expected an array");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            io::Reader t(terms[i], r.path("terms") + "[" + std::to_string(i) + "]");
            PlantTerm pt;
            pt.coefficient = t.real("coefficient");
            for (double e : t.reals("exponents")) {
                if (e < 0 || e != std::floor(e))
                    throw ParseError(t.path("exponents") + ": exponents must be non-negative integers");
                pt.exponents.push_back(static_cast<int>(e));
            }
            if (pt.exponents.size() != static_cast<std::size_t>(2 * p.order))
                throw ParseError(t.path("exponents") + ": expected " + std::to_string(2 * p.order) + " entries");
            t.finish();
            p.terms.push_back(std::move(pt));
        }
    } else if (p.type == "model") {
        p.model_path = resolve(base, r.text("path"));
    } else if (p.type != "identity" && p.type != "corner" && p.type != "piecewise") {
        throw ParseError(r.path("type") + ": unknown plant '" + p.type +
                         "' (known: linear, identity, corner, piecewise, polynomial, model)");
    }
    r.finish();
    return p;
}

inline std::size_t count(io::Reader& r, const std::string& key, std::size_t fallback, long min) {
    const long v = r.integer(key, static_cast<long>(fallback));
    if (v < min)
        throw ParseError(r.path(key) + ": must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

inline GenerateConfig parse_generate(io::Reader r) {
    GenerateConfig g;
    try {
        g.excitation = parse_excitation(r.text("excitation", "uniform"));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(r.path("excitation") + ": " + e.what());
    }
    g.length = count(r, "length", g.length, 2);
    g.u_lo = r.real("u_lo", g.u_lo);
    g.u_hi = r.real("u_hi", g.u_hi);
    if (!(g.u_lo <= g.u_hi))
        throw ParseError(r.path("u_lo") + ": need u_lo <= u_hi");
    g.warmup = count(r, "warmup", g.warmup, 0);
    g.options.hold_min = static_cast<int>(count(r, "hold_min", static_cast<std::size_t>(g.options.hold_min), 1));
    g.options.hold_max = static_cast<int>(count(r, "hold_max", static_cast<std::size_t>(g.options.hold_max), 1));
    if (g.options.hold_max < g.options.hold_min)
        throw ParseError(r.path("hold_max") + ": must be >= hold_min");
    g.options.sines = static_cast<int>(count(r, "sines", static_cast<std::size_t>(g.options.sines), 1));
    g.output = r.text("output", g.output);
    r.finish();
    return g;
}

inline void parse_identify(io::Reader r, RunConfig& rc) {
    auto& c = rc.identify;
    c.degree = static_cast<int>(r.integer("degree", c.degree));
    c.n_min = static_cast<int>(r.integer("n_min", c.n_min));
    c.n_max = static_cast<int>(r.integer("n_max", c.n_max));
    c.rho_init = r.real("rho_init", c.rho_init);
    c.rho_growth = r.real("rho_growth", c.rho_growth);
    c.rho_max = r.real("rho_max", c.rho_max);
    c.gamma_tol = r.real("gamma_tol", c.gamma_tol);
    c.gamma_cap = r.real("gamma_cap", c.gamma_cap);
    c.order_improvement = r.real("order_improvement", c.order_improvement);
    c.holdout_fraction = r.real("holdout_fraction", c.holdout_fraction);
    rc.model_output = r.text("output", rc.model_output);
    r.finish();
    try {
        c.validate();
    } catch (const Error& e) {
        throw ParseError(std::string("identify: ") + e.what());
    }
}

inline void parse_controller(io::Reader r, ControllerConfig& c) {
    c.u_lo = r.real("u_lo", c.u_lo);
    c.u_hi = r.real("u_hi", c.u_hi);
    c.mu = r.real("mu", c.mu);
    r.finish();
    try {
        c.validate();
    } catch (const Error& e) {
        throw ParseError(std::string("controller: ") + e.what());
    }
}

inline void parse_validate(io::Reader r, RunConfig& rc) {
    auto& v = rc.validation;
    v.m = static_cast<int>(r.integer("m", v.m));
    if (v.m < 0)
        throw ParseError(r.path("m") + ": must be >= 0 (0 selects 4n)");
    if (r.has("epsilon")) {
        v.epsilon = r.real("epsilon");
        if (!(v.epsilon >= 0.0) || !std::isfinite(v.epsilon))
            throw ParseError(r.path("epsilon") + ": must be a finite number >= 0");
    }
    if (r.has("mu_grid")) {
        v.mu_grid = r.reals("mu_grid");
        if (v.mu_grid.empty())
            throw ParseError(r.path("mu_grid") + ": must not be empty");
        for (double mu : v.mu_grid)
            if (!(mu >= 0.0) || !std::isfinite(mu))
                throw ParseError(r.path("mu_grid") + ": entries must be finite and >= 0");
    }
    const auto target = r.text("target", "tracking_deviation");
    if (target == "tracking_deviation")
        v.target = GainTarget::tracking_deviation;
    else if (target == "prediction")
        v.target = GainTarget::prediction;
    else
        throw ParseError(r.path("target") + ": expected tracking_deviation or prediction");
    rc.validation_output = r.text("output", rc.validation_output);
    r.finish();
}

// Every problem across all scenarios is reported in one error.
inline void parse_simulate(io::Reader r, RunConfig& rc, const fs::path& base) {
    auto& s = rc.simulate;
    if (r.has("validation"))
        s.validation_path = resolve(base, r.text("validation"));
    const auto& list = r.at("scenarios");
    if (!list.is_array() || list.empty())
        throw ParseError(r.path("scenarios") + ": expected a non-empty array");
    std::vector<std::string> problems;
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = r.path("scenarios") + "[" + std::to_string(i) + "]";
        try {
            io::Reader sr(list[i], where);
            Scenario sc;
            sc.name = sr.text("name", "scenario" + std::to_string(i));
            if (sr.has("y0"))
                sc.y0 = sr.reals("y0");
            sc.horizon = count(sr, "horizon", sc.horizon, 1);
            sc.xi_bound = sr.real("xi_bound", rc.plant.xi_bound);
            sc.seed = static_cast<std::uint64_t>(sr.integer("seed", static_cast<long>(rc.seed + i)));
            if (sr.has("reference")) {
                auto rr = sr.object("reference");
                try {
                    sc.reference.kind = parse_reference(rr.text("kind", "steps"));
                } catch (const ParseError&) {
                    throw;
                } catch (const Error& e) {
                    throw ParseError(rr.path("kind") + ": " + e.what());
                }
                sc.reference.offset = rr.real("offset", sc.reference.offset);
                sc.reference.amplitude = rr.real("amplitude", sc.reference.amplitude);
                sc.reference.period = static_cast<int>(count(rr, "period", static_cast<std::size_t>(sc.reference.period), 1));
                sc.reference.smoothing = rr.real("smoothing", sc.reference.smoothing);
                sc.reference.seed = static_cast<std::uint64_t>(rr.integer("seed", static_cast<long>(sc.seed)));
                rr.finish();
            } else {
                sc.reference.seed = sc.seed;
            }
            sr.finish();
            if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos)
                throw ParseError(where + ".name: must be non-empty and contain no path separators");
            if (!names.insert(sc.name).second)
                throw ParseError(where + ".name: duplicate scenario name '" + sc.name + "'");
            try {
                sc.validate();
            } catch (const Error& e) {
                throw ParseError(where + ": " + e.what());
            }
            s.scenarios.push_back(std::move(sc));
        } catch (const ParseError& e) {
            problems.emplace_back(e.what());
        }
    }
    r.finish();
    if (!problems.empty()) {
        std::string msg = std::to_string(problems.size()) + " invalid scenario(s):";
        for (const auto& p : problems)
            msg += "\n  " + p;
        throw ParseError(msg);
    }
}

}  // namespace detail

inline Plant build_plant(const PlantConfig& p) {
    if (p.type == "linear") {
        return linear_plant(p.a, p.b, p.xi_bound);
    }
    if (p.type == "polynomial")
        return poly_narx_plant(p.order, p.terms, p.xi_bound);
    if (p.type == "model")
        return model_plant(io::read_model(p.model_path).model, p.xi_bound);
    return make_plant(p.type, p.xi_bound);
}

inline RunConfig parse_run_config(const io::json& j, const fs::path& base_dir, const std::string& source) {
    RunConfig rc;
    rc.base_dir = base_dir;
    io::Reader r(j, source);
    rc.seed = static_cast<std::uint64_t>(r.integer("seed", 1));
    rc.output_dir = detail::resolve(base_dir, r.text("output_dir", "out"));
    if (r.has("data"))
        rc.data_path = detail::resolve(base_dir, r.text("data"));
    if (r.has("model"))
        rc.model_path = detail::resolve(base_dir, r.text("model"));
    if (r.has("plant"))
        rc.plant = detail::parse_plant(r.object("plant"), base_dir);
    if (r.has("generate"))
        rc.generate = detail::parse_generate(r.object("generate"));
    if (r.has("identify"))
        detail::parse_identify(r.object("identify"), rc);
    if (r.has("controller"))
        detail::parse_controller(r.object("controller"), rc.controller);
    if (r.has("validate"))
        detail::parse_validate(r.object("validate"), rc);
    if (r.has("simulate"))
        detail::parse_simulate(r.object("simulate"), rc, base_dir);
    r.finish();
    return rc;
}

inline RunConfig load_run_config(const fs::path& path) {
    const auto j = io::parse_json(io::read_file(path), path.string());
    const auto base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    return parse_run_config(j, base, path.string());
}

}  // namespace nic
