#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "data.hpp"
#include "identify.hpp"
#include "model.hpp"
#include "sim.hpp"
#include "validate.hpp"

namespace nic::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr const char* kModelFormat = "nic-model";
inline constexpr int kModelVersion = 1;

// ----------------------------------------------------------------------------
// Number formatting: shortest text that reads back to the same double.
// ----------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    if (s.empty())
        return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out)
        throw Error("write to '" + path.string() + "' failed");
}

// ----------------------------------------------------------------------------
// Data CSV: header t,u,y, one row per sample, t consecutive and increasing.
// ----------------------------------------------------------------------------

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return std::string(s);
}

inline DataSet parse_data_csv(const std::string& text, const std::string& source) {
    auto fail = [&](std::size_t line, const std::string& msg) -> ParseError {
        return ParseError(source + ":" + std::to_string(line) + ": " + msg);
    };
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    int col_t = -1, col_u = -1, col_y = -1;
    std::size_t ncols = 0;
    DataSet ds;
    double prev_t = 0.0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        const auto cells = split_commas(line);
        if (!have_header) {
            ncols = cells.size();
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const auto name = trim(cells[c]);
                int* slot = name == "t" ? &col_t : name == "u" ? &col_u : name == "y" ? &col_y : nullptr;
                if (!slot)
                    throw fail(lineno, "unknown column '" + name + "' (expected header t,u,y)");
                if (*slot >= 0)
                    throw fail(lineno, "duplicate column '" + name + "'");
                *slot = static_cast<int>(c);
            }
            if (col_t < 0 || col_u < 0 || col_y < 0)
                throw fail(lineno, "header must name the columns t,u,y");
            have_header = true;
            continue;
        }
        if (cells.size() != ncols)
            throw fail(lineno, "expected " + std::to_string(ncols) + " fields, found " + std::to_string(cells.size()));
        double t = 0.0, u = 0.0, y = 0.0;
        if (!parse_double(cells[static_cast<std::size_t>(col_t)], t))
            throw fail(lineno, "column t: cannot parse '" + trim(cells[static_cast<std::size_t>(col_t)]) + "'");
        if (!parse_double(cells[static_cast<std::size_t>(col_u)], u) || !std::isfinite(u))
            throw fail(lineno, "column u: not a finite number '" + trim(cells[static_cast<std::size_t>(col_u)]) + "'");
        if (!parse_double(cells[static_cast<std::size_t>(col_y)], y) || !std::isfinite(y))
            throw fail(lineno, "column y: not a finite number '" + trim(cells[static_cast<std::size_t>(col_y)]) + "'");
        if (t != std::floor(t))
            throw fail(lineno, "column t: sample index must be an integer");
        if (!ds.y.empty() && t != prev_t + 1.0)
            throw fail(lineno, "column t: expected " + format_double(prev_t + 1.0) + " (consecutive increasing samples)");
        prev_t = t;
        ds.u.push_back(u);
        ds.y.push_back(y);
    }
    if (!have_header)
        throw fail(std::max<std::size_t>(lineno, 1), "empty file, expected header t,u,y");
    if (ds.size() < 2)
        throw fail(lineno, "need at least 2 data rows, found " + std::to_string(ds.size()));
    return ds;
}

inline DataSet read_data_csv(const fs::path& path) { return parse_data_csv(read_file(path), path.string()); }

// t runs 1-L .. 0.
inline std::string format_data_csv(const DataSet& ds) {
    ds.validate();
    std::string out = "t,u,y\n";
    for (std::size_t i = 0; i < ds.size(); ++i)
        out += std::to_string(ds.time_of(i)) + "," + format_double(ds.u[i]) + "," + format_double(ds.y[i]) + "\n";
    return out;
}

inline void write_data_csv(const fs::path& path, const DataSet& ds) { write_file(path, format_data_csv(ds)); }

// ----------------------------------------------------------------------------
// Strict JSON helpers
// ----------------------------------------------------------------------------

// Non-finite numbers are written as strings.
inline json number(double v) {
    if (std::isfinite(v))
        return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object())
            throw ParseError(where_ + ": expected an object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

    [[nodiscard]] const json& at(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key))
            throw ParseError(where_ + ": missing field '" + key + "'");
        return j_.at(key);
    }

    [[nodiscard]] std::string path(const std::string& key) const { return where_ + "." + key; }

    double real(const std::string& key) { return to_real(at(key), path(key)); }
    double real(const std::string& key, double fallback) { return has(key) ? real(key) : fallback; }

    long integer(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_number_integer())
            throw ParseError(path(key) + ": expected an integer");
        return v.get<long>();
    }
    long integer(const std::string& key, long fallback) { return has(key) ? integer(key) : fallback; }

    std::string text(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_string())
            throw ParseError(path(key) + ": expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key))
            return fallback;
        const auto& v = at(key);
        if (!v.is_boolean())
            throw ParseError(path(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::vector<double> reals(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_array())
            throw ParseError(path(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(to_real(v[i], path(key) + "[" + std::to_string(i) + "]"));
        return out;
    }

    Reader object(const std::string& key) { return Reader(at(key), path(key)); }

    // Throws on keys that were never read.
    void finish() const {
        for (const auto& [k, _] : j_.items())
            if (!seen_.count(k))
                throw ParseError(where_ + ": unknown field '" + k + "'");
    }

    static double to_real(const json& v, const std::string& where) {
        if (v.is_number())
            return v.get<double>();
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "inf")
                return std::numeric_limits<double>::infinity();
            if (s == "-inf")
                return -std::numeric_limits<double>::infinity();
            if (s == "nan")
                return std::numeric_limits<double>::quiet_NaN();
        }
        throw ParseError(where + ": expected a number");
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

inline json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source + ": " + e.what());
    }
}

// ----------------------------------------------------------------------------
// Model file
// ----------------------------------------------------------------------------

struct ModelFile {
    PolyModel model;
    double eta = 0.0;
    double gamma_y = std::numeric_limits<double>::infinity();
    double rho = 1.0;
};

inline json model_to_json(const ModelFile& mf) {
    const auto& m = mf.model;
    json terms = json::array();
    for (std::size_t i = 0; i < m.terms.size(); ++i)
        terms.push_back({{"exponents", m.terms[i].exponents}, {"coefficient", m.coefficients[i]}});
    return {{"format", kModelFormat},
            {"version", kModelVersion},
            {"order", m.order},
            {"degree", m.degree},
            {"scaler", {{"offset", m.scaler.offset}, {"gain", m.scaler.gain}}},
            {"terms", terms},
            {"rho_y", m.rho_y},
            {"rho_u", m.rho_u},
            {"eta", number(mf.eta)},
            {"gamma_y", number(mf.gamma_y)},
            {"rho", number(mf.rho)}};
}

inline ModelFile model_from_json(const json& j, const std::string& source) {
    Reader r(j, source);
    if (r.text("format") != kModelFormat)
        throw ParseError(source + ": not a model file (format must be '" + std::string(kModelFormat) + "')");
    const long version = r.integer("version");
    if (version != kModelVersion)
        throw ParseError(source + ": unsupported model file version " + std::to_string(version) + " (this build reads " +
                         std::to_string(kModelVersion) + ")");
    ModelFile mf;
    auto& m = mf.model;
    m.order = static_cast<int>(r.integer("order"));
    m.degree = static_cast<int>(r.integer("degree"));
    {
        auto s = r.object("scaler");
        m.scaler.offset = s.reals("offset");
        m.scaler.gain = s.reals("gain");
        s.finish();
    }
    const auto& terms = r.at("terms");
    if (!terms.is_array())
        throw ParseError(r.path("terms") + ": expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        Reader t(terms[i], r.path("terms") + "[" + std::to_string(i) + "]");
        const auto& e = t.at("exponents");
        if (!e.is_array())
            throw ParseError(t.path("exponents") + ": expected an array of integers");
        BasisTerm b;
        for (const auto& x : e) {
            if (!x.is_number_integer())
                throw ParseError(t.path("exponents") + ": expected an array of integers");
            b.exponents.push_back(x.get<int>());
        }
        m.terms.push_back(std::move(b));
        m.coefficients.push_back(t.real("coefficient"));
        t.finish();
    }
    m.rho_y = r.real("rho_y");
    m.rho_u = r.real("rho_u");
    mf.eta = r.real("eta");
    mf.gamma_y = r.real("gamma_y");
    mf.rho = r.real("rho");
    r.finish();
    try {
        m.validate();
    } catch (const Error& e) {
        throw ParseError(source + ": " + e.what());
    }
    return mf;
}

inline void write_model(const fs::path& path, const ModelFile& mf) { write_file(path, model_to_json(mf).dump(2) + "\n"); }

inline ModelFile read_model(const fs::path& path) {
    return model_from_json(parse_json(read_file(path), path.string()), path.string());
}

// ----------------------------------------------------------------------------
// Reports
// ----------------------------------------------------------------------------

inline json ident_report_json(const IdentResult& res) {
    json trace = json::array();
    for (const auto& e : res.trace)
        trace.push_back({{"order", e.order},
                         {"rho", e.rho},
                         {"gamma_y", number(e.gamma_y)},
                         {"eta", number(e.eta)},
                         {"nonzeros", e.nonzeros},
                         {"l1_norm", number(e.l1_norm)},
                         {"feasible", e.feasible}});
    return {{"success", res.success},
            {"message", res.message},
            {"order", res.model.order},
            {"degree", res.model.degree},
            {"nonzeros", res.model.nonzeros()},
            {"eta", number(res.eta)},
            {"gamma_y", number(res.gamma_y)},
            {"rho", number(res.rho)},
            {"fit_error", number(res.fit_error)},
            {"holdout_error", number(res.holdout_error)},
            {"order_limit_reached", res.order_limit_reached},
            {"trace", trace}};
}

inline json validation_report_json(const ValidationReport& rep) {
    json grid = json::array();
    for (const auto& g : rep.grid)
        grid.push_back({{"mu", g.mu},
                        {"gamma_min", number(g.gamma_min)},
                        {"gamma_hat", number(g.gamma_hat)},
                        {"margin", number(g.margin)},
                        {"verdict", to_string(g.verdict)},
                        {"consistent", g.consistent},
                        {"saturated_steps", g.saturated_steps}});
    return {{"mu", rep.mu},
            {"gamma_min", number(rep.gamma_min)},
            {"gamma_hat", number(rep.gamma_hat)},
            {"gamma_y", number(rep.gamma_y)},
            {"epsilon", number(rep.epsilon)},
            {"margin", number(rep.margin)},
            {"m", rep.m},
            {"verdict", to_string(rep.verdict)},
            {"target", to_string(rep.target)},
            {"grid", grid}};
}

inline json metrics_json(const std::string& name, const Metrics& m, const Trajectory& tr) {
    return {{"name", name},
            {"rms_error", number(m.rms_error)},
            {"linf_error", number(m.linf_error)},
            {"energy", number(m.energy)},
            {"saturation_duty", m.saturation_duty},
            {"steps", m.steps},
            {"diverged", tr.diverged},
            {"divergence_step", tr.divergence_step}};
}

inline std::string format_trajectory_csv(const Trajectory& tr) {
    std::string out = "t,r,y,u,xi,J,saturated\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        out += std::to_string(tr.t[k]);
        for (double v : {tr.r[k], tr.y[k], tr.u[k], tr.xi[k], tr.J[k]})
            out += "," + format_double(v);
        out += tr.saturated[k] ? ",1\n" : ",0\n";
    }
    return out;
}

}  // namespace nic::io
