// nic: identification, validation and closed-loop simulation from the command line.
//
// Exit codes: 0 success, 1 domain failure, 2 usage or parse error.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "nic/config.hpp"

namespace {

using namespace nic;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

void setup_logging() {
    auto logger = spdlog::stderr_color_st("nic");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("NIC_LOG")) {
        const auto lvl = spdlog::level::from_str(env);
        // from_str maps unknown names to off
        if (lvl == spdlog::level::off && std::string(env) != "off")
            spdlog::warn("NIC_LOG='{}' not recognised (trace, debug, info, warn, error, off)", env);
        else
            spdlog::set_level(lvl);
    }
}

int cmd_generate_data(const RunConfig& rc) {
    const auto& g = rc.generate;
    const Plant plant = build_plant(rc.plant);
    spdlog::info("generating {} samples from plant '{}' (seed {})", g.length, plant.name, rc.seed);
    DataSet ds;
    try {
        ds = generate_data(plant, g.excitation, g.length, g.u_lo, g.u_hi, rc.seed, g.warmup, g.options);
    } catch (const DivergenceError& e) {
        spdlog::error("{}", e.what());
        return kExitDomain;
    }
    const auto path = rc.output_dir / g.output;
    io::write_data_csv(path, ds);
    spdlog::info("wrote {}", path.string());
    return kExitOk;
}

int cmd_identify(const RunConfig& rc) {
    const auto data = io::read_data_csv(rc.data_path);
    spdlog::info("identifying from {} samples, degree {}, orders {}..{}", data.size(), rc.identify.degree,
                 rc.identify.n_min, rc.identify.n_max);
    const auto res = identify_model(data, rc.identify);
    for (const auto& e : res.trace)
        spdlog::debug("n={} rho={:.4g} gamma_y={:.4g} eta={:.4g} nnz={}", e.order, e.rho, e.gamma_y, e.eta,
                      e.nonzeros);
    const auto report = rc.output_dir / "identify_report.json";
    io::write_file(report, io::ident_report_json(res).dump(2) + "\n");
    spdlog::info("wrote {}", report.string());
    if (!res.success) {
        spdlog::error("identification failed: {}", res.message);
        return kExitDomain;
    }
    const auto model = rc.output_dir / rc.model_output;
    io::write_model(model, {res.model, res.eta, res.gamma_y, res.rho});
    spdlog::info("selected n={} with {} terms, gamma_y={:.4g}, eta={:.4g}, rho={:.4g}; wrote {}", res.model.order,
                 res.model.nonzeros(), res.gamma_y, res.eta, res.rho, model.string());
    return kExitOk;
}

int cmd_validate(const RunConfig& rc) {
    const auto mf = io::read_model(rc.model_path);
    const auto data = io::read_data_csv(rc.data_path);
    if (!(mf.gamma_y < 1.0)) {
        spdlog::error("model gamma_y = {} is not below 1: the identification-side stability condition fails, "
                      "so no controller gain can be validated",
                      mf.gamma_y);
        return kExitDomain;
    }
    ValidationConfig vc = rc.validation;
    if (std::isnan(vc.epsilon))
        vc.epsilon = mf.eta * mf.rho;
    spdlog::info("validating over {} mu values, epsilon={:.4g}", vc.mu_grid.size(), vc.epsilon);
    const auto rep = select_mu(mf.model, data, mf.gamma_y, rc.controller, vc);
    for (const auto& g : rep.grid)
        spdlog::debug("mu={} gamma_hat={:.4g} margin={:.4g} {}", g.mu, g.gamma_hat, g.margin, to_string(g.verdict));
    const auto path = rc.output_dir / rc.validation_output;
    io::write_file(path, io::validation_report_json(rep).dump(2) + "\n");
    spdlog::info("mu={} gamma_hat={:.4g} margin={:.4g} verdict {}; wrote {}", rep.mu, rep.gamma_hat, rep.margin,
                 to_string(rep.verdict), path.string());
    return rep.verdict == Verdict::validated_stable ? kExitOk : kExitDomain;
}

int cmd_simulate(const RunConfig& rc) {
    if (rc.simulate.scenarios.empty())
        throw ParseError("simulate: no scenarios configured");
    const auto mf = io::read_model(rc.model_path);
    ControllerConfig cfg = rc.controller;
    if (!rc.simulate.validation_path.empty()) {
        const auto j = io::parse_json(io::read_file(rc.simulate.validation_path), rc.simulate.validation_path.string());
        if (!j.is_object() || !j.contains("mu") || !j["mu"].is_number())
            throw ParseError(rc.simulate.validation_path.string() + ": missing numeric field 'mu'");
        cfg.mu = j["mu"].get<double>();
        if (j.value("verdict", "") != "validated-stable")
            spdlog::warn("validation report verdict is '{}'", j.value("verdict", "?"));
        spdlog::info("using mu={} from {}", cfg.mu, rc.simulate.validation_path.string());
    }
    const Plant plant = build_plant(rc.plant);
    io::json all = io::json::array();
    bool diverged = false;
    for (const auto& sc : rc.simulate.scenarios) {
        const auto tr = run_closed_loop(plant, mf.model, cfg, sc);
        const auto path = rc.output_dir / ("trajectory_" + sc.name + ".csv");
        io::write_file(path, io::format_trajectory_csv(tr));
        if (tr.size() == 0) {
            spdlog::error("scenario '{}' diverged at step 0", sc.name);
            all.push_back({{"name", sc.name}, {"steps", 0}, {"diverged", true}, {"divergence_step", 0}});
            diverged = true;
            continue;
        }
        const auto m = metrics(tr);
        all.push_back(io::metrics_json(sc.name, m, tr));
        if (tr.diverged) {
            spdlog::error("scenario '{}' diverged at step {}", sc.name, tr.divergence_step);
            diverged = true;
        }
        spdlog::info("{}: rms={:.4g} linf={:.4g} energy={:.4g} saturation={:.3f}", sc.name, m.rms_error, m.linf_error,
                     m.energy, m.saturation_duty);
    }
    const auto path = rc.output_dir / "metrics.json";
    io::write_file(path, io::json{{"mu", cfg.mu}, {"plant", plant.name}, {"scenarios", all}}.dump(2) + "\n");
    spdlog::info("wrote {}", path.string());
    return diverged ? kExitDomain : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Nonlinear inversion control toolkit: identify, validate, simulate"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
        sub->add_option("--seed", seed, "Seed for excitation, disturbances and references");
    };
    const std::pair<Command, const char*> commands[] = {
        {Command::generate_data, "Simulate a plant under excitation and write a t,u,y CSV"},
        {Command::identify, "Identify a sparse polynomial NARX model from a data CSV"},
        {Command::validate, "Estimate the controller gain and select mu"},
        {Command::simulate, "Run closed-loop scenarios and write trajectories and metrics"},
    };
    std::vector<std::pair<Command, CLI::App*>> subs;
    for (const auto& [cmd, help] : commands) {
        auto* sub = app.add_subcommand(to_string(cmd), help);
        add_common(sub);
        subs.emplace_back(cmd, sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    Command cmd = Command::generate_data;
    for (const auto& [c, sub] : subs)
        if (sub->parsed())
            cmd = c;

    try {
        RunConfig rc = load_run_config(config_path);
        if (!out_dir.empty())
            rc.output_dir = out_dir;
        if (seed)
            rc.override_seed(*seed);
        rc.check_inputs(cmd);
        switch (cmd) {
        case Command::generate_data: return cmd_generate_data(rc);
        case Command::identify: return cmd_identify(rc);
        case Command::validate: return cmd_validate(rc);
        case Command::simulate: return cmd_simulate(rc);
        }
    } catch (const ParseError& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitDomain;
    }
    return kExitOk;
}
