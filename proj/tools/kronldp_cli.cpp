#include "commands.hpp"

#include "kronldp/errors.hpp"
#include "kronldp/io.hpp"
#include "kronldp/montecarlo.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace {

using nlohmann::json;

// Flag values that override the JSON parameter block when given.
struct Overrides {
    std::vector<std::pair<CLI::Option*, std::function<std::pair<std::string, json>()>>> flags;

    template <class T>
    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
    {
        auto holder = std::make_shared<T>();
        CLI::Option* opt = app->add_option(flag, *holder, help);
        flags.emplace_back(opt, [holder, key] { return std::make_pair(key, json(*holder)); });
    }

    std::map<std::string, json> values() const
    {
        std::map<std::string, json> out;
        for (const auto& [opt, get] : flags)
            if (opt->count() > 0) out.insert(get());
        return out;
    }
};

int run(int argc, char** argv)
{
    CLI::App app{"Large-deviation rate functions for Kronecker random matrices"};
    app.set_version_flag("--version", kronldp::version_string());
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path, out_dir, command;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("--config", config_path, "JSON config (structure plus per-command block)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--threads", threads, "worker threads (fallback: KRONLDP_THREADS)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--command", command, "density|rate|outlier|simulate|verify; overrides the JSON");

    Overrides ov;
    auto* density = app.add_subcommand("density", "spectral density CSV and edge JSON");
    ov.add<double>(density, "--x-min", "x_min", "left end of the grid (default: left edge - 5% of the support)");
    ov.add<double>(density, "--x-max", "x_max", "right end of the grid (default: right edge + 5%)");
    ov.add<int>(density, "--points", "points", "grid points (default 801)");

    auto* rate = app.add_subcommand("rate", "rate function curve");
    ov.add<std::vector<double>>(rate, "--x", "x", "evaluation points (default: 8 points on [r+0.25, r+2])");
    ov.add<int>(rate, "--beta", "beta", "1 or 2 (default: structure beta)");
    ov.add<int>(rate, "--starts", "starts", "Nelder-Mead starts, at least 8 (default 8)");
    ov.add<double>(rate, "--eps0", "eps0", "first epsilon (default: half of Tr[(Id/L) S(Id/L)])");
    ov.add<double>(rate, "--stabilization-tol", "stabilization_tol", "ladder agreement (default 1e-4)");
    ov.add<int>(rate, "--max-ladder", "max_ladder", "epsilon halvings (default 12)");
    ov.add<int>(rate, "--coarse-points", "coarse_points", "theta grid before refinement (default 64)");
    ov.add<int>(rate, "--max-evals", "max_evals", "evaluations per start (default 1200)");
    ov.add<double>(rate, "--simplex-step", "simplex_step", "initial simplex size (default 0.3)");
    ov.add<double>(rate, "--penalty", "penalty", "constraint penalty weight (default 1)");

    auto* outlier = app.add_subcommand("outlier", "Z(theta) table and tilt inversion");
    ov.add<std::vector<double>>(outlier, "--theta", "theta", "tilt values (default: 12 points on [0.25, 3])");
    ov.add<std::vector<double>>(outlier, "--targets", "targets", "x values to invert to theta");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo tail probabilities");
    ov.add<double>(simulate, "--x", "x", "window centre (default r + 0.2)");
    ov.add<double>(simulate, "--delta", "delta", "window half-width (default 0.1)");
    ov.add<std::vector<int>>(simulate, "--N", "N", "inner dimensions (default 25 50 100)");
    ov.add<long>(simulate, "--reps", "reps", "replicates per N (default 1000)");
    ov.add<std::string>(simulate, "--method", "method", "direct or importance (default direct)");
    ov.add<std::string>(simulate, "--sampler", "sampler", "auto, dense or tridiagonal (default auto)");
    ov.add<double>(simulate, "--theta", "theta", "importance tilt (default: solved from x)");

    app.add_subcommand("verify", "run acceptance suites 1-10");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    json doc = json::object();
    if (!config_path.empty()) doc = kronldp::load_json(config_path);
    if (!doc.is_object()) throw kronldp::ConfigError("config: top level must be an object");

    cli::RunConfig cfg;
    if (!app.get_subcommands().empty()) cfg.command = app.get_subcommands().front()->get_name();
    if (!command.empty()) cfg.command = command;
    if (cfg.command.empty() && doc.contains("command")) cfg.command = doc["command"].get<std::string>();
    if (cfg.command.empty()) throw kronldp::ConfigError("no command given (subcommand, --command or \"command\")");

    if (doc.contains("structure")) cfg.structure = kronldp::structure_from_json(doc["structure"]);
    else if (doc.contains("A0")) cfg.structure = kronldp::structure_from_json(doc);
    if (doc.contains(cfg.command)) cfg.params = doc[cfg.command];
    if (!cfg.params.is_object()) throw kronldp::ConfigError("field '" + cfg.command + "': expected an object");
    for (const auto& [k, v] : ov.values()) cfg.params[k] = v;

    cfg.seed = seed ? *seed : doc.value("seed", std::uint64_t{1});
    cfg.threads = threads ? *threads : doc.value("threads", kronldp::default_threads());
    if (cfg.threads < 1) throw kronldp::ConfigError("threads must be positive");
    cfg.output_dir = !out_dir.empty() ? out_dir : doc.value("output_dir", std::string("out"));

    if (cfg.command == "density") return cli::cmd_density(cfg);
    if (cfg.command == "rate") return cli::cmd_rate(cfg);
    if (cfg.command == "outlier") return cli::cmd_outlier(cfg);
    if (cfg.command == "simulate") return cli::cmd_simulate(cfg);
    if (cfg.command == "verify") return cli::cmd_verify(cfg);
    throw kronldp::ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const kronldp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const kronldp::DegenerateModel& e) {
        std::cerr << "degenerate model: " << e.what() << "\n";
        return 3;
    } catch (const kronldp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
