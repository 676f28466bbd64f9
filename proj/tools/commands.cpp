#include "commands.hpp"

#include "criteria.hpp"
#include "kronldp/errors.hpp"
#include "kronldp/io.hpp"
#include "kronldp/mde.hpp"
#include "kronldp/montecarlo.hpp"
#include "kronldp/outlier.hpp"
#include "kronldp/profile.hpp"
#include "kronldp/rate.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace cli {

using namespace kronldp;
using nlohmann::json;

namespace {

const StructureSet& need_structure(const RunConfig& cfg)
{
    if (!cfg.structure) throw ConfigError("config: missing field 'structure'");
    return *cfg.structure;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name)
{
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = std::filesystem::path(cfg.output_dir) / name;
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    return os;
}

// Timestamps and provenance live here so data files stay byte-identical across runs.
void write_metadata(const RunConfig& cfg)
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char ts[32];
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json m{{"command", cfg.command}, {"seed", cfg.seed}, {"threads", cfg.threads},
           {"version", version_string()}, {"timestamp", ts}, {"params", cfg.params}};
    if (cfg.structure) m["structure_hash"] = structure_hash_hex(*cfg.structure);
    open_out(cfg, "metadata.json") << m.dump(2) << '\n';
}

template <class T>
T param(const RunConfig& cfg, const char* key, T fallback)
{
    if (!cfg.params.contains(key)) return fallback;
    try {
        return cfg.params[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError(cfg.command + ": field '" + key + "' has the wrong type");
    }
}

CMat parse_psi(const RunConfig& cfg, int L)
{
    if (!cfg.params.contains("psi")) return CMat::Identity(L, L) / double(L);
    json wrap{{"L", L}, {"beta", 2}, {"A0", cfg.params["psi"]}, {"A", json::array()}};
    CMat psi = structure_from_json(wrap).A0;
    if (!is_profile(psi, 1e-9)) throw ConfigError(cfg.command + ": field 'psi' must be PSD with trace 1");
    return psi;
}

std::vector<double> grid_param(const RunConfig& cfg, const char* key, double lo_default, double hi_default,
                               int n_default)
{
    if (cfg.params.contains(key) && cfg.params[key].is_array()) return param<std::vector<double>>(cfg, key, {});
    const double lo = param(cfg, (std::string(key) + "_min").c_str(), lo_default);
    const double hi = param(cfg, (std::string(key) + "_max").c_str(), hi_default);
    const int n = param(cfg, "points", n_default);
    if (n < 1) throw ConfigError(cfg.command + ": 'points' must be positive");
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return g;
}

}  // namespace

int cmd_density(const RunConfig& cfg)
{
    const StructureSet& s = need_structure(cfg);
    LimitingMeasure mu(s);
    const double r = mu.r_inf(), l = mu.left_edge_value();
    const SupportInfo& sup = mu.support();

    json info{{"r_inf", r},
              {"left_edge", l},
              {"m_at_edge", std::isinf(sup.m_at_edge) ? json(nullptr) : json(sup.m_at_edge)},
              {"finite_edge_value", sup.finite_edge_value},
              {"atom_at_edge", std::isinf(sup.m_at_edge)},
              {"detection_eta", sup.detection_eta},
              {"detection_threshold", sup.detection_threshold},
              {"structure_hash", structure_hash_hex(s)}};
    open_out(cfg, "support.json") << info.dump(2) << '\n';

    auto os = open_out(cfg, "density.csv");
    CsvWriter csv(os, {"x", "density", "mass"});
    if (!is_deterministic(s)) {
        const double w = std::max(r - l, 1e-3);
        const double lo = param(cfg, "x_min", l - 0.05 * w), hi = param(cfg, "x_max", r + 0.05 * w);
        const int G = param(cfg, "points", 801);
        if (G < 2 || !(hi > lo)) throw ConfigError("density: need points >= 2 and x_max > x_min");
        const SpectralDensity d = density(s, lo, hi, G);
        const std::size_t n = d.grid.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i > 0 ? d.grid[i] - d.grid[i - 1] : 0.0;
            const double right = i + 1 < n ? d.grid[i + 1] - d.grid[i] : 0.0;
            csv << d.grid[i] << d.density[i] << 0.5 * (left + right) * d.density[i];
            csv.end_row();
        }
    }
    write_metadata(cfg);
    std::cout << "r_inf = " << format_double(r) << "\n";
    return 0;
}

int cmd_rate(const RunConfig& cfg)
{
    const StructureSet& s = need_structure(cfg);
    LimitingMeasure mu(s);
    const double r = mu.r_inf();
    const int beta = param(cfg, "beta", s.beta);
    std::vector<double> xs;
    for (double x : grid_param(cfg, "x", r + 0.25, r + 2.0, 8)) {
        if (x <= r + LimitingMeasure::kGuard * std::max(1.0, std::abs(r))) {
            std::cerr << "warning: x = " << format_double(x) << " is not above r_inf = " << format_double(r)
                      << "; skipped\n";
            continue;
        }
        xs.push_back(x);
    }
    OptConfig opt;
    opt.starts = param(cfg, "starts", opt.starts);
    opt.eps0 = param(cfg, "eps0", opt.eps0);
    opt.stabilization_tol = param(cfg, "stabilization_tol", opt.stabilization_tol);
    opt.max_ladder = param(cfg, "max_ladder", opt.max_ladder);
    opt.coarse_points = param(cfg, "coarse_points", opt.coarse_points);
    opt.max_evals = param(cfg, "max_evals", opt.max_evals);
    opt.simplex_step = param(cfg, "simplex_step", opt.simplex_step);
    opt.penalty = param(cfg, "penalty", opt.penalty);
    opt.seed = cfg.seed;

    RateModel rm(mu);
    const auto curve = rm.rate_curve(xs, beta, opt);
    const int L = s.L;
    std::vector<std::string> header{"x", "I", "theta_star", "eps_used", "stability_flag"};
    for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b) {
            header.push_back("psi_" + std::to_string(a) + std::to_string(b));
            if (beta == 2) header.push_back("psi_" + std::to_string(a) + std::to_string(b) + "_im");
        }
    auto os = open_out(cfg, "rate.csv");
    CsvWriter csv(os, header);
    for (const auto& res : curve) {
        csv << res.x << res.value << res.theta_star << res.epsilon_used << long(res.stability_flag);
        for (int a = 0; a < L; ++a)
            for (int b = 0; b < L; ++b) {
                csv << res.psi_star(a, b).real();
                if (beta == 2) csv << res.psi_star(a, b).imag();
            }
        csv.end_row();
        if (!res.stability_flag)
            std::cerr << "warning: epsilon ladder did not stabilize at x = " << format_double(res.x) << "\n";
    }
    write_metadata(cfg);
    return 0;
}

int cmd_outlier(const RunConfig& cfg)
{
    const StructureSet& s = need_structure(cfg);
    LimitingMeasure mu(s);
    const CMat psi = parse_psi(cfg, s.L);
    {
        auto os = open_out(cfg, "outlier.csv");
        CsvWriter csv(os, {"theta", "Z", "has_outlier", "method", "residual", "c0", "c1"});
        for (double th : grid_param(cfg, "theta", 0.25, 3.0, 12)) {
            if (!(th > 0.0)) throw ConfigError("outlier: theta values must be positive");
            const auto o = largest_outlier(mu, th, psi);
            csv << th << o.Z << long(o.has_outlier) << to_string(o.method) << o.residual << o.c0 << o.c1;
            csv.end_row();
        }
    }
    if (cfg.params.contains("targets")) {
        auto os = open_out(cfg, "tilt.csv");
        CsvWriter csv(os, {"x", "theta", "Z", "residual"});
        for (double x : param<std::vector<double>>(cfg, "targets", {})) {
            const auto t = tilt_for_target(mu, x, psi);
            csv << x << t.theta << t.Z << t.residual;
            csv.end_row();
        }
    }
    write_metadata(cfg);
    return 0;
}

int cmd_simulate(const RunConfig& cfg)
{
    const StructureSet& s = need_structure(cfg);
    const long reps = param(cfg, "reps", 1000L);
    if (reps <= 0) throw ConfigError("simulate: reps must be positive");
    const std::vector<int> Ns = param<std::vector<int>>(cfg, "N", {25, 50, 100});
    for (int N : Ns)
        if (N < 1) throw ConfigError("simulate: N values must be positive");
    const std::string method = param<std::string>(cfg, "method", "direct");
    if (method != "direct" && method != "importance") throw ConfigError("simulate: method must be direct or importance");
    const std::string sampler = param<std::string>(cfg, "sampler", "auto");
    TailOptions topt;
    topt.two_sided = param(cfg, "two_sided", true);
    topt.threads = cfg.threads;
    if (sampler == "dense") topt.sampler = Sampler::Dense;
    else if (sampler == "tridiagonal") topt.sampler = Sampler::Tridiagonal;
    else if (sampler != "auto") throw ConfigError("simulate: sampler must be auto, dense or tridiagonal");

    LimitingMeasure mu(s);
    const double x = param(cfg, "x", mu.r_inf() + 0.2);
    const double delta = param(cfg, "delta", 0.1);
    if (!(delta > 0.0)) throw ConfigError("simulate: delta must be positive");

    auto os = open_out(cfg, "tail.jsonl");
    for (int N : Ns) {
        TailEstimate t;
        if (method == "direct") {
            t = tail_probability(s, x, delta, N, reps, cfg.seed, topt);
        } else {
            ImportanceOptions iopt;
            iopt.tail = topt;
            iopt.theta = param(cfg, "theta", -1.0);
            if (cfg.params.contains("psi")) iopt.psi = parse_psi(cfg, s.L);
            t = importance_tail(mu, x, delta, N, reps, cfg.seed, iopt);
        }
        json rec{{"x", t.x},
                 {"delta", t.delta},
                 {"N", t.N},
                 {"reps", t.reps},
                 {"hits", t.hits},
                 {"p_hat", t.p_hat},
                 {"rate_hat", std::isinf(t.rate_hat) ? json(nullptr) : json(t.rate_hat)},
                 {"ci_low", t.ci_low},
                 {"ci_high", t.ci_high},
                 {"method", to_string(t.method)},
                 {"two_sided", t.two_sided},
                 {"theta", t.theta},
                 {"ess", t.ess},
                 {"mean_weight", t.mean_weight},
                 {"reliable", t.reliable},
                 {"structure_hash", structure_hash_hex(s)},
                 {"seed", cfg.seed},
                 {"version", version_string()}};
        write_json_line(os, rec);
        if (!t.reliable) std::cerr << "warning: N = " << N << " estimate flagged unreliable (ess " << t.ess << ")\n";
    }
    write_metadata(cfg);
    return 0;
}

int cmd_verify(const RunConfig& cfg)
{
    std::filesystem::create_directories(cfg.output_dir);
    auto os = open_out(cfg, "verify.jsonl");
    int first_fail = 0;
    for (int id : criteria::verify_ids()) {
        const auto r = criteria::run(id, cfg.threads);
        std::cout << criteria::format(r) << std::endl;
        write_json_line(os, json{{"criterion", r.id},
                                 {"title", criteria::title(r.id)},
                                 {"pass", r.pass},
                                 {"detail", r.detail},
                                 {"seconds", r.seconds},
                                 {"version", version_string()}});
        if (!r.pass && first_fail == 0) first_fail = id;
    }
    write_metadata(cfg);
    if (first_fail != 0) {
        std::cerr << "verify failed: first failing suite is criterion " << first_fail << " ("
                  << criteria::title(first_fail) << ")\n";
        return 2;
    }
    return 0;
}

}  // namespace cli
