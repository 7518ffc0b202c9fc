#include "gsdde/cli/commands.hpp"

#include "gsdde/error.hpp"
#include "gsdde/relaxed/chattering.hpp"
#include "gsdde/relaxed/cost.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>

namespace gsdde::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* version = "0.1.0";

std::ofstream open_out(const fs::path& p)
{
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError(fmt::format("cannot write {}", p.string()));
    return os;
}

json report_json(const econ::EconReport& r)
{
    json scen = json::array();
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        scen.push_back({{"label", r.labels[i]}, {"y0", r.scenario_y0[i]}});
    }
    return {{"y0", r.y0},
            {"y0_std_error", r.y0_std_error},
            {"mode", econ::to_string(r.mode)},
            {"scenarios", scen},
            {"sigma_inv_clamp_count", r.clamp_count},
            {"nonpositive_nodes", r.nonpositive_nodes},
            {"forward_nodes", r.forward_nodes},
            {"regression_fallbacks", r.regression_fallbacks},
            {"accepted", r.accepted}};
}

void print_y0(std::ostream& out, const econ::EconReport& r)
{
    out << fmt::format("Y0 = {:.6f}  (std error {:.6f}, mode {})\n", r.y0, r.y0_std_error,
                       econ::to_string(r.mode));
    if (r.clamp_count > 0) {
        out << fmt::format("warning: {} delayed states below the sigma floor; run not accepted\n",
                           r.clamp_count);
    }
}

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

CommandResult cmd_gtable(const RunConfig& cfg, const fs::path& out_dir)
{
    const auto table = econ::make_table(cfg.econ);
    fs::create_directories(out_dir);
    const auto path = out_dir / table_name;
    auto os = open_out(path);
    gcalc::write_csv(os, *table);
    CommandResult res;
    res.files.push_back(path);
    res.results = {{"mass", table->mass()}, {"mean", table->mean()}, {"variance", table->variance()},
                   {"cdf_at_0", table->cdf_at(0.0)}};
    return res;
}

CommandResult cmd_forward(const RunConfig& cfg, const fs::path& out_dir)
{
    const auto ensembles = econ::forward(cfg.econ);
    fs::create_directories(out_dir);
    CommandResult res;
    json labels = json::array();
    for (std::size_t i = 0; i < ensembles.size(); ++i) {
        const auto path = ensembles.size() == 1
                              ? out_dir / forward_name
                              : out_dir / fmt::format("forward_paths_{}.csv", i);
        auto os = open_out(path);
        sdde::write_csv(os, ensembles[i], cfg.econ.csv_paths);
        res.files.push_back(path);
        labels.push_back(ensembles[i].noise_label);
    }
    res.results = {{"ensembles", labels}};
    return res;
}

CommandResult cmd_solve(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out)
{
    const auto report = econ::run_scenario(cfg.econ);
    fs::create_directories(out_dir);
    CommandResult res;
    const auto& ens = report.ensembles.at(report.argmax);
    {
        const auto path = out_dir / forward_name;
        auto os = open_out(path);
        sdde::write_csv(os, ens, cfg.econ.csv_paths);
        res.files.push_back(path);
    }
    {
        const auto path = out_dir / backward_name;
        auto os = open_out(path);
        fbsdde::write_csv(os, report.solutions.at(report.argmax), ens, econ::make_spec(cfg.econ),
                          cfg.econ.csv_paths);
        res.files.push_back(path);
    }
    res.results = report_json(report);
    print_y0(out, report);
    return res;
}

CommandResult cmd_chatter(const RunConfig& cfg, const fs::path& out_dir)
{
    const auto& c = cfg.chatter;
    c.validate();
    const auto grid = sdde::TimeGrid::make(c.tau, c.horizon, c.dt);
    relaxed::ActionGrid actions(c.actions);
    const auto mu = relaxed::RelaxedControl::constant(actions, c.weights, grid.steps());

    sdde::DelayModel model;
    model.drift = [](double, double, double, double u, double) { return u; };
    const double s = c.diffusion;
    model.diffusion = [s](double, double, double) { return s; };
    model.tau = c.tau;
    const double x0 = c.x0;
    model.history = [x0](double) { return x0; };

    relaxed::CostSpec cost;
    cost.running = [](double, double, double, double u, double) { return u * u; };
    cost.terminal = [](double x) { return x * x; };

    const auto scenarios = gcalc::extreme_scenarios(cfg.econ.band());
    const auto rows = relaxed::chattering_study(mu, model, cost, grid, scenarios, c.n_paths,
                                                cfg.econ.seed, c.levels, cfg.econ.workers);
    fs::create_directories(out_dir);
    const auto path = out_dir / chatter_name;
    auto os = open_out(path);
    relaxed::write_csv(os, rows);
    CommandResult res;
    res.files.push_back(path);
    json gaps = json::array();
    for (const auto& r : rows) gaps.push_back({{"level", r.level}, {"gap", r.gap}, {"se_gap", r.se_gap}});
    res.results = {{"j_relaxed", rows.empty() ? 0.0 : rows.front().j_relaxed}, {"gaps", gaps}};
    return res;
}

CommandResult cmd_reproduce(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out)
{
    const auto report = econ::run_scenario(cfg.econ);
    CommandResult res;
    res.files = econ::write_figures(report, cfg.econ, out_dir);
    res.results = report_json(report);
    print_y0(out, report);
    return res;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Delay stochastic control under volatility uncertainty", "gsdde"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = ".";
    Overrides o;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    double dt = 0.0;
    unsigned workers = 1;
    std::string mode;

    app.add_option("--config", config_path, "JSON configuration file (or a run manifest)");
    app.add_option("--out", out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Master seed");
    auto* paths_opt = app.add_option("--paths", paths, "Number of sample paths");
    auto* dt_opt = app.add_option("--dt", dt, "Time step");
    auto* workers_opt = app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    auto* mode_opt = app.add_option("--mode", mode, "gnormal or scenario_sup");

    auto* gtable = app.add_subcommand("gtable", "G-normal distribution table");
    auto* forward = app.add_subcommand("forward", "Forward delay ensemble");
    auto* solve = app.add_subcommand("solve", "Forward-backward solve, prints Y0");
    auto* chatter = app.add_subcommand("chatter", "Chattering convergence study");
    auto* reproduce =
        app.add_subcommand("reproduce", "Default configuration with a fixed seed: figure data and manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 1;
    }
    if (*seed_opt) o.seed = seed;
    if (*paths_opt) o.paths = paths;
    if (*dt_opt) o.dt = dt;
    if (*workers_opt) o.workers = workers;
    if (*mode_opt) o.mode = mode;

    std::string command;
    for (auto* sub : {gtable, forward, solve, chatter, reproduce}) {
        if (sub->parsed()) command = sub->get_name();
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        RunConfig cfg;
        json given = json::object();
        if (command == "reproduce") {
            if (!config_path.empty() || o.seed || o.paths || o.dt || o.mode) {
                throw ConfigError("reproduce takes only --out and --workers");
            }
            cfg.econ.seed = reproduce_seed;
            if (o.workers) cfg.econ.workers = *o.workers;
        } else {
            if (!config_path.empty()) {
                std::ifstream is(config_path);
                if (!is) throw ConfigError(fmt::format("cannot open config file '{}'", config_path));
                try {
                    given = json::parse(is);
                } catch (const json::parse_error& ex) {
                    throw ConfigError(fmt::format("config file '{}' is not valid JSON: {}",
                                                  config_path, ex.what()));
                }
                cfg = parse_config(given);
            }
            apply(cfg, o);
        }
        cfg.econ.validate();

        const fs::path dir(out_dir);
        CommandResult res;
        if (command == "gtable") res = cmd_gtable(cfg, dir);
        if (command == "forward") res = cmd_forward(cfg, dir);
        if (command == "solve") res = cmd_solve(cfg, dir, out);
        if (command == "chatter") res = cmd_chatter(cfg, dir);
        if (command == "reproduce") res = cmd_reproduce(cfg, dir, out);

        json manifest;
        manifest["manifest_version"] = 1;
        manifest["command"] = command;
        manifest["config_file"] = config_path.empty() ? json(nullptr) : json(config_path);
        manifest["config"] = to_json(cfg);
        manifest["defaulted_keys"] = defaulted_keys(given);
        manifest["unstated_defaults"] = unstated_defaults(cfg);
        manifest["seed"] = cfg.econ.seed;
        manifest["versions"] = {
            {"gsdde", version},
            {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                                  EIGEN_MINOR_VERSION)},
            {"fmt", FMT_VERSION},
            {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                          NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)},
            {"compiler", __VERSION__}};
        manifest["started_utc"] = utc_now();
        manifest["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json files = json::array();
        for (const auto& f : res.files) files.push_back(f.filename().string());
        manifest["outputs"] = files;
        manifest["results"] = res.results;
        auto os = open_out(dir / manifest_name);
        os << manifest.dump(2) << "\n";
        for (const auto& f : res.files) out << "wrote " << f.string() << "\n";
        out << "wrote " << (dir / manifest_name).string() << "\n";
        return 0;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n"
            << "usage: gsdde <gtable|forward|solve|chatter|reproduce> [--config FILE] [--out DIR]"
               " [--seed N] [--paths N] [--dt X] [--workers N] [--mode gnormal|scenario_sup]\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace gsdde::cli
