#include "gsdde/cli/commands.hpp"
#include "gsdde/error.hpp"
#include "gsdde/fbsdde/backward.hpp"
#include "gsdde/gcalc/gheat.hpp"
#include "gsdde/gcalc/gnormal_table.hpp"
#include "gsdde/gcalc/sublinear.hpp"
#include "gsdde/relaxed/chattering.hpp"
#include "gsdde/relaxed/cost.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace gsdde;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Simpson rule of phi against the N(0, s^2) density.
double gaussian_integral(const std::function<double(double)>& phi, double s)
{
    const int n = 4000;
    const double a = -12.0 * s, h = 24.0 * s / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = a + h * i;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * phi(x) * std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
    }
    return sum * h / 3.0;
}

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr)
{
    std::vector<const char*> argv{"gsdde"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (code != 0) std::cerr << e.str();
    return code;
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "gsdde_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome degenerate_band_reduction()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto table = gcalc::build_gnormal_table(gcalc::VolatilityBand(1.0, 1.0));
    const double elapsed = seconds_since(t0);
    double err = 0.0;
    for (int i = 0; i <= 8000; ++i) {
        const double x = -4.0 + i * 1e-3;
        err = std::max(err, std::abs(table.cdf_at(x) - normal_cdf(x)));
    }
    return {err <= 1e-2 && elapsed <= 5.0,
            fmt::format("sup |F - Phi| on [-4,4] = {:.3e} (limit 1e-2), build time {:.2f} s (limit 5 s)",
                        err, elapsed)};
}

Outcome moment_bracketing()
{
    const gcalc::VolatilityBand band(0.75, 1.25);
    const auto grid = gcalc::HeatGrid::for_band(band);
    const double up = gcalc::interpolate(
        gcalc::solve_gheat([](double x) { return x * x; }, band, grid, 1.0), grid, 0.0);
    const double lo = gcalc::interpolate(
        gcalc::solve_gheat([](double x) { return -x * x; }, band, grid, 1.0), grid, 0.0);
    const double up_oracle = gaussian_integral([](double x) { return x * x; }, 1.25);
    const double lo_oracle = gaussian_integral([](double x) { return -x * x; }, 0.75);
    const bool pass = std::abs(up - up_oracle) <= 0.02 * std::abs(up_oracle) &&
                      std::abs(lo - lo_oracle) <= 0.02 * std::abs(lo_oracle);
    return {pass, fmt::format("phi = x^2: {:.6f} (oracle {:.6f}); phi = -x^2: {:.6f} (oracle {:.6f}); tolerance 2%",
                              up, up_oracle, lo, lo_oracle)};
}

double method_of_steps_error(double dt)
{
    sdde::DelayModel model;
    model.drift = [](double, double, double xd, double, double) { return xd; };
    model.tau = 0.1;
    model.history = [](double) { return 1.0; };
    const auto grid = sdde::TimeGrid::make(0.1, 0.2, dt);
    const gcalc::NoiseIncrements zero{std::vector<double>(grid.steps(), 0.0),
                                      std::vector<double>(grid.steps(), 0.0)};
    const auto path = sdde::integrate_strict(model, sdde::constant_control(0.0), grid, zero);
    const double s = 0.1;
    const double oracle = 1.1 + s + 0.5 * s * s;
    return std::abs(path.states.back() - oracle);
}

Outcome delay_convergence()
{
    const double e1 = method_of_steps_error(1e-3);
    const double e2 = method_of_steps_error(5e-4);
    return {e1 <= 5e-3 && e2 <= 0.5 * e1 * 1.1,
            fmt::format("|X(0.2) - 1.205| = {:.3e} at dt = 1e-3, {:.3e} at dt = 5e-4 (ratio {:.3f}, need >= {:.3f})",
                        e1, e2, e1 / e2, 2.0 / 1.1)};
}

Outcome zero_driver_consistency()
{
    std::string detail;
    bool pass = true;
    for (auto mode : {econ::Mode::gnormal, econ::Mode::scenario_sup}) {
        econ::EconConfig cfg;
        cfg.loading = 0.0;
        cfg.history_constant = 1.0;
        cfg.n_paths = 10000;
        cfg.mode = mode;
        const auto ensembles = econ::forward(cfg);
        std::vector<std::vector<double>> terminal_sq;
        std::vector<gcalc::ScenarioEstimate> y0s;
        std::size_t drift_violations = 0;
        for (const auto& ens : ensembles) {
            const auto sol = fbsdde::backward_solve(ens, econ::make_spec(cfg),
                                                    fbsdde::RegressionBasis::polynomial(2));
            y0s.push_back({ens.noise_label, sol.y0, sol.y0_std_error});
            std::vector<double> sq;
            for (double k : ens.column(ens.grid.last_node())) sq.push_back(k * k);
            terminal_sq.push_back(std::move(sq));
            for (std::size_t k = 0; k + 1 < sol.y.size(); ++k) {
                const auto a = gcalc::summarize(sol.y[k]);
                const auto b = gcalc::summarize(sol.y[k + 1]);
                if (std::abs(a.mean - b.mean) >
                    3.0 * std::hypot(a.std_error, b.std_error)) {
                    ++drift_violations;
                }
            }
        }
        const double y0 = gcalc::sublinear_expectation(y0s).value;
        const double oracle = gcalc::sublinear_expectation(terminal_sq).value;
        const double rel = std::abs(y0 - oracle) / oracle;
        pass = pass && rel <= 0.05 && drift_violations == 0;
        detail += fmt::format("{}{}: Y0 = {:.4f}, forward E^[K_T^2] = {:.4f} (rel. diff {:.2e}), "
                              "zero-drift violations {}",
                              detail.empty() ? "" : "; ", econ::to_string(mode), y0, oracle, rel,
                              drift_violations);
    }
    return {pass, detail};
}

Outcome default_configuration_y0()
{
    const auto dir = scratch("reproduce");
    const auto t0 = std::chrono::steady_clock::now();
    std::string out;
    const int code = run_cli({"reproduce", "--out", dir.string()}, &out);
    const double elapsed = seconds_since(t0);
    if (code != 0) return {false, fmt::format("reproduce exited with {}", code)};
    const auto m = json::parse(slurp(dir / cli::manifest_name));
    const double y0 = m["results"]["y0"].get<double>();
    const double se = m["results"]["y0_std_error"].get<double>();
    const double lo = 3.9281 * 0.8, hi = 3.9281 * 1.2;
    std::vector<std::string> required{"loading", "mode", "degree", "dt", "n_paths", "seed"};
    std::size_t listed = 0;
    for (const auto& key : required) {
        for (const auto& d : m["unstated_defaults"]) listed += d["key"] == key;
    }
    const bool manifest_ok = listed == required.size();
    const bool pass = y0 >= lo && y0 <= hi && elapsed <= 120.0 && manifest_ok;
    return {pass, fmt::format("Y0 = {:.4f} (se {:.4f}), band [{:.4f}, {:.4f}]; runtime {:.1f} s (limit 120 s); "
                              "manifest lists substituted defaults: {}",
                              y0, se, lo, hi, elapsed, manifest_ok ? "yes" : "no")};
}

Outcome chattering_convergence()
{
    const auto grid = sdde::TimeGrid::make(1.0 / 32, 1.0, 1.0 / 1024);
    sdde::DelayModel model;
    model.drift = [](double, double, double, double u, double) { return u; };
    model.diffusion = [](double, double, double) { return 1.0; };
    model.tau = grid.tau();
    model.history = [](double) { return 0.0; };
    const relaxed::CostSpec cost{[](double, double, double, double u, double) { return u * u; },
                                 [](double x) { return x * x; }};
    const relaxed::ActionGrid actions({-1.0, 1.0});
    const auto mu = relaxed::RelaxedControl::constant(actions, {0.3, 0.7}, grid.steps());
    const auto scenarios = gcalc::extreme_scenarios(gcalc::VolatilityBand(0.75, 1.25));
    const std::vector<unsigned> levels{1, 2, 3, 4, 5};
    const auto rows = relaxed::chattering_study(mu, model, cost, grid, scenarios, 4000, 2024, levels);

    bool monotone = true;
    std::string gaps;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        gaps += fmt::format("{}{:.4f}", i ? ", " : "", rows[i].gap);
        if (i > 0 && rows[i].gap > rows[i - 1].gap + 2.0 * std::hypot(rows[i].se_gap, rows[i - 1].se_gap)) {
            monotone = false;
        }
    }
    const auto strict = relaxed::chattering_approximate(mu, 3);
    const auto j_strict = relaxed::cost(strict, model, cost, grid, scenarios, 4000, 2024);
    const auto j_embedded =
        relaxed::cost(relaxed::embed_strict(strict, actions), model, cost, grid, scenarios, 4000, 2024);
    const bool identity = j_strict.value == j_embedded.value;
    return {monotone && identity,
            fmt::format("gaps by level 1..5: [{}], J(mu) = {:.4f}; embedding identity {} ({:.12f} vs {:.12f})",
                        gaps, rows.front().j_relaxed, identity ? "exact" : "broken", j_strict.value,
                        j_embedded.value)};
}

Outcome isometry()
{
    const gcalc::VolatilityBand band(0.75, 1.25);
    const std::size_t steps = 20, n_paths = 100000;
    const double dt = 0.05;
    std::vector<std::vector<double>> integrands(3, std::vector<double>(steps));
    for (std::size_t n = 0; n < steps; ++n) {
        integrands[0][n] = 1.0;
        integrands[1][n] = n < 10 ? 2.0 : -0.5;
        integrands[2][n] = n % 4 < 2 ? 1.5 : 0.25;
    }
    const auto table = std::make_shared<const gcalc::GNormalTable>(gcalc::build_gnormal_table(band));
    const std::vector<gcalc::NoiseSource> sources{
        gcalc::NoiseSource(gcalc::ScenarioPolicy::constant(band, 0.75)),
        gcalc::NoiseSource(gcalc::ScenarioPolicy::constant(band, 1.25)),
        gcalc::NoiseSource(gcalc::ScenarioPolicy::two_point(band)), gcalc::NoiseSource(table)};
    bool pass = true;
    double worst = 0.0;
    std::size_t checks = 0;
    for (std::size_t i = 0; i < integrands.size(); ++i) {
        const auto& eta = integrands[i];
        double bound = 0.0;
        for (double e : eta) bound += 1.5625 * e * e * dt;
        for (const auto& src : sources) {
            std::vector<double> lhs(n_paths), diff(n_paths);
            for (std::size_t p = 0; p < n_paths; ++p) {
                const auto inc = src.draw(steps, dt, gcalc::derive_seed(1000 + i, p));
                double ito = 0.0, qv = 0.0;
                for (std::size_t n = 0; n < steps; ++n) {
                    ito += eta[n] * inc.db[n];
                    qv += eta[n] * eta[n] * inc.dqv[n];
                }
                lhs[p] = ito * ito;
                diff[p] = ito * ito - qv;
            }
            const auto d = gcalc::summarize(diff);
            const auto l = gcalc::summarize(lhs);
            worst = std::max(worst, std::abs(d.mean) / d.std_error);
            pass = pass && std::abs(d.mean) <= 3.0 * d.std_error && l.mean <= bound + 3.0 * l.std_error;
            ++checks;
        }
    }
    return {pass, fmt::format("{} integrand/scenario pairs at {} paths; largest |E[(int eta dB)^2 - int eta^2 d<B>]| = {:.2f} SE",
                              checks, n_paths, worst)};
}

Outcome determinism()
{
    struct Case {
        std::string command;
        std::vector<std::string> extra;
        std::vector<std::string> files;
    };
    const std::vector<Case> cases{
        {"gtable", {}, {cli::table_name}},
        {"forward", {"--paths", "2000", "--seed", "11"}, {cli::forward_name}},
        {"forward", {"--paths", "500", "--seed", "11", "--mode", "scenario_sup"}, {"forward_paths_0.csv", "forward_paths_1.csv"}},
        {"solve", {"--paths", "2000", "--seed", "11", "--workers", "2"}, {cli::forward_name, cli::backward_name}},
        {"chatter", {"--paths", "500", "--seed", "11"}, {cli::chatter_name}},
        {"reproduce", {}, {econ::fig1_name, econ::fig2_name, econ::fig3_name, econ::fig4_name}}};
    std::size_t compared = 0;
    std::string mismatch;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        std::vector<fs::path> dirs{scratch(fmt::format("det_{}_a", i)), scratch(fmt::format("det_{}_b", i))};
        for (const auto& d : dirs) {
            std::vector<std::string> args{c.command};
            args.insert(args.end(), c.extra.begin(), c.extra.end());
            args.insert(args.end(), {"--out", d.string()});
            if (run_cli(args) != 0) return {false, fmt::format("{} failed", c.command)};
        }
        for (const auto& f : c.files) {
            const auto a = slurp(dirs[0] / f), b = slurp(dirs[1] / f);
            if (a.empty() || a != b) mismatch += fmt::format(" {}:{}", c.command, f);
            ++compared;
        }
    }
    return {mismatch.empty(), mismatch.empty()
                                  ? fmt::format("{} CSV files byte-identical across reruns of all commands", compared)
                                  : "differences in" + mismatch};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"degenerate-band reduction", degenerate_band_reduction},
        {"convex/concave moment bracketing", moment_bracketing},
        {"deterministic delay convergence", delay_convergence},
        {"zero-driver consistency", zero_driver_consistency},
        {"default-configuration Y0 (soft target)", default_configuration_y0},
        {"chattering convergence", chattering_convergence},
        {"isometry property", isometry},
        {"determinism", determinism}};
    std::vector<std::size_t> which;
    if (argc > 1) {
        const int k = std::atoi(argv[1]);
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::cerr << "usage: acceptance [1-" << criteria.size() << "]\n";
            return 1;
        }
        which.push_back(static_cast<std::size_t>(k - 1));
    } else {
        for (std::size_t i = 0; i < criteria.size(); ++i) which.push_back(i);
    }
    int failures = 0;
    for (std::size_t i : which) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << fmt::format("criterion {} {}: {}: {}\n", i + 1, o.pass ? "PASS" : "FAIL",
                                 criteria[i].first, o.detail);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
