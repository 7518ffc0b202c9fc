#include "gsdde/econ/econ.hpp"

#include "gsdde/error.hpp"
#include "gsdde/gcalc/noise.hpp"
#include "gsdde/gcalc/sublinear.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>

namespace gsdde::econ {

std::string to_string(Mode m)
{
    return m == Mode::gnormal ? "gnormal" : "scenario_sup";
}

Mode mode_from_string(const std::string& name)
{
    if (name == "gnormal") return Mode::gnormal;
    if (name == "scenario_sup") return Mode::scenario_sup;
    throw ConfigError(fmt::format("unknown mode '{}' (expected gnormal or scenario_sup)", name));
}

void EconConfig::validate() const
{
    (void)band();
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    (void)sdde::TimeGrid::make(tau, horizon, dt);
    if (!history_constant && !(history.lo <= history.hi)) {
        throw ConfigError("history interval needs lo <= hi");
    }
    if (n_paths == 0) throw ConfigError("n_paths must be positive");
    const std::size_t basis = (degree + 1u) * (degree + 2u) / 2u;
    if (n_paths < basis) {
        throw ConfigError(fmt::format("n_paths = {} is below the basis size {}", n_paths, basis));
    }
    if (!(sigma_floor > 0.0)) throw ConfigError("sigma_floor must be positive");
    if (!std::isfinite(sigma_scale) || !std::isfinite(growth) || !std::isfinite(alpha) ||
        !std::isfinite(loading)) {
        throw ConfigError("model coefficients must be finite");
    }
}

sdde::DelayModel make_model(const EconConfig& cfg)
{
    sdde::DelayModel m;
    const double growth = cfg.growth;
    const double scale = cfg.sigma_scale;
    m.drift = [growth](double, double, double xd, double, double) { return growth * xd; };
    m.diffusion = [scale](double, double, double xd) { return scale * xd; };
    m.tau = cfg.tau;
    const double h = cfg.history_constant.value_or(0.5 * (cfg.history.lo + cfg.history.hi));
    m.history = [h](double) { return h; };
    return m;
}

fbsdde::BsdeSpec make_spec(const EconConfig& cfg)
{
    fbsdde::BsdeSpec spec;
    spec.alpha = cfg.alpha;
    spec.terminal = fbsdde::quadratic_terminal(cfg.alpha);
    const double c = cfg.loading;
    if (c != 0.0) spec.loading = [c](double) { return c; };
    const double scale = cfg.sigma_scale;
    const double floor = cfg.sigma_floor;
    spec.sigma = [scale](double k) { return scale * k; };
    spec.sigma_inv = [scale, floor](double k) {
        if (scale == 0.0) return 0.0;
        const double mag = std::max(std::abs(k), floor);
        return (k < 0.0 ? -1.0 : 1.0) / (scale * mag);
    };
    return spec;
}

std::optional<sdde::RandomHistory> history_rule(const EconConfig& cfg)
{
    if (cfg.history_constant) return std::nullopt;
    return cfg.history;
}

fbsdde::BackwardOptions backward_options(const EconConfig& cfg)
{
    fbsdde::BackwardOptions o;
    o.sign = cfg.driver_sign;
    o.weighting = cfg.weighting;
    o.sigma_scaled_z = cfg.sigma_scaled_z && cfg.sigma_scale != 0.0;
    o.control_variate = cfg.control_variate;
    return o;
}

std::shared_ptr<const gcalc::GNormalTable> make_table(const EconConfig& cfg)
{
    const auto band = cfg.band();
    return std::make_shared<const gcalc::GNormalTable>(gcalc::build_gnormal_table(
        band, gcalc::HeatGrid::for_band(band, cfg.table_width, cfg.table_intervals), cfg.capacity));
}

std::vector<sdde::PathEnsemble> forward(const EconConfig& cfg,
                                        std::shared_ptr<const gcalc::GNormalTable> table)
{
    cfg.validate();
    const auto grid = sdde::TimeGrid::make(cfg.tau, cfg.horizon, cfg.dt);
    const auto model = make_model(cfg);
    sdde::EnsembleOptions opts;
    opts.random_history = history_rule(cfg);
    opts.workers = cfg.workers;
    const auto control = sdde::constant_control(0.0);

    std::vector<sdde::PathEnsemble> out;
    if (cfg.mode == Mode::gnormal) {
        if (!table) table = make_table(cfg);
        out.push_back(sdde::ensemble(model, control, grid, cfg.n_paths, gcalc::NoiseSource(table),
                                     cfg.seed, opts));
    } else {
        for (auto& policy : gcalc::extreme_scenarios(cfg.band())) {
            out.push_back(sdde::ensemble(model, control, grid, cfg.n_paths,
                                         gcalc::NoiseSource(std::move(policy)), cfg.seed, opts));
        }
    }
    return out;
}

EconReport run_scenario(const EconConfig& cfg)
{
    cfg.validate();
    EconReport r;
    r.mode = cfg.mode;
    r.table = make_table(cfg);
    r.ensembles = forward(cfg, r.table);

    const auto spec = make_spec(cfg);
    const auto basis = fbsdde::RegressionBasis::polynomial(cfg.degree);
    const auto opts = backward_options(cfg);

    std::vector<gcalc::ScenarioEstimate> estimates;
    for (const auto& ens : r.ensembles) {
        const std::size_t n_tau = ens.grid.delay_steps();
        for (const auto& path : ens.paths) {
            for (std::size_t k = 0; k < ens.grid.steps(); ++k) {
                if (std::abs(path.states[k]) < cfg.sigma_floor) ++r.clamp_count;
            }
            for (std::size_t node = n_tau; node < path.states.size(); ++node) {
                if (path.states[node] <= 0.0) ++r.nonpositive_nodes;
                ++r.forward_nodes;
            }
        }
        r.solutions.push_back(fbsdde::backward_solve(ens, spec, basis, opts));
        r.regression_fallbacks += r.solutions.back().fallbacks;
        r.labels.push_back(ens.noise_label);
        r.scenario_y0.push_back(r.solutions.back().y0);
        estimates.push_back({ens.noise_label, r.solutions.back().y0,
                             r.solutions.back().y0_std_error});
    }
    if (cfg.loading == 0.0 || cfg.sigma_scale == 0.0) r.clamp_count = 0;
    const auto sup = gcalc::sublinear_expectation(estimates);
    r.y0 = sup.value;
    r.y0_std_error = sup.std_error;
    r.argmax = sup.argmax;
    r.accepted = r.clamp_count == 0 && std::isfinite(r.y0);
    return r;
}

namespace {

double normal_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

std::ofstream open_out(const std::filesystem::path& p)
{
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError(fmt::format("cannot write {}", p.string()));
    return os;
}

}  // namespace

void write_density_csv(std::ostream& os, const gcalc::GNormalTable& table)
{
    os << "x,pdf,normal_pdf\n";
    for (std::size_t j = 0; j < table.x.size(); ++j) {
        os << fmt::format("{:.10e},{:.10e},{:.10e}\n", table.x[j], table.pdf[j],
                          normal_pdf(table.x[j]));
    }
}

void write_cdf_csv(std::ostream& os, const gcalc::GNormalTable& table)
{
    os << "x,cdf,normal_cdf\n";
    for (std::size_t j = 0; j < table.x.size(); ++j) {
        os << fmt::format("{:.10e},{:.10e},{:.10e}\n", table.x[j], table.cdf[j],
                          normal_cdf(table.x[j]));
    }
}

std::vector<std::filesystem::path> write_figures(const EconReport& report, const EconConfig& cfg,
                                                 const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files{dir / fig1_name, dir / fig2_name, dir / fig3_name,
                                             dir / fig4_name};
    {
        auto os = open_out(files[0]);
        write_density_csv(os, *report.table);
    }
    {
        auto os = open_out(files[1]);
        write_cdf_csv(os, *report.table);
    }
    const auto& ens = report.ensembles.at(report.argmax);
    {
        auto os = open_out(files[2]);
        sdde::write_csv(os, ens, cfg.csv_paths);
    }
    {
        auto os = open_out(files[3]);
        fbsdde::write_csv(os, report.solutions.at(report.argmax), ens, make_spec(cfg),
                          cfg.csv_paths);
    }
    return files;
}

}  // namespace gsdde::econ
