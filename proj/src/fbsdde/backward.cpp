#include "gsdde/fbsdde/backward.hpp"

#include "gsdde/error.hpp"
#include "gsdde/gcalc/sublinear.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <ostream>
#include <string_view>

namespace gsdde::fbsdde {

std::function<double(double)> quadratic_terminal(double alpha)
{
    return [alpha](double x) { return (x - alpha) * (x - alpha); };
}

std::string to_string(DriverSign s)
{
    return s == DriverSign::hjb ? "hjb" : "scheme";
}

DriverSign driver_sign_from_string(const std::string& name)
{
    if (name == "hjb") return DriverSign::hjb;
    if (name == "scheme") return DriverSign::scheme;
    throw ConfigError(fmt::format("unknown driver sign '{}'", name));
}

std::vector<double> estimate_z(std::span<const double> y_next, std::span<const double> db,
                               std::span<const double> dqv, const Eigen::MatrixXd& design,
                               std::span<const double> weights, const RegressionOptions& options,
                               std::span<const double> baseline)
{
    const std::size_t n = y_next.size();
    if (db.size() != n || dqv.size() != n || static_cast<std::size_t>(design.rows()) != n ||
        (!baseline.empty() && baseline.size() != n)) {
        throw ConfigError("estimate_z: inputs differ in length");
    }
    const double mean_qv = std::accumulate(dqv.begin(), dqv.end(), 0.0) / static_cast<double>(n);
    if (!(mean_qv > 0.0)) throw NumericalError("estimate_z: increments carry no quadratic variation");

    std::vector<double> targets(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double centred = baseline.empty() ? y_next[p] : y_next[p] - baseline[p];
        targets[p] = centred * db[p] / mean_qv;
    }
    const auto model = regress(targets, design, weights, options);
    const Eigen::VectorXd fit = model.predict(design);
    return {fit.data(), fit.data() + fit.size()};
}

BackwardSolution backward_solve(const sdde::PathEnsemble& ensemble, const BsdeSpec& spec,
                                const RegressionBasis& basis, const BackwardOptions& options)
{
    if (!spec.terminal) throw ConfigError("backward_solve: terminal condition missing");
    const auto& grid = ensemble.grid;
    const std::size_t n_paths = ensemble.size();
    const std::size_t steps = grid.steps();
    const std::size_t n_tau = grid.delay_steps();
    const double dt = grid.dt();
    if (n_paths < basis.size()) {
        throw ConfigError(fmt::format("backward_solve: {} paths for {} basis functions", n_paths,
                                      basis.size()));
    }
    if (options.sigma_scaled_z && !spec.sigma) {
        throw ConfigError("backward_solve: sigma-scaled Z basis needs sigma");
    }
    const bool has_driver = static_cast<bool>(spec.loading);
    if (has_driver && !spec.sigma_inv) throw ConfigError("backward_solve: driver needs sigma_inv");
    const double sign = options.sign == DriverSign::hjb ? -1.0 : 1.0;

    BackwardSolution sol;
    sol.y.assign(steps + 1, std::vector<double>(n_paths));
    sol.z.assign(steps, std::vector<double>(n_paths));
    sol.models.resize(steps);

    const auto terminal_states = ensemble.column(grid.last_node());
    for (std::size_t p = 0; p < n_paths; ++p) sol.y[steps][p] = spec.terminal(terminal_states[p]);

    std::vector<double> db(n_paths), dqv(n_paths), targets(n_paths);
    for (std::size_t k = steps; k-- > 0;) {
        try {
            const std::size_t node = n_tau + k;
            const auto x = ensemble.column(node);
            const auto xd = ensemble.column(node - n_tau);
            for (std::size_t p = 0; p < n_paths; ++p) {
                db[p] = ensemble.paths[p].noise.db[k];
                dqv[p] = ensemble.paths[p].noise.dqv[k];
            }
            const Eigen::MatrixXd design = basis.design(x, xd);
            const auto weights = regression_weights(options.weighting, x, xd);
            const auto& y_next = sol.y[k + 1];

            std::vector<double> baseline;
            if (options.control_variate) {
                const auto mean_model = regress(y_next, design, weights, options.regression);
                const Eigen::VectorXd fit = mean_model.predict(design);
                baseline.assign(fit.data(), fit.data() + fit.size());
            }
            Eigen::MatrixXd z_design = design;
            if (options.sigma_scaled_z) {
                for (std::size_t p = 0; p < n_paths; ++p) {
                    z_design.row(static_cast<Eigen::Index>(p)) *= spec.sigma(xd[p]);
                }
            }
            auto& z = sol.z[k];
            z = estimate_z(y_next, db, dqv, z_design, weights, options.regression, baseline);

            const double t = grid.time(node);
            const double c = has_driver ? spec.loading(t) : 0.0;
            for (std::size_t p = 0; p < n_paths; ++p) {
                double drive = 0.0;
                if (c != 0.0) {
                    const double g = c * z[p] * spec.sigma_inv(xd[p]);
                    drive = sign * 0.5 * g * g * dt;
                }
                targets[p] = y_next[p] + drive;
            }
            sol.models[k] = regress(targets, design, weights, options.regression);
            if (sol.models[k].regularized_fallback) ++sol.fallbacks;
            const Eigen::VectorXd fit = sol.models[k].predict(design);
            for (std::size_t p = 0; p < n_paths; ++p) {
                sol.y[k][p] = fit[static_cast<Eigen::Index>(p)];
                if (!std::isfinite(sol.y[k][p]) || !std::isfinite(z[p])) {
                    throw NumericalError(
                        fmt::format("backward_solve: non-finite value at step {} (t = {:.6f}), path {}",
                                    k, t, p));
                }
            }
            if (k == 0) {
                const auto est = gcalc::summarize(targets);
                sol.y0_std_error = est.std_error;
            }
        } catch (const NumericalError& e) {
            if (std::string_view(e.what()).starts_with("backward_solve")) throw;
            throw NumericalError(fmt::format("backward_solve: step {} (t = {:.6f}): {}", k,
                                             grid.time(n_tau + k), e.what()));
        }
    }
    sol.y0 = std::accumulate(sol.y[0].begin(), sol.y[0].end(), 0.0) / static_cast<double>(n_paths);
    if (steps == 0) sol.y0_std_error = gcalc::summarize(sol.y[0]).std_error;
    return sol;
}

SupSolution backward_solve_sup(std::span<const sdde::PathEnsemble> ensembles, const BsdeSpec& spec,
                               const RegressionBasis& basis, const BackwardOptions& options)
{
    if (ensembles.empty()) throw ConfigError("backward_solve_sup: no scenario ensembles");
    SupSolution out;
    std::vector<gcalc::ScenarioEstimate> estimates;
    for (const auto& ens : ensembles) {
        out.per_scenario.push_back(backward_solve(ens, spec, basis, options));
        out.labels.push_back(ens.noise_label);
        estimates.push_back({ens.noise_label, out.per_scenario.back().y0,
                             out.per_scenario.back().y0_std_error});
    }
    const auto sup = gcalc::sublinear_expectation(estimates);
    out.y0 = sup.value;
    out.y0_std_error = sup.std_error;
    out.argmax = sup.argmax;
    return out;
}

std::vector<std::vector<double>> optimal_control(const BackwardSolution& solution,
                                                 const sdde::PathEnsemble& ensemble,
                                                 const BsdeSpec& spec)
{
    const auto& grid = ensemble.grid;
    const std::size_t n_tau = grid.delay_steps();
    std::vector<std::vector<double>> u(solution.z.size());
    for (std::size_t k = 0; k < solution.z.size(); ++k) {
        const double c = spec.loading ? spec.loading(grid.time(n_tau + k)) : 0.0;
        u[k].resize(solution.z[k].size());
        for (std::size_t p = 0; p < u[k].size(); ++p) {
            if (c == 0.0) continue;
            const double s_inv = spec.sigma_inv(ensemble.paths[p].states[k]);
            if (!std::isfinite(s_inv)) {
                throw NumericalError(
                    fmt::format("optimal_control: non-finite sigma_inv at step {}, path {}", k, p));
            }
            u[k][p] = c * solution.z[k][p] * s_inv;
        }
    }
    return u;
}

void write_csv(std::ostream& os, const BackwardSolution& solution,
               const sdde::PathEnsemble& ensemble, const BsdeSpec& spec, std::size_t max_paths)
{
    const auto u = optimal_control(solution, ensemble, spec);
    const auto& grid = ensemble.grid;
    const std::size_t n_tau = grid.delay_steps();
    const std::size_t n = max_paths == 0 ? ensemble.size() : std::min(max_paths, ensemble.size());
    os << "path_id,t,Y,Z,u_star\n";
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t k = 0; k < solution.y.size(); ++k) {
            const double t = grid.time(n_tau + k);
            if (k < solution.z.size()) {
                os << fmt::format("{},{:.6f},{:.10e},{:.10e},{:.10e}\n", p, t, solution.y[k][p],
                                  solution.z[k][p], u[k][p]);
            } else {
                os << fmt::format("{},{:.6f},{:.10e},,\n", p, t, solution.y[k][p]);
            }
        }
    }
}

}  // namespace gsdde::fbsdde
