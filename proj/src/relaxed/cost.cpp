#include "gsdde/relaxed/cost.hpp"

#include "gsdde/error.hpp"
#include "gsdde/relaxed/chattering.hpp"
#include "gsdde/sdde/ensemble.hpp"

#include <cmath>
#include <fmt/format.h>
#include <ostream>

namespace gsdde::relaxed {

namespace {

double running_cost_strict(const CostSpec& cost, const sdde::DelayPath& path,
                           const sdde::StrictControl& control, const sdde::TimeGrid& grid)
{
    if (!cost.running) return 0.0;
    const std::size_t n_tau = grid.delay_steps();
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const std::size_t node = n_tau + k;
        const double t = path.times[node];
        const auto c = control(k, t);
        sum += cost.running(t, path.states[node], path.states[node - n_tau], c.u, c.u_delay);
    }
    return sum * grid.dt();
}

double running_cost_relaxed(const CostSpec& cost, const sdde::DelayPath& path,
                            const RelaxedControl& mu, const sdde::TimeGrid& grid)
{
    if (!cost.running) return 0.0;
    const std::size_t n_tau = grid.delay_steps();
    const auto& actions = mu.grid();
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const std::size_t node = n_tau + k;
        const double t = path.times[node];
        const auto now = mu.weights(k);
        const auto past = mu.delayed_weights(k, n_tau);
        for (std::size_t i = 0; i < actions.size(); ++i) {
            if (now[i] == 0.0) continue;
            for (std::size_t j = 0; j < actions.size(); ++j) {
                if (past[j] == 0.0) continue;
                sum += now[i] * past[j] *
                       cost.running(t, path.states[node], path.states[node - n_tau], actions[i],
                                    actions[j]);
            }
        }
    }
    return sum * grid.dt();
}

}  // namespace

CostSamples cost_samples(const ControlSpec& control, const sdde::DelayModel& model,
                         const CostSpec& cost, const sdde::TimeGrid& grid,
                         std::span<const gcalc::ScenarioPolicy> scenarios, std::size_t n_paths,
                         std::uint64_t seed, unsigned workers)
{
    if (scenarios.empty()) throw ConfigError("cost evaluation needs at least one scenario");
    if (n_paths == 0) throw ConfigError("cost evaluation needs at least one path");
    const auto history = sdde::sample_history(model, grid);

    sdde::StrictControl strict;
    if (const auto* f = std::get_if<sdde::StrictControl>(&control)) strict = *f;
    if (const auto* s = std::get_if<sdde::StrictSequence>(&control)) {
        if (s->actions.size() < grid.steps()) {
            throw ConfigError(fmt::format("strict sequence covers {} steps, grid has {}",
                                          s->actions.size(), grid.steps()));
        }
        strict = s->as_control(grid.delay_steps());
    }
    const auto* mu = std::get_if<RelaxedControl>(&control);

    CostSamples out;
    for (const auto& policy : scenarios) {
        out.labels.push_back(policy.label());
        std::vector<double> values(n_paths);
        sdde::parallel_for(n_paths, workers, [&](std::size_t p) {
            const auto noise = gcalc::sample_increments_scenario(
                policy, grid.steps(), grid.dt(), sdde::path_noise_seed(seed, p));
            if (mu) {
                const auto path = sdde::integrate_relaxed(model, *mu, grid, noise, history);
                values[p] = running_cost_relaxed(cost, path, *mu, grid);
                if (cost.terminal) values[p] += cost.terminal(path.states.back());
            } else {
                const auto path = sdde::integrate_strict(model, strict, grid, noise, history);
                values[p] = running_cost_strict(cost, path, strict, grid);
                if (cost.terminal) values[p] += cost.terminal(path.states.back());
            }
            if (!std::isfinite(values[p])) {
                throw NumericalError(fmt::format("non-finite cost on path {}", p));
            }
        });
        out.per_scenario.push_back(std::move(values));
    }
    return out;
}

CostEstimate summarize(const CostSamples& samples)
{
    CostEstimate est;
    for (std::size_t s = 0; s < samples.per_scenario.size(); ++s) {
        est.per_scenario.push_back(gcalc::summarize(samples.per_scenario[s], samples.labels[s]));
    }
    const auto sup = gcalc::sublinear_expectation(est.per_scenario);
    est.value = sup.value;
    est.std_error = sup.std_error;
    est.argmax = sup.argmax;
    return est;
}

CostEstimate cost(const ControlSpec& control, const sdde::DelayModel& model, const CostSpec& cost,
                  const sdde::TimeGrid& grid, std::span<const gcalc::ScenarioPolicy> scenarios,
                  std::size_t n_paths, std::uint64_t seed, unsigned workers)
{
    return summarize(cost_samples(control, model, cost, grid, scenarios, n_paths, seed, workers));
}

std::vector<ChatteringRow> chattering_study(const RelaxedControl& mu, const sdde::DelayModel& model,
                                            const CostSpec& cost, const sdde::TimeGrid& grid,
                                            std::span<const gcalc::ScenarioPolicy> scenarios,
                                            std::size_t n_paths, std::uint64_t seed,
                                            std::span<const unsigned> levels, unsigned workers)
{
    const auto relaxed_samples =
        cost_samples(mu, model, cost, grid, scenarios, n_paths, seed, workers);
    const auto relaxed_est = summarize(relaxed_samples);

    std::vector<ChatteringRow> rows;
    for (unsigned level : levels) {
        const auto strict = chattering_approximate(mu, level);
        const auto strict_samples =
            cost_samples(strict, model, cost, grid, scenarios, n_paths, seed, workers);
        const auto strict_est = summarize(strict_samples);
        double se_gap = 0.0;
        for (std::size_t s = 0; s < scenarios.size(); ++s) {
            std::vector<double> diff(n_paths);
            for (std::size_t p = 0; p < n_paths; ++p) {
                diff[p] = strict_samples.per_scenario[s][p] - relaxed_samples.per_scenario[s][p];
            }
            se_gap = std::max(se_gap, gcalc::summarize(diff).std_error);
        }
        rows.push_back({level, strict_est.value, relaxed_est.value,
                        std::abs(strict_est.value - relaxed_est.value), strict_est.std_error,
                        relaxed_est.std_error, se_gap});
    }
    return rows;
}

void write_csv(std::ostream& os, std::span<const ChatteringRow> rows)
{
    os << "level,j_strict,j_relaxed,gap,se_strict,se_relaxed,se_gap\n";
    for (const auto& r : rows) {
        os << fmt::format("{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}\n", r.level,
                          r.j_strict, r.j_relaxed, r.gap, r.se_strict, r.se_relaxed, r.se_gap);
    }
}

}  // namespace gsdde::relaxed
