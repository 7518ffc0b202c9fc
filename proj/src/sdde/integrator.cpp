#include "gsdde/sdde/delay_model.hpp"

#include "gsdde/error.hpp"

#include <cmath>
#include <fmt/format.h>

namespace gsdde::sdde {

StrictControl constant_control(double action)
{
    return [action](std::size_t, double) { return ControlValue{action, action}; };
}

StrictControl StrictSequence::as_control(std::size_t delay_steps) const
{
    return [seq = *this, delay_steps](std::size_t step, double) {
        const double u = seq.actions.at(step);
        const double ud = step >= delay_steps ? seq.actions[step - delay_steps] : seq.history_action;
        return ControlValue{u, ud};
    };
}

std::vector<double> sample_history(const DelayModel& model, const TimeGrid& grid)
{
    if (!model.history) throw ConfigError("delay model has no history function");
    std::vector<double> values(grid.delay_steps() + 1);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = model.history(grid.time(i));
    return values;
}

namespace {

void check_inputs(const DelayModel& model, const TimeGrid& grid,
                  const gcalc::NoiseIncrements& noise, std::span<const double> history)
{
    if (std::abs(model.tau - grid.tau()) > 1e-9 * std::max(1.0, model.tau)) {
        throw ConfigError(fmt::format("model delay {} does not match grid delay {}", model.tau,
                                      grid.tau()));
    }
    if (noise.db.size() != grid.steps() || noise.dqv.size() != grid.steps()) {
        throw ConfigError(fmt::format("noise has {} increments, grid has {} steps", noise.db.size(),
                                      grid.steps()));
    }
    if (history.size() != grid.delay_steps() + 1) {
        throw ConfigError(fmt::format("history has {} values, expected {}", history.size(),
                                      grid.delay_steps() + 1));
    }
    for (double h : history) {
        if (!std::isfinite(h)) throw NumericalError("history contains a non-finite value");
    }
}

// Shared Euler loop; `coefficients(k, t, x, xd)` returns {b, gamma} for step k.
template <class Coefficients>
DelayPath euler(const DelayModel& model, const TimeGrid& grid, const gcalc::NoiseIncrements& noise,
                std::span<const double> history, Coefficients&& coefficients)
{
    check_inputs(model, grid, noise, history);
    DelayPath path;
    path.times.resize(grid.nodes());
    path.states.resize(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i) path.times[i] = grid.time(i);
    std::copy(history.begin(), history.end(), path.states.begin());

    const std::size_t n_tau = grid.delay_steps();
    const double dt = grid.dt();
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const std::size_t node = n_tau + k;
        const double t = path.times[node];
        const double x = path.states[node];
        const double xd = path.states[node - n_tau];
        const auto [b, gamma] = coefficients(k, t, x, xd);
        const double sigma = model.diffusion ? model.diffusion(t, x, xd) : 0.0;
        if (!std::isfinite(b) || !std::isfinite(gamma) || !std::isfinite(sigma)) {
            throw NumericalError(fmt::format(
                "non-finite coefficient at step {} (t = {}): b = {}, gamma = {}, sigma = {}", k, t,
                b, gamma, sigma));
        }
        const double next = x + b * dt + gamma * noise.dqv[k] + sigma * noise.db[k];
        if (!std::isfinite(next)) {
            throw NumericalError(fmt::format("non-finite state at step {} (t = {})", k, t));
        }
        path.states[node + 1] = next;
    }
    path.noise = noise;
    return path;
}

struct DriftPair {
    double b;
    double gamma;
};

}  // namespace

DelayPath integrate_strict(const DelayModel& model, const StrictControl& control,
                           const TimeGrid& grid, const gcalc::NoiseIncrements& noise,
                           std::span<const double> history_values)
{
    if (!control) throw ConfigError("strict control is empty");
    return euler(model, grid, noise, history_values,
                 [&](std::size_t k, double t, double x, double xd) {
                     const auto c = control(k, t);
                     const double b = model.drift ? model.drift(t, x, xd, c.u, c.u_delay) : 0.0;
                     const double g =
                         model.qv_loading ? model.qv_loading(t, x, xd, c.u, c.u_delay) : 0.0;
                     return DriftPair{b, g};
                 });
}

DelayPath integrate_strict(const DelayModel& model, const StrictControl& control,
                           const TimeGrid& grid, const gcalc::NoiseIncrements& noise)
{
    const auto history = sample_history(model, grid);
    return integrate_strict(model, control, grid, noise, history);
}

DelayPath integrate_relaxed(const DelayModel& model, const relaxed::RelaxedControl& control,
                            const TimeGrid& grid, const gcalc::NoiseIncrements& noise,
                            std::span<const double> history_values)
{
    if (control.steps() < grid.steps()) {
        throw ConfigError(fmt::format("relaxed control covers {} steps, grid has {}",
                                      control.steps(), grid.steps()));
    }
    const auto& actions = control.grid();
    const std::size_t n_tau = grid.delay_steps();
    return euler(model, grid, noise, history_values,
                 [&](std::size_t k, double t, double x, double xd) {
                     const auto now = control.weights(k);
                     const auto past = control.delayed_weights(k, n_tau);
                     double b = 0.0;
                     double g = 0.0;
                     for (std::size_t i = 0; i < actions.size(); ++i) {
                         if (now[i] == 0.0) continue;
                         for (std::size_t j = 0; j < actions.size(); ++j) {
                             if (past[j] == 0.0) continue;
                             const double w = now[i] * past[j];
                             if (model.drift) b += w * model.drift(t, x, xd, actions[i], actions[j]);
                             if (model.qv_loading)
                                 g += w * model.qv_loading(t, x, xd, actions[i], actions[j]);
                         }
                     }
                     return DriftPair{b, g};
                 });
}

DelayPath integrate_relaxed(const DelayModel& model, const relaxed::RelaxedControl& control,
                            const TimeGrid& grid, const gcalc::NoiseIncrements& noise)
{
    const auto history = sample_history(model, grid);
    return integrate_relaxed(model, control, grid, noise, history);
}

}  // namespace gsdde::sdde
