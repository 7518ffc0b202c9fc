#pragma once

#include "gsdde/gcalc/noise.hpp"
#include "gsdde/relaxed/relaxed_control.hpp"
#include "gsdde/sdde/time_grid.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gsdde::sdde {

/// (t, x, x_delay, u, u_delay) -> value
using ControlledCoefficient =
    std::function<double(double t, double x, double x_delay, double u, double u_delay)>;
/// (t, x, x_delay) -> value
using StateCoefficient = std::function<double(double t, double x, double x_delay)>;

/// dX = b dt + gamma d<B> + sigma dB on [0, T], X = history on [-tau, 0].
/// An empty coefficient is treated as identically zero. Growth and Lipschitz
/// conditions are the caller's business; the integrator only checks finiteness.
struct DelayModel {
    ControlledCoefficient drift;
    ControlledCoefficient qv_loading;
    StateCoefficient diffusion;
    double tau = 0.0;
    std::function<double(double theta)> history;
};

struct ControlValue {
    double u = 0.0;
    double u_delay = 0.0;
};

/// Strict control evaluated at forward step k (node n_tau + k, time t_k).
using StrictControl = std::function<ControlValue(std::size_t step, double t)>;

StrictControl constant_control(double action);

/// Piecewise-constant strict control given by one action per forward step. The
/// delayed action reads the same sequence `delay_steps` earlier, or
/// `history_action` before t = 0.
struct StrictSequence {
    std::vector<double> actions;
    double history_action = 0.0;

    StrictControl as_control(std::size_t delay_steps) const;
};

/// One trajectory on the full grid including the history segment.
struct DelayPath {
    std::vector<double> times;
    std::vector<double> states;
    gcalc::NoiseIncrements noise;
};

/// History values at the n_tau + 1 nodes of [-tau, 0].
std::vector<double> sample_history(const DelayModel& model, const TimeGrid& grid);

/// Euler scheme X_{n+1} = X_n + b dt + gamma dqv_n + sigma db_n for n >= n_tau with
/// delayed arguments read at node n - n_tau. Controls are evaluated at the left
/// endpoint of each cell. Throws NumericalError (with the step index) on a
/// non-finite coefficient or state and ConfigError on size mismatches.
DelayPath integrate_strict(const DelayModel& model, const StrictControl& control,
                           const TimeGrid& grid, const gcalc::NoiseIncrements& noise);
DelayPath integrate_strict(const DelayModel& model, const StrictControl& control,
                           const TimeGrid& grid, const gcalc::NoiseIncrements& noise,
                           std::span<const double> history_values);

/// As integrate_strict, with b and gamma replaced by their averages under
/// mu_k (x) mu_{k - n_tau}. The relaxed control must cover every forward step.
DelayPath integrate_relaxed(const DelayModel& model, const relaxed::RelaxedControl& control,
                            const TimeGrid& grid, const gcalc::NoiseIncrements& noise);
DelayPath integrate_relaxed(const DelayModel& model, const relaxed::RelaxedControl& control,
                            const TimeGrid& grid, const gcalc::NoiseIncrements& noise,
                            std::span<const double> history_values);

}  // namespace gsdde::sdde
