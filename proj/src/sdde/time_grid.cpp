#include "gsdde/sdde/time_grid.hpp"

#include "gsdde/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace gsdde::sdde {

namespace {

std::size_t exact_steps(double length, double dt, const char* what)
{
    const double ratio = length / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw ConfigError(fmt::format("{} = {} is not an integer multiple of dt = {}", what, length,
                                      dt));
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

TimeGrid TimeGrid::make(double tau, double horizon, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(fmt::format("invalid dt {}", dt));
    if (!(tau > 0.0)) throw ConfigError(fmt::format("delay tau must be positive, got {}", tau));
    if (!(horizon > 0.0)) throw ConfigError(fmt::format("horizon must be positive, got {}", horizon));
    const auto n_tau = exact_steps(tau, dt, "tau");
    const auto n_fwd = exact_steps(horizon, dt, "T");
    return TimeGrid(dt, n_tau, n_tau + n_fwd);
}

}  // namespace gsdde::sdde
