#include "gsdde/gcalc/gheat.hpp"

#include "gsdde/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace gsdde::gcalc {

HeatGrid HeatGrid::for_band(const VolatilityBand& band, double width_in_sigmas,
                            std::size_t intervals)
{
    const double half = width_in_sigmas * band.sigma_max();
    return HeatGrid{-half, half, intervals};
}

std::vector<double> HeatGrid::abscissae() const
{
    std::vector<double> xs(nodes());
    for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = x(j);
    return xs;
}

void HeatGrid::validate() const
{
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw ConfigError(fmt::format("invalid heat grid range [{}, {}]", x_min, x_max));
    }
    if (intervals < 2) throw ConfigError("heat grid needs at least 2 intervals");
}

std::vector<double> solve_gheat(std::span<const double> initial, const VolatilityBand& band,
                                const HeatGrid& grid, double t_end, const HeatOptions& options)
{
    grid.validate();
    if (initial.size() != grid.nodes()) {
        throw ConfigError(fmt::format("initial data has {} values, grid has {} nodes",
                                      initial.size(), grid.nodes()));
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw ConfigError(fmt::format("invalid terminal time {}", t_end));
    }

    const double dx = grid.dx();
    const double limit = dx * dx / band.variance_max();
    double dt = options.dt_override > 0.0 ? options.dt_override : options.cfl_fraction * limit;
    if (!(dt > 0.0) || dt > limit) {
        throw ConfigError(fmt::format(
            "unstable G-heat configuration: dt = {} exceeds dx^2/sigma_max^2 = {}", dt, limit));
    }

    std::vector<double> u(initial.begin(), initial.end());
    if (t_end == 0.0) return u;

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    dt = t_end / static_cast<double>(n_steps);

    const double inv_dx2 = 1.0 / (dx * dx);
    const double up = 0.5 * band.variance_max() * dt * inv_dx2;
    const double down = 0.5 * band.variance_min() * dt * inv_dx2;

    std::vector<double> next(u.size());
    next.front() = u.front();
    next.back() = u.back();
    for (std::size_t step = 0; step < n_steps; ++step) {
        for (std::size_t j = 1; j + 1 < u.size(); ++j) {
            const double d2 = u[j - 1] - 2.0 * u[j] + u[j + 1];
            next[j] = u[j] + (d2 >= 0.0 ? up : down) * d2;
        }
        u.swap(next);
        if (!std::isfinite(u[u.size() / 2])) {
            throw NumericalError(fmt::format("G-heat solver produced a non-finite value at step {}",
                                             step));
        }
    }
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (!std::isfinite(u[j])) {
            throw NumericalError(fmt::format("G-heat solution is non-finite at node {}", j));
        }
    }
    return u;
}

std::vector<double> solve_gheat(const std::function<double(double)>& payoff,
                                const VolatilityBand& band, const HeatGrid& grid, double t_end,
                                const HeatOptions& options)
{
    grid.validate();
    std::vector<double> initial(grid.nodes());
    for (std::size_t j = 0; j < initial.size(); ++j) initial[j] = payoff(grid.x(j));
    return solve_gheat(initial, band, grid, t_end, options);
}

double interpolate(std::span<const double> values, const HeatGrid& grid, double x)
{
    if (values.size() != grid.nodes()) throw ConfigError("value/grid size mismatch");
    if (x <= grid.x_min) return values.front();
    if (x >= grid.x_max) return values.back();
    const double s = (x - grid.x_min) / grid.dx();
    const auto j = std::min(static_cast<std::size_t>(s), grid.intervals - 1);
    const double w = s - static_cast<double>(j);
    return (1.0 - w) * values[j] + w * values[j + 1];
}

}  // namespace gsdde::gcalc
