#pragma once

#include "gsdde/gcalc/volatility_band.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gsdde::gcalc {

/// Uniform spatial grid x_0 < ... < x_J for the G-heat equation.
struct HeatGrid {
    double x_min = -7.5;
    double x_max = 7.5;
    std::size_t intervals = 1200;

    /// Symmetric grid [-width * sigma_max, width * sigma_max].
    static HeatGrid for_band(const VolatilityBand& band, double width_in_sigmas = 6.0,
                             std::size_t intervals = 1200);

    std::size_t nodes() const noexcept { return intervals + 1; }
    double dx() const noexcept { return (x_max - x_min) / static_cast<double>(intervals); }
    double x(std::size_t j) const noexcept
    {
        return x_min + dx() * static_cast<double>(j);
    }
    std::vector<double> abscissae() const;
    void validate() const;
};

struct HeatOptions {
    /// Time step as a fraction of the explicit stability limit dx^2 / sigma_max^2.
    double cfl_fraction = 0.4;
    /// Explicit override; 0 selects cfl_fraction. Rejected above the stability limit.
    double dt_override = 0.0;
};

/// Explicit finite differences for du/dt = G(u_xx), u(0,.) = initial.
///
/// Each step applies u <- u + dt * G(D2 u) with centered second differences at
/// interior nodes; the two boundary nodes keep their initial values. The step is
/// shrunk so that an integer number of steps lands exactly on t_end.
/// Returns u(t_end, x_j) for all nodes.
std::vector<double> solve_gheat(std::span<const double> initial, const VolatilityBand& band,
                                const HeatGrid& grid, double t_end,
                                const HeatOptions& options = {});

std::vector<double> solve_gheat(const std::function<double(double)>& payoff,
                                const VolatilityBand& band, const HeatGrid& grid, double t_end,
                                const HeatOptions& options = {});

/// Linear interpolation of nodal values at x (clamped to the grid).
double interpolate(std::span<const double> values, const HeatGrid& grid, double x);

}  // namespace gsdde::gcalc
