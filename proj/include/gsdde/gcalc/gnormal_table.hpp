#pragma once

#include "gsdde/gcalc/gheat.hpp"
#include "gsdde/gcalc/volatility_band.hpp"

#include <iosfwd>
#include <string_view>
#include <vector>

namespace gsdde::gcalc {

/// Which capacity of {X <= c} the tabulated "distribution" represents.
///   upper     F(c) = E^[1{X<=c}]
///   lower     F(c) = -E^[-1{X<=c}]
///   symmetric F(c) = (upper + lower) / 2, which satisfies F(c) + F(-c) = 1
enum class Capacity { upper, lower, symmetric };

std::string_view to_string(Capacity capacity);
Capacity capacity_from_string(std::string_view name);

/// G-normal distribution function and density at unit time on a uniform grid.
/// Used as a sampling device for G-normal increments.
struct GNormalTable {
    HeatGrid grid;
    std::vector<double> x;
    std::vector<double> cdf;
    std::vector<double> pdf;
    VolatilityBand band;
    Capacity capacity = Capacity::symmetric;

    double cdf_at(double xv) const;
    /// Inverse transform with linear interpolation of the cdf; clamps to the grid.
    double quantile(double u) const;
    /// Trapezoidal moments of the tabulated density.
    double mass() const;
    double mean() const;
    double variance() const;
};

/// Builds the table from G-heat solves of a step payoff mollified by a linear ramp
/// of width 2 dx. The density is the centered difference of the cdf, clipped at 0
/// and renormalized to unit trapezoidal mass.
GNormalTable build_gnormal_table(const VolatilityBand& band, const HeatGrid& grid,
                                 Capacity capacity = Capacity::symmetric,
                                 const HeatOptions& options = {});

inline GNormalTable build_gnormal_table(const VolatilityBand& band)
{
    return build_gnormal_table(band, HeatGrid::for_band(band));
}

/// CSV with header x,cdf,pdf.
void write_csv(std::ostream& os, const GNormalTable& table);

}  // namespace gsdde::gcalc
