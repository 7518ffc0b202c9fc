#include "gsdde/gcalc/volatility_band.hpp"

#include "gsdde/error.hpp"

#include <cmath>
#include <fmt/format.h>

namespace gsdde::gcalc {

VolatilityBand::VolatilityBand(double sigma_min, double sigma_max)
    : sigma_min_(sigma_min), sigma_max_(sigma_max)
{
    if (!std::isfinite(sigma_min) || !std::isfinite(sigma_max) || sigma_min <= 0.0 ||
        sigma_min > sigma_max) {
        throw ConfigError(fmt::format(
            "invalid volatility band [{}, {}]: need 0 < sigma_min <= sigma_max", sigma_min,
            sigma_max));
    }
}

double g_operator(double a, const VolatilityBand& band) noexcept
{
    return a >= 0.0 ? 0.5 * band.variance_max() * a : 0.5 * band.variance_min() * a;
}

}  // namespace gsdde::gcalc
