#pragma once

namespace gsdde::gcalc {

/// Scalar volatility uncertainty set [sigma_min, sigma_max] of a one-dimensional
/// G-Brownian motion. The quadratic variation density d<B>/dt lives in
/// [sigma_min^2, sigma_max^2].
class VolatilityBand {
public:
    /// Throws ConfigError unless 0 < sigma_min <= sigma_max (both finite).
    VolatilityBand(double sigma_min, double sigma_max);

    static VolatilityBand degenerate(double sigma) { return {sigma, sigma}; }

    double sigma_min() const noexcept { return sigma_min_; }
    double sigma_max() const noexcept { return sigma_max_; }
    double variance_min() const noexcept { return sigma_min_ * sigma_min_; }
    double variance_max() const noexcept { return sigma_max_ * sigma_max_; }
    bool is_degenerate() const noexcept { return sigma_min_ == sigma_max_; }
    bool contains(double sigma) const noexcept {
        return sigma >= sigma_min_ && sigma <= sigma_max_;
    }

    friend bool operator==(const VolatilityBand&, const VolatilityBand&) = default;

private:
    double sigma_min_;
    double sigma_max_;
};

/// Scalar G operator: G(a) = 1/2 sup_{sigma in band} sigma^2 a.
double g_operator(double a, const VolatilityBand& band) noexcept;

}  // namespace gsdde::gcalc
