#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gsdde::fbsdde {

/// Feature of (current state x, delayed state y).
using Feature = std::function<double(double x, double y)>;

class RegressionBasis {
public:
    RegressionBasis(std::vector<Feature> features, std::vector<std::string> names);

    /// Monomials x^i y^j with i + j <= degree, ordered by total degree then by
    /// decreasing power of x: 1, x, y, x^2, xy, y^2, ...
    static RegressionBasis polynomial(unsigned degree);

    std::size_t size() const noexcept { return features_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    /// First `n` features (nested sub-basis).
    RegressionBasis prefix(std::size_t n) const;

    double feature(std::size_t i, double x, double y) const { return features_[i](x, y); }
    Eigen::MatrixXd design(std::span<const double> x, std::span<const double> y) const;

private:
    std::vector<Feature> features_;
    std::vector<std::string> names_;
};

enum class Weighting { uniform, tail_damped };

std::string to_string(Weighting w);
/// Throws ConfigError on unknown names.
Weighting weighting_from_string(const std::string& name);

/// Per-path weights: 1, or 1 / (1 + x^2 + y^2).
std::vector<double> regression_weights(Weighting w, std::span<const double> x,
                                       std::span<const double> y);

struct RegressionOptions {
    /// lambda = ridge_scale * trace / L1 on the equilibrated normal matrix. 0 disables the
    /// ridge unless the normal matrix turns out singular.
    double ridge_scale = 1e-8;
    unsigned refinement_sweeps = 2;
};

struct RegressionModel {
    Eigen::VectorXd coefficients;
    /// Weighted mean squared in-sample residual.
    double residual = 0.0;
    /// Set when an unregularized solve failed and the ridge was switched on.
    bool regularized_fallback = false;

    double predict(std::span<const double> row) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& design) const;
};

/// Weighted least squares through the normal equations. Empty weights mean uniform.
/// Throws ConfigError when there are fewer rows than features or sizes disagree.
RegressionModel regress(std::span<const double> targets, const Eigen::MatrixXd& design,
                        std::span<const double> weights = {},
                        const RegressionOptions& options = {});

}  // namespace gsdde::fbsdde
