#include "gsdde/fbsdde/regression.hpp"

#include "gsdde/error.hpp"

#include <cmath>
#include <fmt/format.h>
#include <iostream>
#include <optional>

namespace gsdde::fbsdde {

RegressionBasis::RegressionBasis(std::vector<Feature> features, std::vector<std::string> names)
    : features_(std::move(features)), names_(std::move(names))
{
    if (features_.empty()) throw ConfigError("regression basis needs at least one feature");
    if (names_.size() != features_.size()) names_.resize(features_.size());
}

RegressionBasis RegressionBasis::polynomial(unsigned degree)
{
    std::vector<Feature> features;
    std::vector<std::string> names;
    for (unsigned total = 0; total <= degree; ++total) {
        for (unsigned i = total + 1; i-- > 0;) {
            const unsigned j = total - i;
            features.emplace_back([i, j](double x, double y) {
                double v = 1.0;
                for (unsigned a = 0; a < i; ++a) v *= x;
                for (unsigned b = 0; b < j; ++b) v *= y;
                return v;
            });
            std::string name;
            if (i > 0) name += i == 1 ? "x" : fmt::format("x^{}", i);
            if (j > 0) name += j == 1 ? "y" : fmt::format("y^{}", j);
            names.push_back(name.empty() ? "1" : name);
        }
    }
    return {std::move(features), std::move(names)};
}

RegressionBasis RegressionBasis::prefix(std::size_t n) const
{
    if (n == 0 || n > size()) {
        throw ConfigError(fmt::format("prefix of {} features from a basis of {}", n, size()));
    }
    return {{features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(n)},
            {names_.begin(), names_.begin() + static_cast<std::ptrdiff_t>(n)}};
}

Eigen::MatrixXd RegressionBasis::design(std::span<const double> x, std::span<const double> y) const
{
    if (x.size() != y.size()) throw ConfigError("design: state vectors differ in length");
    Eigen::MatrixXd w(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(size()));
    for (std::size_t p = 0; p < x.size(); ++p) {
        for (std::size_t i = 0; i < size(); ++i) {
            w(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) = features_[i](x[p], y[p]);
        }
    }
    return w;
}

std::string to_string(Weighting w)
{
    return w == Weighting::uniform ? "uniform" : "tail_damped";
}

Weighting weighting_from_string(const std::string& name)
{
    if (name == "uniform") return Weighting::uniform;
    if (name == "tail_damped") return Weighting::tail_damped;
    throw ConfigError(fmt::format("unknown regression weighting '{}'", name));
}

std::vector<double> regression_weights(Weighting w, std::span<const double> x,
                                       std::span<const double> y)
{
    std::vector<double> out(x.size(), 1.0);
    if (w == Weighting::tail_damped) {
        for (std::size_t p = 0; p < x.size(); ++p) out[p] = 1.0 / (1.0 + x[p] * x[p] + y[p] * y[p]);
    }
    return out;
}

double RegressionModel::predict(std::span<const double> row) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) v += coefficients[static_cast<Eigen::Index>(i)] * row[i];
    return v;
}

Eigen::VectorXd RegressionModel::predict(const Eigen::MatrixXd& design) const
{
    return design * coefficients;
}

RegressionModel regress(std::span<const double> targets, const Eigen::MatrixXd& design,
                        std::span<const double> weights, const RegressionOptions& options)
{
    const auto n = design.rows();
    const auto l = design.cols();
    if (static_cast<Eigen::Index>(targets.size()) != n) {
        throw ConfigError(fmt::format("regress: {} targets for {} rows", targets.size(), n));
    }
    if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != n) {
        throw ConfigError(fmt::format("regress: {} weights for {} rows", weights.size(), n));
    }
    if (n < l) throw ConfigError(fmt::format("regress: {} rows for {} features", n, l));

    const Eigen::Map<const Eigen::VectorXd> t(targets.data(), n);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    if (!weights.empty()) w = Eigen::Map<const Eigen::VectorXd>(weights.data(), n);

    const Eigen::MatrixXd wx = design.array().colwise() * w.array();
    const Eigen::MatrixXd a = design.transpose() * wx;
    const Eigen::VectorXd b = wx.transpose() * t;

    Eigen::VectorXd d(l);
    for (Eigen::Index i = 0; i < l; ++i) d[i] = a(i, i) > 0.0 ? 1.0 / std::sqrt(a(i, i)) : 1.0;
    const Eigen::MatrixXd as = d.asDiagonal() * a * d.asDiagonal();
    const Eigen::VectorXd bs = d.asDiagonal() * b;

    RegressionModel model;
    auto solve_with = [&](double scale) -> std::optional<Eigen::VectorXd> {
        Eigen::MatrixXd reg = as;
        const double lambda = scale * as.trace() / static_cast<double>(l);
        reg.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
        const double pivot_min = ldlt.vectorD().minCoeff();
        const double pivot_max = ldlt.vectorD().maxCoeff();
        if (!(pivot_min > 1e-14 * pivot_max)) return std::nullopt;
        Eigen::VectorXd c = ldlt.solve(bs);
        for (unsigned s = 0; s < options.refinement_sweeps && lambda > 0.0; ++s) {
            c += ldlt.solve(bs - as * c);
        }
        return c;
    };

    auto c = solve_with(options.ridge_scale);
    if (!c && options.ridge_scale == 0.0) {
        model.regularized_fallback = true;
        std::clog << "regress: singular normal equations, falling back to ridge\n";
        c = solve_with(RegressionOptions{}.ridge_scale);
    }
    if (!c) {
        c = solve_with(std::max(options.ridge_scale, RegressionOptions{}.ridge_scale) * 1e4);
        model.regularized_fallback = true;
    }
    if (!c || !c->allFinite()) throw NumericalError("regress: normal equations could not be solved");

    model.coefficients = d.asDiagonal() * *c;
    const Eigen::VectorXd r = t - design * model.coefficients;
    model.residual = (w.array() * r.array().square()).sum() / w.sum();
    return model;
}

}  // namespace gsdde::fbsdde
