#include "gsdde/relaxed/relaxed_control.hpp"

#include "gsdde/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace gsdde::relaxed {

ActionGrid::ActionGrid(std::vector<double> actions) : actions_(std::move(actions))
{
    if (actions_.empty()) throw ConfigError("action grid is empty");
    for (double a : actions_) {
        if (!std::isfinite(a)) throw ConfigError("action grid contains a non-finite action");
    }
}

std::optional<std::size_t> ActionGrid::index_of(double a) const noexcept
{
    for (std::size_t i = 0; i < actions_.size(); ++i) {
        if (std::abs(actions_[i] - a) <= 1e-12 * std::max(1.0, std::abs(a))) return i;
    }
    return std::nullopt;
}

namespace {

void validate_weights(std::span<const double> w, std::size_t expected, std::size_t step)
{
    if (w.size() != expected) {
        throw ConfigError(fmt::format("relaxed control step {}: {} weights for {} actions", step,
                                      w.size(), expected));
    }
    double sum = 0.0;
    for (double v : w) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ConfigError(fmt::format("relaxed control step {}: invalid weight {}", step, v));
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError(
            fmt::format("relaxed control step {}: weights sum to {} instead of 1", step, sum));
    }
}

}  // namespace

RelaxedControl::RelaxedControl(ActionGrid grid, std::vector<std::vector<double>> weights,
                               std::vector<double> history_weights)
    : grid_(std::move(grid)), weights_(std::move(weights)), history_(std::move(history_weights))
{
    if (history_.empty()) {
        history_.assign(grid_.size(), 0.0);
        history_.front() = 1.0;
    }
    for (std::size_t k = 0; k < weights_.size(); ++k) validate_weights(weights_[k], grid_.size(), k);
    try {
        validate_weights(history_, grid_.size(), 0);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("history measure: {}", e.what()));
    }
}

RelaxedControl RelaxedControl::constant(ActionGrid grid, std::vector<double> weights,
                                        std::size_t steps, std::vector<double> history_weights)
{
    std::vector<std::vector<double>> all(steps, weights);
    return RelaxedControl(std::move(grid), std::move(all), std::move(history_weights));
}

}  // namespace gsdde::relaxed
