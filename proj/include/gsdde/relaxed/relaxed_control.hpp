#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gsdde::relaxed {

/// Finite discretization of the compact action set.
class ActionGrid {
public:
    /// Throws ConfigError when empty or non-finite.
    explicit ActionGrid(std::vector<double> actions);

    std::size_t size() const noexcept { return actions_.size(); }
    double operator[](std::size_t i) const { return actions_[i]; }
    std::span<const double> actions() const noexcept { return actions_; }
    /// Index of an action equal to `a` up to 1e-12, if any.
    std::optional<std::size_t> index_of(double a) const noexcept;

private:
    std::vector<double> actions_;
};

/// Deterministic time-indexed probability vectors mu_n over an ActionGrid, one per
/// forward step, plus the measure used for delayed reads before t = 0.
///
/// The joint measure on (u(t), u(t - tau)) at step n is mu_n (x) mu_{n - n_tau}, so a
/// one-hot sequence is exactly the Dirac embedding of a strict control.
class RelaxedControl {
public:
    /// Throws ConfigError if any vector has the wrong length, a negative or
    /// non-finite entry, or does not sum to 1 within 1e-9. Empty history weights
    /// default to the indicator of the first action.
    RelaxedControl(ActionGrid grid, std::vector<std::vector<double>> weights,
                   std::vector<double> history_weights = {});

    static RelaxedControl constant(ActionGrid grid, std::vector<double> weights,
                                   std::size_t steps, std::vector<double> history_weights = {});

    const ActionGrid& grid() const noexcept { return grid_; }
    std::size_t steps() const noexcept { return weights_.size(); }
    std::span<const double> weights(std::size_t step) const { return weights_.at(step); }
    std::span<const double> history_weights() const noexcept { return history_; }
    /// Measure for the delayed control at `step` given a delay of `n_tau` steps.
    std::span<const double> delayed_weights(std::size_t step, std::size_t n_tau) const
    {
        return step >= n_tau ? weights(step - n_tau) : history_weights();
    }

private:
    ActionGrid grid_;
    std::vector<std::vector<double>> weights_;
    std::vector<double> history_;
};

}  // namespace gsdde::relaxed
