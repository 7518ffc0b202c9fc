#pragma once

#include <cstddef>

namespace gsdde::sdde {

/// Uniform partition -tau = t_0 < ... < t_{n_tau} = 0 < ... < t_n = T.
/// The delay and the horizon are exact integer multiples of dt, so delayed reads
/// always land on a node.
class TimeGrid {
public:
    /// Throws ConfigError unless tau > 0, T > 0, dt > 0 and both tau/dt and T/dt are
    /// integers (to 1e-9 relative).
    static TimeGrid make(double tau, double horizon, double dt);

    double dt() const noexcept { return dt_; }
    std::size_t delay_steps() const noexcept { return n_tau_; }
    /// Index of t = T.
    std::size_t last_node() const noexcept { return n_; }
    std::size_t nodes() const noexcept { return n_ + 1; }
    /// Number of forward steps on [0, T].
    std::size_t steps() const noexcept { return n_ - n_tau_; }
    double tau() const noexcept { return dt_ * static_cast<double>(n_tau_); }
    double horizon() const noexcept { return dt_ * static_cast<double>(n_ - n_tau_); }
    double time(std::size_t node) const noexcept
    {
        return dt_ * (static_cast<double>(node) - static_cast<double>(n_tau_));
    }

private:
    TimeGrid(double dt, std::size_t n_tau, std::size_t n) : dt_(dt), n_tau_(n_tau), n_(n) {}

    double dt_;
    std::size_t n_tau_;
    std::size_t n_;
};

}  // namespace gsdde::sdde
