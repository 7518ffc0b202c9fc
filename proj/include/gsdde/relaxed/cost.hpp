#pragma once

#include "gsdde/gcalc/noise.hpp"
#include "gsdde/gcalc/sublinear.hpp"
#include "gsdde/relaxed/relaxed_control.hpp"
#include "gsdde/sdde/delay_model.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gsdde::relaxed {

/// Running cost L(t, x, x_delay, u, u_delay) and terminal cost Psi(x).
struct CostSpec {
    sdde::ControlledCoefficient running;
    std::function<double(double)> terminal;
};

using ControlSpec = std::variant<sdde::StrictControl, sdde::StrictSequence, RelaxedControl>;

/// Pathwise costs, one vector per scenario; path p of every scenario and every
/// control uses the same noise seed (common random numbers).
struct CostSamples {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> per_scenario;
};

struct CostEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t argmax = 0;
    std::vector<gcalc::ScenarioEstimate> per_scenario;
};

/// Left-endpoint Riemann sum of the running cost (mu-averaged for relaxed controls)
/// plus the terminal cost, for every path of every scenario. The state history
/// comes from the model's deterministic history.
CostSamples cost_samples(const ControlSpec& control, const sdde::DelayModel& model,
                         const CostSpec& cost, const sdde::TimeGrid& grid,
                         std::span<const gcalc::ScenarioPolicy> scenarios, std::size_t n_paths,
                         std::uint64_t seed, unsigned workers = 1);

CostEstimate summarize(const CostSamples& samples);

/// J = max over scenarios of the Monte Carlo mean cost.
CostEstimate cost(const ControlSpec& control, const sdde::DelayModel& model, const CostSpec& cost,
                  const sdde::TimeGrid& grid, std::span<const gcalc::ScenarioPolicy> scenarios,
                  std::size_t n_paths, std::uint64_t seed, unsigned workers = 1);

struct ChatteringRow {
    unsigned level = 0;
    double j_strict = 0.0;
    double j_relaxed = 0.0;
    double gap = 0.0;
    double se_strict = 0.0;
    double se_relaxed = 0.0;
    /// Largest per-scenario standard error of the paired difference.
    double se_gap = 0.0;
};

/// |J(chattering(mu, n)) - J(mu)| for every level in `levels`, on common random numbers.
std::vector<ChatteringRow> chattering_study(const RelaxedControl& mu, const sdde::DelayModel& model,
                                            const CostSpec& cost, const sdde::TimeGrid& grid,
                                            std::span<const gcalc::ScenarioPolicy> scenarios,
                                            std::size_t n_paths, std::uint64_t seed,
                                            std::span<const unsigned> levels,
                                            unsigned workers = 1);

/// CSV level,j_strict,j_relaxed,gap,se_strict,se_relaxed,se_gap
void write_csv(std::ostream& os, std::span<const ChatteringRow> rows);

}  // namespace gsdde::relaxed
