#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gsdde::gcalc {

/// Monte Carlo mean of a payoff under one scenario.
struct ScenarioEstimate {
    std::string label;
    double mean = 0.0;
    double std_error = 0.0;
};

struct SublinearEstimate {
    double value = 0.0;
    /// Standard error of the maximizing scenario.
    double std_error = 0.0;
    std::size_t argmax = 0;
};

/// Sample mean and standard error of the mean (n-1 denominator).
ScenarioEstimate summarize(std::span<const double> samples, std::string label = {});

/// E^[xi] ~ max over scenarios of the scenario means. Ties resolve to the first.
/// Throws ConfigError on empty input.
SublinearEstimate sublinear_expectation(std::span<const ScenarioEstimate> estimates);

/// Convenience: per-scenario sample vectors, summarized then maximized.
SublinearEstimate sublinear_expectation(const std::vector<std::vector<double>>& samples);

}  // namespace gsdde::gcalc
