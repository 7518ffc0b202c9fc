#include "gsdde/gcalc/sublinear.hpp"

#include "gsdde/error.hpp"

#include <cmath>

namespace gsdde::gcalc {

ScenarioEstimate summarize(std::span<const double> samples, std::string label)
{
    ScenarioEstimate est{std::move(label), 0.0, 0.0};
    const auto n = samples.size();
    if (n == 0) return est;
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    est.mean = mean;
    est.std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))
                          : 0.0;
    return est;
}

SublinearEstimate sublinear_expectation(std::span<const ScenarioEstimate> estimates)
{
    if (estimates.empty()) throw ConfigError("sublinear expectation of an empty scenario set");
    SublinearEstimate out{estimates[0].mean, estimates[0].std_error, 0};
    for (std::size_t i = 1; i < estimates.size(); ++i) {
        if (estimates[i].mean > out.value) {
            out = {estimates[i].mean, estimates[i].std_error, i};
        }
    }
    return out;
}

SublinearEstimate sublinear_expectation(const std::vector<std::vector<double>>& samples)
{
    std::vector<ScenarioEstimate> est;
    est.reserve(samples.size());
    for (const auto& s : samples) est.push_back(summarize(s));
    return sublinear_expectation(est);
}

}  // namespace gsdde::gcalc
