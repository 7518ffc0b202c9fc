#pragma once

#include "gsdde/gcalc/gnormal_table.hpp"
#include "gsdde/gcalc/volatility_band.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace gsdde::gcalc {

using Rng = std::mt19937_64;

/// Deterministic, well-mixed seed for stream `index` of a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Per-step driving increments: db_n and quadratic-variation increments dqv_n.
struct NoiseIncrements {
    std::vector<double> db;
    std::vector<double> dqv;

    std::size_t size() const noexcept { return db.size(); }
};

/// Rule emitting per-step volatilities inside the band. A finite family of
/// these stands in for the set of measures behind the sublinear expectation.
class ScenarioPolicy {
public:
    enum class Kind { constant, two_point, table };

    /// Throws ConfigError when sigma is outside the band.
    static ScenarioPolicy constant(const VolatilityBand& band, double sigma);
    /// Each step independently picks sigma_max with probability p, else sigma_min.
    static ScenarioPolicy two_point(const VolatilityBand& band, double p_max = 0.5);
    /// Step n uses sigmas[n]; every entry must lie in the band.
    static ScenarioPolicy table(const VolatilityBand& band, std::vector<double> sigmas);

    Kind kind() const noexcept { return kind_; }
    const VolatilityBand& band() const noexcept { return band_; }
    std::string label() const;
    double sigma(std::size_t step, Rng& rng) const;
    std::size_t table_size() const noexcept { return sigmas_.size(); }

private:
    ScenarioPolicy(Kind kind, VolatilityBand band, std::vector<double> sigmas, double p)
        : kind_(kind), band_(band), sigmas_(std::move(sigmas)), p_max_(p) {}

    Kind kind_;
    VolatilityBand band_;
    std::vector<double> sigmas_;
    double p_max_;
};

/// The two constant extreme scenarios {sigma_min, sigma_max} (one if degenerate).
std::vector<ScenarioPolicy> extreme_scenarios(const VolatilityBand& band);

/// db_n = sqrt(dt) X_n with X_n drawn from the table by inverse transform;
/// dqv_n = db_n^2 (realized quadratic variation).
NoiseIncrements sample_increments_gnormal(const GNormalTable& table, std::size_t n_steps,
                                          double dt, Rng& rng);
NoiseIncrements sample_increments_gnormal(const GNormalTable& table, std::size_t n_steps,
                                          double dt, std::uint64_t seed);

/// db_n = sigma_n sqrt(dt) xi_n with xi_n standard normal; dqv_n = sigma_n^2 dt.
NoiseIncrements sample_increments_scenario(const ScenarioPolicy& policy, std::size_t n_steps,
                                           double dt, Rng& rng);
NoiseIncrements sample_increments_scenario(const ScenarioPolicy& policy, std::size_t n_steps,
                                           double dt, std::uint64_t seed);

/// Either a G-normal table or a scenario policy.
class NoiseSource {
public:
    explicit NoiseSource(std::shared_ptr<const GNormalTable> table);
    explicit NoiseSource(ScenarioPolicy policy);

    NoiseIncrements draw(std::size_t n_steps, double dt, std::uint64_t seed) const;
    std::string label() const;
    bool is_gnormal() const noexcept;

private:
    std::variant<std::shared_ptr<const GNormalTable>, ScenarioPolicy> source_;
};

}  // namespace gsdde::gcalc
