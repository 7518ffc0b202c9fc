#include "gsdde/gcalc/noise.hpp"

#include "gsdde/error.hpp"

#include <cmath>
#include <fmt/format.h>

namespace gsdde::gcalc {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ScenarioPolicy ScenarioPolicy::constant(const VolatilityBand& band, double sigma)
{
    if (!band.contains(sigma)) {
        throw ConfigError(fmt::format("scenario volatility {} outside band [{}, {}]", sigma,
                                      band.sigma_min(), band.sigma_max()));
    }
    return ScenarioPolicy(Kind::constant, band, {sigma}, 0.0);
}

ScenarioPolicy ScenarioPolicy::two_point(const VolatilityBand& band, double p_max)
{
    if (!(p_max >= 0.0 && p_max <= 1.0)) {
        throw ConfigError(fmt::format("two-point probability {} outside [0, 1]", p_max));
    }
    return ScenarioPolicy(Kind::two_point, band, {}, p_max);
}

ScenarioPolicy ScenarioPolicy::table(const VolatilityBand& band, std::vector<double> sigmas)
{
    if (sigmas.empty()) throw ConfigError("scenario table is empty");
    for (double s : sigmas) {
        if (!band.contains(s)) {
            throw ConfigError(fmt::format("scenario table volatility {} outside band [{}, {}]", s,
                                          band.sigma_min(), band.sigma_max()));
        }
    }
    return ScenarioPolicy(Kind::table, band, std::move(sigmas), 0.0);
}

std::string ScenarioPolicy::label() const
{
    switch (kind_) {
    case Kind::constant: return fmt::format("constant({})", sigmas_.front());
    case Kind::two_point: return fmt::format("two_point(p={})", p_max_);
    case Kind::table: return fmt::format("table(n={})", sigmas_.size());
    }
    return "unknown";
}

double ScenarioPolicy::sigma(std::size_t step, Rng& rng) const
{
    switch (kind_) {
    case Kind::constant: return sigmas_.front();
    case Kind::two_point: {
        std::bernoulli_distribution pick(p_max_);
        return pick(rng) ? band_.sigma_max() : band_.sigma_min();
    }
    case Kind::table:
        if (step >= sigmas_.size()) {
            throw ConfigError(fmt::format("scenario table has {} entries, step {} requested",
                                          sigmas_.size(), step));
        }
        return sigmas_[step];
    }
    return sigmas_.front();
}

std::vector<ScenarioPolicy> extreme_scenarios(const VolatilityBand& band)
{
    std::vector<ScenarioPolicy> out{ScenarioPolicy::constant(band, band.sigma_min())};
    if (!band.is_degenerate()) out.push_back(ScenarioPolicy::constant(band, band.sigma_max()));
    return out;
}

namespace {

void check_dt(double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(fmt::format("invalid dt {}", dt));
}

}  // namespace

NoiseIncrements sample_increments_gnormal(const GNormalTable& table, std::size_t n_steps,
                                          double dt, Rng& rng)
{
    check_dt(dt);
    if (table.cdf.size() < 2 || table.cdf.back() - table.cdf.front() < 0.5) {
        throw ConfigError("degenerate G-normal table: cdf is (nearly) flat");
    }
    const double scale = std::sqrt(dt);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    NoiseIncrements out;
    out.db.resize(n_steps);
    out.dqv.resize(n_steps);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double db = scale * table.quantile(uniform(rng));
        out.db[n] = db;
        out.dqv[n] = db * db;
    }
    return out;
}

NoiseIncrements sample_increments_gnormal(const GNormalTable& table, std::size_t n_steps,
                                          double dt, std::uint64_t seed)
{
    Rng rng(seed);
    return sample_increments_gnormal(table, n_steps, dt, rng);
}

NoiseIncrements sample_increments_scenario(const ScenarioPolicy& policy, std::size_t n_steps,
                                           double dt, Rng& rng)
{
    check_dt(dt);
    const double scale = std::sqrt(dt);
    std::normal_distribution<double> normal(0.0, 1.0);
    NoiseIncrements out;
    out.db.resize(n_steps);
    out.dqv.resize(n_steps);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double sigma = policy.sigma(n, rng);
        out.db[n] = sigma * scale * normal(rng);
        out.dqv[n] = sigma * sigma * dt;
    }
    return out;
}

NoiseIncrements sample_increments_scenario(const ScenarioPolicy& policy, std::size_t n_steps,
                                           double dt, std::uint64_t seed)
{
    Rng rng(seed);
    return sample_increments_scenario(policy, n_steps, dt, rng);
}

NoiseSource::NoiseSource(std::shared_ptr<const GNormalTable> table) : source_(std::move(table))
{
    if (!std::get<0>(source_)) throw ConfigError("null G-normal table");
}

NoiseSource::NoiseSource(ScenarioPolicy policy) : source_(std::move(policy)) {}

NoiseIncrements NoiseSource::draw(std::size_t n_steps, double dt, std::uint64_t seed) const
{
    if (const auto* table = std::get_if<std::shared_ptr<const GNormalTable>>(&source_)) {
        return sample_increments_gnormal(**table, n_steps, dt, seed);
    }
    return sample_increments_scenario(std::get<ScenarioPolicy>(source_), n_steps, dt, seed);
}

std::string NoiseSource::label() const
{
    if (const auto* table = std::get_if<std::shared_ptr<const GNormalTable>>(&source_)) {
        return fmt::format("gnormal({})", to_string((*table)->capacity));
    }
    return std::get<ScenarioPolicy>(source_).label();
}

bool NoiseSource::is_gnormal() const noexcept
{
    return std::holds_alternative<std::shared_ptr<const GNormalTable>>(source_);
}

}  // namespace gsdde::gcalc
