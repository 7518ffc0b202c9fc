#include "gsdde/sdde/ensemble.hpp"

#include "gsdde/error.hpp"

#include <algorithm>
#include <exception>
#include <fmt/format.h>
#include <mutex>
#include <ostream>
#include <thread>

namespace gsdde::sdde {

std::vector<double> PathEnsemble::column(std::size_t node) const
{
    std::vector<double> out(paths.size());
    for (std::size_t p = 0; p < paths.size(); ++p) out[p] = paths[p].states.at(node);
    return out;
}

std::uint64_t path_noise_seed(std::uint64_t master, std::size_t path) noexcept
{
    return gcalc::derive_seed(master, 2 * static_cast<std::uint64_t>(path));
}

std::uint64_t path_history_seed(std::uint64_t master, std::size_t path) noexcept
{
    return gcalc::derive_seed(master, 2 * static_cast<std::uint64_t>(path) + 1);
}

std::vector<double> draw_history(const DelayModel& model, const TimeGrid& grid,
                                 const std::optional<RandomHistory>& random, std::uint64_t seed)
{
    if (!random) return sample_history(model, grid);
    if (!(random->lo <= random->hi)) {
        throw ConfigError(fmt::format("random history bounds [{}, {}] are reversed", random->lo,
                                      random->hi));
    }
    gcalc::Rng rng(seed);
    std::uniform_real_distribution<double> uniform(random->lo, random->hi);
    std::vector<double> values(grid.delay_steps() + 1);
    if (random->per_node) {
        for (double& v : values) v = uniform(rng);
    } else {
        std::fill(values.begin(), values.end(), uniform(rng));
    }
    return values;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body)
{
    const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(guard);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

PathEnsemble ensemble(const DelayModel& model, const StrictControl& control,
                      const TimeGrid& grid, std::size_t n_paths, const gcalc::NoiseSource& source,
                      std::uint64_t seed, const EnsembleOptions& options)
{
    if (n_paths == 0) throw ConfigError("ensemble needs at least one path");
    PathEnsemble out{grid, std::vector<DelayPath>(n_paths), source.label()};
    parallel_for(n_paths, options.workers, [&](std::size_t p) {
        const auto history = draw_history(model, grid, options.random_history,
                                          path_history_seed(seed, p));
        const auto noise = source.draw(grid.steps(), grid.dt(), path_noise_seed(seed, p));
        try {
            out.paths[p] = integrate_strict(model, control, grid, noise, history);
        } catch (const NumericalError& e) {
            throw NumericalError(fmt::format("path {}: {}", p, e.what()));
        }
    });
    return out;
}

void write_csv(std::ostream& os, const PathEnsemble& ensemble, std::size_t max_paths)
{
    const std::size_t n =
        max_paths == 0 ? ensemble.size() : std::min(max_paths, ensemble.size());
    os << "path_id,t,state\n";
    for (std::size_t p = 0; p < n; ++p) {
        const auto& path = ensemble.paths[p];
        for (std::size_t i = 0; i < path.states.size(); ++i) {
            os << fmt::format("{},{:.6f},{:.10e}\n", p, path.times[i], path.states[i]);
        }
    }
}

}  // namespace gsdde::sdde
