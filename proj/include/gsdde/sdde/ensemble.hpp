#pragma once

#include "gsdde/gcalc/noise.hpp"
#include "gsdde/sdde/delay_model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gsdde::sdde {

/// History drawn uniformly in [lo, hi]: one draw per history node, or one per path.
struct RandomHistory {
    double lo = 1.0;
    double hi = 2.0;
    bool per_node = true;
};

struct EnsembleOptions {
    std::optional<RandomHistory> random_history;
    unsigned workers = 1;
};

struct PathEnsemble {
    TimeGrid grid;
    std::vector<DelayPath> paths;
    std::string noise_label;

    std::size_t size() const noexcept { return paths.size(); }
    /// States of every path at one node.
    std::vector<double> column(std::size_t node) const;
};

/// Seed of the noise stream of path `p`. Path p of an ensemble with master seed s
/// uses exactly source.draw(steps, dt, path_noise_seed(s, p)).
std::uint64_t path_noise_seed(std::uint64_t master, std::size_t path) noexcept;
std::uint64_t path_history_seed(std::uint64_t master, std::size_t path) noexcept;

/// History values for one path: the model's deterministic history unless a random
/// history is requested.
std::vector<double> draw_history(const DelayModel& model, const TimeGrid& grid,
                                 const std::optional<RandomHistory>& random,
                                 std::uint64_t seed);

/// n_paths independent strict-control paths. Results do not depend on `workers`.
PathEnsemble ensemble(const DelayModel& model, const StrictControl& control,
                      const TimeGrid& grid, std::size_t n_paths, const gcalc::NoiseSource& source,
                      std::uint64_t seed, const EnsembleOptions& options = {});

/// Runs body(p) for p in [0, n) on up to `workers` threads, rethrowing the first
/// exception.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

/// Long format CSV path_id,t,state for the first `max_paths` paths (0 = all).
void write_csv(std::ostream& os, const PathEnsemble& ensemble, std::size_t max_paths = 0);

}  // namespace gsdde::sdde
