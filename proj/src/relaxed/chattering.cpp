#include "gsdde/relaxed/chattering.hpp"

#include "gsdde/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace gsdde::relaxed {

namespace {

std::vector<double> one_hot(const ActionGrid& grid, double action, std::size_t step)
{
    const auto idx = grid.index_of(action);
    if (!idx) {
        throw ConfigError(fmt::format("action {} at step {} is not on the action grid", action,
                                      step));
    }
    std::vector<double> w(grid.size(), 0.0);
    w[*idx] = 1.0;
    return w;
}

}  // namespace

RelaxedControl embed_strict(std::span<const double> actions, const ActionGrid& grid,
                            double history_action)
{
    std::vector<std::vector<double>> weights;
    weights.reserve(actions.size());
    for (std::size_t k = 0; k < actions.size(); ++k) weights.push_back(one_hot(grid, actions[k], k));
    return RelaxedControl(grid, std::move(weights), one_hot(grid, history_action, 0));
}

RelaxedControl embed_strict(const sdde::StrictSequence& control, const ActionGrid& grid)
{
    return embed_strict(control.actions, grid, control.history_action);
}

std::vector<std::size_t> largest_remainder_counts(std::span<const double> weights,
                                                  std::size_t block_length)
{
    const std::size_t m = weights.size();
    std::vector<std::size_t> counts(m, 0);
    std::vector<double> remainder(m, 0.0);
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double quota = weights[j] * static_cast<double>(block_length);
        const double fl = std::floor(quota);
        counts[j] = static_cast<std::size_t>(std::max(0.0, fl));
        remainder[j] = quota - fl;
        assigned += counts[j];
    }
    // Round-off can push the floors one above the block length.
    while (assigned > block_length) {
        const auto it = std::max_element(counts.begin(), counts.end());
        --*it;
        --assigned;
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t r = 0; assigned < block_length; r = (r + 1) % m) {
        ++counts[order[r]];
        ++assigned;
    }
    return counts;
}

sdde::StrictSequence chattering_approximate(const RelaxedControl& mu, unsigned level)
{
    if (level < 1) throw ConfigError("chattering refinement level must be >= 1");
    if (level > 62) throw ConfigError(fmt::format("chattering level {} too large", level));
    const auto& grid = mu.grid();
    const std::size_t steps = mu.steps();
    const std::size_t block = std::min<std::size_t>(std::size_t{1} << level, std::max<std::size_t>(steps, 1));

    sdde::StrictSequence out;
    out.actions.reserve(steps);
    std::vector<double> avg(grid.size());
    for (std::size_t start = 0; start < steps; start += block) {
        const std::size_t len = std::min(block, steps - start);
        std::fill(avg.begin(), avg.end(), 0.0);
        for (std::size_t k = start; k < start + len; ++k) {
            const auto w = mu.weights(k);
            for (std::size_t j = 0; j < grid.size(); ++j) avg[j] += w[j];
        }
        for (double& a : avg) a /= static_cast<double>(len);
        const auto counts = largest_remainder_counts(avg, len);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            out.actions.insert(out.actions.end(), counts[j], grid[j]);
        }
    }
    const auto hist = mu.history_weights();
    const auto best = std::max_element(hist.begin(), hist.end()) - hist.begin();
    out.history_action = grid[static_cast<std::size_t>(best)];
    return out;
}

}  // namespace gsdde::relaxed
