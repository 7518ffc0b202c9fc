#pragma once

#include "gsdde/relaxed/relaxed_control.hpp"
#include "gsdde/sdde/delay_model.hpp"

#include <span>

namespace gsdde::relaxed {

/// Dirac embedding of a strict control sequence: one-hot weights per step.
/// The history measure is the indicator of `history_action`.
/// Throws ConfigError if any action is not on the grid.
RelaxedControl embed_strict(std::span<const double> actions, const ActionGrid& grid,
                            double history_action);
RelaxedControl embed_strict(const sdde::StrictSequence& control, const ActionGrid& grid);

/// Chattering approximation at refinement `level` >= 1.
///
/// Steps are grouped in consecutive blocks of 2^level (the last block may be
/// shorter; a block longer than the horizon becomes the whole horizon). Inside a
/// block, action j gets a run of steps proportional to its block-averaged weight,
/// rounded by largest remainder with ties going to the lower grid index; runs are
/// laid out in grid order. The history action is the most likely action of the
/// history measure (first on ties).
sdde::StrictSequence chattering_approximate(const RelaxedControl& mu, unsigned level);

/// Number of steps each action receives in one block with the given averaged weights.
std::vector<std::size_t> largest_remainder_counts(std::span<const double> weights,
                                                  std::size_t block_length);

}  // namespace gsdde::relaxed
