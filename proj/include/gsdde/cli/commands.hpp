#pragma once

#include "gsdde/cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gsdde::cli {

inline constexpr const char* manifest_name = "manifest.json";
inline constexpr const char* table_name = "gnormal_table.csv";
inline constexpr const char* forward_name = "forward_paths.csv";
inline constexpr const char* backward_name = "backward_paths.csv";
inline constexpr const char* chatter_name = "chattering.csv";

/// Seed used by `reproduce`.
inline constexpr std::uint64_t reproduce_seed = 20240917;

struct CommandResult {
    std::vector<std::filesystem::path> files;
    nlohmann::json results = nlohmann::json::object();
};

CommandResult cmd_gtable(const RunConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_forward(const RunConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_solve(const RunConfig& cfg, const std::filesystem::path& out_dir,
                        std::ostream& out);
CommandResult cmd_chatter(const RunConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_reproduce(const RunConfig& cfg, const std::filesystem::path& out_dir,
                            std::ostream& out);

/// Entry point of the command-line tool. Returns 0 on success, 1 on usage or
/// configuration errors and 2 on numerical failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gsdde::cli
