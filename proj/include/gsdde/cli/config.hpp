#pragma once

#include "gsdde/econ/econ.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gsdde::cli {

/// Toy problem for the chattering study: dX = u dt + s dB, cost u^2 running and
/// X_T^2 terminal, constant relaxed control over a finite action grid.
struct ChatterConfig {
    std::vector<double> actions{-1.0, 1.0};
    std::vector<double> weights{0.3, 0.7};
    std::vector<unsigned> levels{1, 2, 3, 4, 5};
    double dt = 1.0 / 1024.0;
    double horizon = 1.0;
    double tau = 1.0 / 32.0;
    double x0 = 0.0;
    double diffusion = 1.0;
    std::size_t n_paths = 4000;

    void validate() const;
};

struct RunConfig {
    econ::EconConfig econ;
    ChatterConfig chatter;
};

/// Flag values that override the configuration file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> dt;
    std::optional<unsigned> workers;
    std::optional<std::string> mode;
};

/// Unknown keys and ill-typed values throw ConfigError. A run manifest is accepted
/// too; its "config" object is used.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);
void apply(RunConfig& cfg, const Overrides& o);

/// Settings the model does not pin down, with the value in force and a note.
nlohmann::json unstated_defaults(const RunConfig& cfg);
/// Keys of the resolved configuration that the user did not supply.
std::vector<std::string> defaulted_keys(const nlohmann::json& given);

}  // namespace gsdde::cli
