#pragma once

#include "gsdde/fbsdde/backward.hpp"
#include "gsdde/gcalc/gnormal_table.hpp"
#include "gsdde/sdde/ensemble.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gsdde::econ {

enum class Mode { gnormal, scenario_sup };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& name);

/// dK = M K(t - tau) dt + s K(t - tau) dB on [0, T], K = history on [-tau, 0],
/// value Y_T = (K_T - alpha)^2 with control loading C.
struct EconConfig {
    double sigma_min = 0.75;
    double sigma_max = 1.25;
    double horizon = 1.0;
    double growth = 1.0;
    double tau = 0.1;
    double alpha = 0.0;
    /// sigma(k) = sigma_scale * k
    double sigma_scale = 2.0;
    /// C(t) = loading
    double loading = 1.0;
    sdde::RandomHistory history{1.0, 2.0, true};
    /// Deterministic history k = value on [-tau, 0]; replaces the random history.
    std::optional<double> history_constant;
    double dt = 0.01;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 20240917;
    Mode mode = Mode::gnormal;
    unsigned degree = 2;
    fbsdde::DriverSign driver_sign = fbsdde::DriverSign::hjb;
    fbsdde::Weighting weighting = fbsdde::Weighting::tail_damped;
    bool sigma_scaled_z = true;
    bool control_variate = true;
    double sigma_floor = 1e-6;
    gcalc::Capacity capacity = gcalc::Capacity::symmetric;
    std::size_t table_intervals = 1200;
    double table_width = 6.0;
    unsigned workers = 1;
    /// Paths written to trajectory CSVs (0 = all).
    std::size_t csv_paths = 100;

    /// Throws ConfigError on inconsistent values.
    void validate() const;
    gcalc::VolatilityBand band() const { return {sigma_min, sigma_max}; }
};

sdde::DelayModel make_model(const EconConfig& cfg);
fbsdde::BsdeSpec make_spec(const EconConfig& cfg);
std::optional<sdde::RandomHistory> history_rule(const EconConfig& cfg);
fbsdde::BackwardOptions backward_options(const EconConfig& cfg);

std::shared_ptr<const gcalc::GNormalTable> make_table(const EconConfig& cfg);

/// Forward ensembles: one G-normal ensemble, or one per extreme scenario.
std::vector<sdde::PathEnsemble> forward(const EconConfig& cfg,
                                        std::shared_ptr<const gcalc::GNormalTable> table = {});

struct EconReport {
    double y0 = 0.0;
    double y0_std_error = 0.0;
    Mode mode = Mode::gnormal;
    std::vector<std::string> labels;
    std::vector<double> scenario_y0;
    std::size_t argmax = 0;
    /// Delayed states entering sigma_inv with |k| below the floor.
    std::size_t clamp_count = 0;
    std::size_t nonpositive_nodes = 0;
    std::size_t forward_nodes = 0;
    std::size_t regression_fallbacks = 0;
    bool accepted = false;
    std::shared_ptr<const gcalc::GNormalTable> table;
    std::vector<sdde::PathEnsemble> ensembles;
    std::vector<fbsdde::BackwardSolution> solutions;
};

EconReport run_scenario(const EconConfig& cfg);

inline constexpr const char* fig1_name = "fig1_gnormal_density.csv";
inline constexpr const char* fig2_name = "fig2_gnormal_cdf.csv";
inline constexpr const char* fig3_name = "fig3_forward_paths.csv";
inline constexpr const char* fig4_name = "fig4_backward_paths.csv";

/// x,pdf,normal_pdf (standard normal reference)
void write_density_csv(std::ostream& os, const gcalc::GNormalTable& table);
/// x,cdf,normal_cdf
void write_cdf_csv(std::ostream& os, const gcalc::GNormalTable& table);

/// Writes the four figure files into `dir` and returns their paths. Trajectory
/// figures use the ensemble of the maximizing scenario.
std::vector<std::filesystem::path> write_figures(const EconReport& report, const EconConfig& cfg,
                                                 const std::filesystem::path& dir);

}  // namespace gsdde::econ
