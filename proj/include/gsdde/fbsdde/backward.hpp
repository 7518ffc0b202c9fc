#pragma once

#include "gsdde/fbsdde/regression.hpp"
#include "gsdde/sdde/ensemble.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gsdde::fbsdde {

/// Y_T = terminal(K_T); the driver is -/+ 1/2 [C(t) Z sigma_inv(K(t - tau))]^2.
struct BsdeSpec {
    std::function<double(double)> terminal;
    /// Control loading C(t); empty means C = 0.
    std::function<double(double)> loading;
    /// Diffusion coefficient of the forward state, used by the sigma-scaled Z basis.
    std::function<double(double)> sigma;
    std::function<double(double)> sigma_inv;
    double alpha = 0.0;
};

/// (x - alpha)^2
std::function<double(double)> quadratic_terminal(double alpha);

/// hjb:    Y_n = E[Y_{n+1} - 1/2 (C Z sigma^-1)^2 dt | F_n]
/// scheme: Y_n = E[Y_{n+1} + 1/2 (C Z sigma^-1)^2 dt | F_n]
enum class DriverSign { hjb, scheme };

std::string to_string(DriverSign s);
DriverSign driver_sign_from_string(const std::string& name);

struct BackwardOptions {
    DriverSign sign = DriverSign::hjb;
    Weighting weighting = Weighting::uniform;
    /// Z features become sigma(K(t - tau)) * chi_i.
    bool sigma_scaled_z = false;
    /// Subtract the fitted E[Y_{n+1} | F_n] before correlating with the increment.
    bool control_variate = true;
    RegressionOptions regression;
};

/// Z_n at every path: regression of Y_{n+1} db_n / mean(dqv_n) on the basis at node n.
/// Throws NumericalError when the increments carry no quadratic variation.
std::vector<double> estimate_z(std::span<const double> y_next, std::span<const double> db,
                               std::span<const double> dqv, const Eigen::MatrixXd& design,
                               std::span<const double> weights = {},
                               const RegressionOptions& options = {},
                               std::span<const double> baseline = {});

struct BackwardSolution {
    /// y[k][p]: value at forward step k (node n_tau + k), k = 0..steps.
    std::vector<std::vector<double>> y;
    /// z[k][p] for k = 0..steps-1.
    std::vector<std::vector<double>> z;
    std::vector<RegressionModel> models;
    double y0 = 0.0;
    double y0_std_error = 0.0;
    std::size_t fallbacks = 0;
};

/// Least-squares Monte Carlo recursion from the terminal node down to t = 0.
/// Throws NumericalError (with the step) on a non-finite value.
BackwardSolution backward_solve(const sdde::PathEnsemble& ensemble, const BsdeSpec& spec,
                                const RegressionBasis& basis, const BackwardOptions& options = {});

struct SupSolution {
    std::vector<BackwardSolution> per_scenario;
    std::vector<std::string> labels;
    double y0 = 0.0;
    double y0_std_error = 0.0;
    std::size_t argmax = 0;
};

/// One recursion per scenario ensemble; Y0 is the largest scenario Y0.
SupSolution backward_solve_sup(std::span<const sdde::PathEnsemble> ensembles, const BsdeSpec& spec,
                               const RegressionBasis& basis, const BackwardOptions& options = {});

/// u*[k][p] = C(t_k) Z_k sigma_inv(K(t_k - tau)).
std::vector<std::vector<double>> optimal_control(const BackwardSolution& solution,
                                                 const sdde::PathEnsemble& ensemble,
                                                 const BsdeSpec& spec);

/// Long format CSV path_id,t,Y,Z,u_star for the first `max_paths` paths (0 = all).
/// Z and u_star are left empty at the terminal time.
void write_csv(std::ostream& os, const BackwardSolution& solution,
               const sdde::PathEnsemble& ensemble, const BsdeSpec& spec,
               std::size_t max_paths = 0);

}  // namespace gsdde::fbsdde
