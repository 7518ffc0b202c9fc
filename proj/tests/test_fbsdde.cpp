#include "gsdde/error.hpp"
#include "gsdde/fbsdde/backward.hpp"
#include "gsdde/fbsdde/regression.hpp"
#include "gsdde/gcalc/sublinear.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace gsdde;
using namespace gsdde::fbsdde;

namespace {

const gcalc::VolatilityBand wide_band{0.75, 1.25};

std::vector<double> uniform_states(std::size_t n, std::uint64_t seed, double lo = 1.0, double hi = 2.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

sdde::DelayModel capital_model(double history = 1.0)
{
    sdde::DelayModel m;
    m.drift = [](double, double, double xd, double, double) { return xd; };
    m.diffusion = [](double, double, double xd) { return 2.0 * xd; };
    m.tau = 0.1;
    m.history = [history](double) { return history; };
    return m;
}

sdde::PathEnsemble capital_ensemble(const gcalc::NoiseSource& src, std::size_t n, std::uint64_t seed,
                                    double horizon = 1.0, bool random_history = false)
{
    const auto grid = sdde::TimeGrid::make(0.1, horizon, 0.01);
    sdde::EnsembleOptions opts;
    if (random_history) opts.random_history = sdde::RandomHistory{};
    return sdde::ensemble(capital_model(), sdde::constant_control(0.0), grid, n, src, seed, opts);
}

BsdeSpec capital_spec(double loading, double alpha = 0.0)
{
    BsdeSpec s;
    s.terminal = quadratic_terminal(alpha);
    s.alpha = alpha;
    if (loading != 0.0) s.loading = [loading](double) { return loading; };
    s.sigma = [](double k) { return 2.0 * k; };
    s.sigma_inv = [](double k) { return 1.0 / (2.0 * std::max(std::abs(k), 1e-6)) * (k < 0 ? -1 : 1); };
    return s;
}

double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

TEST(Regression, PolynomialBasisLayout)
{
    const auto b = RegressionBasis::polynomial(2);
    ASSERT_EQ(b.size(), 6u);
    EXPECT_EQ(b.names(), (std::vector<std::string>{"1", "x", "y", "x^2", "xy", "y^2"}));
    EXPECT_DOUBLE_EQ(b.feature(4, 2.0, 3.0), 6.0);
    EXPECT_DOUBLE_EQ(b.feature(5, 2.0, 3.0), 9.0);
    EXPECT_EQ(RegressionBasis::polynomial(3).size(), 10u);
}

TEST(Regression, ExactInterpolation)
{
    const auto basis = RegressionBasis::polynomial(1).prefix(2);
    const auto x = uniform_states(50, 1, -3.0, 3.0);
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = 2.0 + 3.0 * x[i];
    const auto m = regress(t, basis.design(x, x));
    EXPECT_NEAR(m.coefficients[0], 2.0, 1e-9);
    EXPECT_NEAR(m.coefficients[1], 3.0, 1e-9);
}

TEST(Regression, ConstantTargets)
{
    const auto basis = RegressionBasis::polynomial(2);
    const auto x = uniform_states(200, 2), y = uniform_states(200, 3);
    const std::vector<double> t(200, 4.25);
    const auto design = basis.design(x, y);
    for (auto w : {Weighting::uniform, Weighting::tail_damped}) {
        const auto m = regress(t, design, regression_weights(w, x, y));
        const Eigen::VectorXd fit = m.predict(design);
        for (Eigen::Index i = 0; i < fit.size(); ++i) EXPECT_NEAR(fit[i], 4.25, 1e-9);
    }
}

TEST(Regression, NoisyLinearMatchesQrOracle)
{
    const std::size_t n = 10000;
    const auto basis = RegressionBasis::polynomial(1);
    const auto x = uniform_states(n, 4, -1.0, 1.0), y = uniform_states(n, 5, 0.0, 3.0);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = 1.0 - 2.0 * x[i] + 0.5 * y[i] + noise(rng);
    const auto design = basis.design(x, y);
    const auto m = regress(t, design);

    const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd qr = design.householderQr().solve(tv);
    const Eigen::VectorXd r = tv - design * qr;
    const double s2 = r.squaredNorm() / static_cast<double>(n - 3);
    const Eigen::MatrixXd cov = s2 * (design.transpose() * design).inverse();
    const double truth[] = {1.0, -2.0, 0.5};
    for (Eigen::Index i = 0; i < 3; ++i) {
        EXPECT_NEAR(m.coefficients[i], qr[i], 1e-8);
        EXPECT_LE(std::abs(m.coefficients[i] - truth[i]), 3.0 * std::sqrt(cov(i, i)));
    }
}

TEST(Regression, RankDeficientFallsBackToRidge)
{
    std::vector<Feature> f{[](double, double) { return 1.0; }, [](double x, double) { return x; },
                           [](double x, double) { return 2.0 * x; }};
    const RegressionBasis basis(f, {"1", "x", "2x"});
    const auto x = uniform_states(100, 7);
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = 1.0 + x[i];
    RegressionOptions opts;
    opts.ridge_scale = 0.0;
    const auto m = regress(t, basis.design(x, x), {}, opts);
    EXPECT_TRUE(m.regularized_fallback);
    const Eigen::VectorXd fit = m.predict(basis.design(x, x));
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(fit[static_cast<Eigen::Index>(i)], t[i], 1e-6);
}

TEST(Regression, RejectsTooFewRows)
{
    const auto basis = RegressionBasis::polynomial(2);
    const auto x = uniform_states(4, 1);
    EXPECT_THROW(regress(std::vector<double>(4, 1.0), basis.design(x, x)), ConfigError);
}

TEST(Regression, NestedBasesNeverIncreaseResidual)
{
    const auto full = RegressionBasis::polynomial(3);
    const auto x = uniform_states(3000, 8), y = uniform_states(3000, 9);
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::exp(x[i]) * std::sin(3.0 * y[i]);
    for (auto w : {Weighting::uniform, Weighting::tail_damped}) {
        const auto weights = regression_weights(w, x, y);
        double prev = INFINITY;
        for (std::size_t l = 1; l <= full.size(); ++l) {
            const auto b = full.prefix(l);
            const double res = regress(t, b.design(x, y), weights).residual;
            EXPECT_LE(res, prev * (1.0 + 1e-9));
            prev = res;
        }
    }
}

TEST(EstimateZ, ConstantValueHasNoGradient)
{
    const std::size_t n = 10000;
    const double dt = 0.01;
    const auto x = uniform_states(n, 10), y = uniform_states(n, 11);
    const auto inc = gcalc::sample_increments_scenario(gcalc::ScenarioPolicy::constant(wide_band, 1.0),
                                                       n, dt, 12);
    const auto design = RegressionBasis::polynomial(2).design(x, y);
    const std::vector<double> c(n, 3.0);
    const auto z = estimate_z(c, inc.db, inc.dqv, design);
    std::vector<double> raw(n);
    for (std::size_t p = 0; p < n; ++p) raw[p] = 3.0 * inc.db[p] / dt;
    const double se = gcalc::summarize(raw).std_error;
    EXPECT_LE(std::abs(mean(z)), 3.0 * se);
    const auto z_cv = estimate_z(c, inc.db, inc.dqv, design, {}, {}, c);
    for (double v : z_cv) EXPECT_EQ(v, 0.0);
}

TEST(EstimateZ, ReproducibleAndRejectsDegenerateVolatility)
{
    const std::size_t n = 100;
    const auto x = uniform_states(n, 10), y = uniform_states(n, 11);
    const auto design = RegressionBasis::polynomial(2).design(x, y);
    const auto a = gcalc::sample_increments_scenario(gcalc::ScenarioPolicy::constant(wide_band, 1.0), n, 0.01, 3);
    const auto b = gcalc::sample_increments_scenario(gcalc::ScenarioPolicy::constant(wide_band, 1.0), n, 0.01, 3);
    EXPECT_EQ(estimate_z(x, a.db, a.dqv, design), estimate_z(x, b.db, b.dqv, design));
    const std::vector<double> zero(n, 0.0);
    EXPECT_THROW(estimate_z(x, a.db, zero, design), NumericalError);
}

TEST(EstimateZ, OneStepStateRecoversDiffusion)
{
    const std::size_t n = 10000;
    const double dt = 0.01;
    const auto x = uniform_states(n, 13), y = uniform_states(n, 14);
    const auto inc = gcalc::sample_increments_scenario(gcalc::ScenarioPolicy::constant(wide_band, 1.0),
                                                       n, dt, 15);
    std::vector<double> next(n);
    for (std::size_t p = 0; p < n; ++p) next[p] = x[p] + y[p] * dt + 2.0 * y[p] * inc.db[p];
    const auto design = RegressionBasis::polynomial(2).design(x, y);
    const auto z = estimate_z(next, inc.db, inc.dqv, design);
    // Per-path oracle sigma(y) = 2y; regression error of the raw estimator is ~ std(next db / dt) / sqrt(n / L).
    std::vector<double> raw(n);
    for (std::size_t p = 0; p < n; ++p) raw[p] = next[p] * inc.db[p] / dt;
    const double tol = 3.0 * gcalc::summarize(raw).std_error * std::sqrt(6.0);
    for (std::size_t p = 0; p < n; ++p) EXPECT_NEAR(z[p], 2.0 * y[p], tol);
}

TEST(EstimateZ, MatchesFiniteDifferenceOfValueRegression)
{
    const std::size_t n = 100000;
    const double dt = 0.01;
    const auto x = uniform_states(n, 16), y = uniform_states(n, 17);
    const auto inc = gcalc::sample_increments_scenario(gcalc::ScenarioPolicy::constant(wide_band, 1.0),
                                                       n, dt, 18);
    std::vector<double> next(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double x1 = x[p] + y[p] * dt + 2.0 * y[p] * inc.db[p];
        next[p] = std::exp(0.5 * x1);
    }
    const auto basis = RegressionBasis::polynomial(2);
    const auto design = basis.design(x, y);
    const auto value = regress(next, design);
    const auto z = estimate_z(next, inc.db, inc.dqv, design, {}, {}, [&] {
        const Eigen::VectorXd f = value.predict(design);
        return std::vector<double>(f.data(), f.data() + f.size());
    }());
    const auto zmodel = regress(z, design);
    const double h = 1e-4;
    for (double xs : {1.2, 1.5, 1.8}) {
        for (double ys : {1.2, 1.5, 1.8}) {
            std::vector<double> rp, rm, r0;
            for (std::size_t i = 0; i < basis.size(); ++i) {
                rp.push_back(basis.feature(i, xs + h, ys));
                rm.push_back(basis.feature(i, xs - h, ys));
                r0.push_back(basis.feature(i, xs, ys));
            }
            const double fd = (value.predict(rp) - value.predict(rm)) / (2.0 * h) * 2.0 * ys;
            EXPECT_NEAR(zmodel.predict(r0), fd, 0.05 * std::abs(fd)) << xs << "," << ys;
        }
    }
}

TEST(Backward, TerminalConsistencyAndShapes)
{
    const gcalc::NoiseSource src(gcalc::ScenarioPolicy::constant(wide_band, 1.0));
    const auto ens = capital_ensemble(src, 500, 1);
    const auto spec = capital_spec(0.0, 0.3);
    const auto sol = backward_solve(ens, spec, RegressionBasis::polynomial(2));
    ASSERT_EQ(sol.y.size(), ens.grid.steps() + 1);
    ASSERT_EQ(sol.z.size(), ens.grid.steps());
    for (std::size_t p = 0; p < ens.size(); ++p) {
        const double k = ens.paths[p].states.back();
        EXPECT_EQ(sol.y.back()[p], (k - 0.3) * (k - 0.3));
    }
    EXPECT_TRUE(std::isfinite(sol.y0));
}

TEST(Backward, ConstantTerminalStaysConstant)
{
    const gcalc::NoiseSource src(gcalc::ScenarioPolicy::constant(wide_band, 1.0));
    const auto ens = capital_ensemble(src, 1000, 2, 1.0, true);
    auto spec = capital_spec(0.0);
    spec.terminal = [](double) { return 7.0; };
    const auto sol = backward_solve(ens, spec, RegressionBasis::polynomial(2));
    for (const auto& yk : sol.y) {
        for (double v : yk) EXPECT_NEAR(v, 7.0, 1e-9);
    }
    auto with_c = spec;
    with_c.loading = [](double) { return 1.0; };
    const auto u = optimal_control(backward_solve(ens, with_c, RegressionBasis::polynomial(2)), ens, with_c);
    for (const auto& uk : u) {
        for (double v : uk) EXPECT_NEAR(v, 0.0, 1e-6);
    }
}

TEST(Backward, ZeroDriverMatchesForwardMonteCarlo)
{
    const auto table = std::make_shared<const gcalc::GNormalTable>(gcalc::build_gnormal_table(wide_band));
    for (const auto& src : {gcalc::NoiseSource(table),
                            gcalc::NoiseSource(gcalc::ScenarioPolicy::constant(wide_band, 1.25))}) {
        const auto ens = capital_ensemble(src, 10000, 3);
        const auto sol = backward_solve(ens, capital_spec(0.0), RegressionBasis::polynomial(2));
        std::vector<double> sq;
        for (double k : ens.column(ens.grid.last_node())) sq.push_back(k * k);
        const double oracle = mean(sq);
        EXPECT_NEAR(sol.y0, oracle, 0.05 * oracle) << src.label();
        for (std::size_t k = 0; k + 1 < sol.y.size(); ++k) {
            const auto a = gcalc::summarize(sol.y[k]);
            const auto b = gcalc::summarize(sol.y[k + 1]);
            EXPECT_LE(std::abs(a.mean - b.mean),
                      3.0 * std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error))
                << "step " << k;
        }
    }
}

TEST(Backward, DriverSignOrdersStepMeans)
{
    const gcalc::NoiseSource src(gcalc::ScenarioPolicy::constant(wide_band, 1.0));
    const auto ens = capital_ensemble(src, 4000, 4, 0.2, true);
    const auto basis = RegressionBasis::polynomial(2);
    for (auto sign : {DriverSign::hjb, DriverSign::scheme}) {
        BackwardOptions opts;
        opts.sign = sign;
        opts.sigma_scaled_z = true;
        const auto sol = backward_solve(ens, capital_spec(1.0), basis, opts);
        for (std::size_t k = 0; k + 1 < sol.y.size(); ++k) {
            const double change = mean(sol.y[k]) - mean(sol.y[k + 1]);
            if (sign == DriverSign::scheme) {
                EXPECT_GE(change, -1e-9) << "step " << k;
            } else {
                EXPECT_LE(change, 1e-9) << "step " << k;
            }
        }
    }
}

TEST(Backward, OptimalControlOneStepGradient)
{
    const std::size_t n = 100000;
    const auto grid = sdde::TimeGrid::make(0.01, 0.01, 0.01);
    sdde::EnsembleOptions opts;
    opts.random_history = sdde::RandomHistory{1.0, 2.0, true};
    auto model = capital_model();
    model.tau = 0.01;
    const gcalc::NoiseSource src(gcalc::ScenarioPolicy::constant(wide_band, 1.0));
    const auto ens = sdde::ensemble(model, sdde::constant_control(0.0), grid, n, src, 5, opts);
    const double alpha = 0.5, c = 1.0, dt = 0.01;
    const auto spec = capital_spec(c, alpha);
    BackwardOptions bopts;
    bopts.sigma_scaled_z = true;
    const auto sol = backward_solve(ens, spec, RegressionBasis::polynomial(2), bopts);
    const auto u = optimal_control(sol, ens, spec);
    ASSERT_EQ(u.size(), 1u);
    std::vector<double> err(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double x = ens.paths[p].states[1];
        const double y = ens.paths[p].states[0];
        const double oracle = c * 2.0 * (x + y * dt - alpha);
        err[p] = u[0][p] - oracle;
        EXPECT_NEAR(u[0][p], oracle, 0.05 * std::abs(oracle) + 0.05);
    }
    std::vector<double> raw(n);
    for (std::size_t p = 0; p < n; ++p) {
        raw[p] = sol.y[1][p] * ens.paths[p].noise.db[0] / dt / (2.0 * ens.paths[p].states[0]);
    }
    EXPECT_LE(std::abs(mean(err)), 3.0 * gcalc::summarize(raw).std_error);
}

TEST(Backward, ZeroLoadingGivesZeroControl)
{
    const gcalc::NoiseSource src(gcalc::ScenarioPolicy::constant(wide_band, 1.0));
    const auto ens = capital_ensemble(src, 300, 6);
    const auto spec = capital_spec(0.0);
    const auto u = optimal_control(backward_solve(ens, spec, RegressionBasis::polynomial(2)), ens, spec);
    for (const auto& uk : u) {
        for (double v : uk) EXPECT_EQ(v, 0.0);
    }
}

TEST(Backward, ScenarioSupDominatesEachScenario)
{
    std::vector<sdde::PathEnsemble> ens;
    for (auto& p : gcalc::extreme_scenarios(wide_band)) {
        ens.push_back(capital_ensemble(gcalc::NoiseSource(p), 2000, 7, 1.0, true));
    }
    BackwardOptions opts;
    opts.weighting = Weighting::tail_damped;
    opts.sigma_scaled_z = true;
    const auto sup = backward_solve_sup(ens, capital_spec(1.0), RegressionBasis::polynomial(2), opts);
    for (const auto& s : sup.per_scenario) EXPECT_GE(sup.y0, s.y0);
    EXPECT_EQ(sup.y0, sup.per_scenario[sup.argmax].y0);
}

TEST(Backward, CsvHeaderAndRows)
{
    const gcalc::NoiseSource src(gcalc::ScenarioPolicy::constant(wide_band, 1.0));
    const auto ens = capital_ensemble(src, 20, 8, 0.2);
    const auto spec = capital_spec(1.0);
    const auto sol = backward_solve(ens, spec, RegressionBasis::polynomial(2));
    std::ostringstream os;
    write_csv(os, sol, ens, spec, 3);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "path_id,t,Y,Z,u_star");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 3u * (ens.grid.steps() + 1));
}

TEST(Backward, RejectsTooFewPaths)
{
    const gcalc::NoiseSource src(gcalc::ScenarioPolicy::constant(wide_band, 1.0));
    const auto ens = capital_ensemble(src, 5, 9, 0.2);
    EXPECT_THROW(backward_solve(ens, capital_spec(0.0), RegressionBasis::polynomial(2)), ConfigError);
}
