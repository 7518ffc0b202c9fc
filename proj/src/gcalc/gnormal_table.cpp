#include "gsdde/gcalc/gnormal_table.hpp"

#include "gsdde/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

namespace gsdde::gcalc {

std::string_view to_string(Capacity capacity)
{
    switch (capacity) {
    case Capacity::upper: return "upper";
    case Capacity::lower: return "lower";
    case Capacity::symmetric: return "symmetric";
    }
    return "symmetric";
}

Capacity capacity_from_string(std::string_view name)
{
    if (name == "upper") return Capacity::upper;
    if (name == "lower") return Capacity::lower;
    if (name == "symmetric") return Capacity::symmetric;
    throw ConfigError(fmt::format("unknown capacity '{}'", name));
}

namespace {

// Ramp from 1 (y <= -h) to 0 (y >= h).
double ramp(double y, double h)
{
    if (y <= -h) return 1.0;
    if (y >= h) return 0.0;
    return 0.5 * (1.0 - y / h);
}

}  // namespace

GNormalTable build_gnormal_table(const VolatilityBand& band, const HeatGrid& grid,
                                 Capacity capacity, const HeatOptions& options)
{
    grid.validate();
    if (std::abs(grid.x_min + grid.x_max) > 1e-12 * (grid.x_max - grid.x_min)) {
        throw ConfigError("G-normal table requires a grid symmetric about 0");
    }
    const double h = grid.dx();
    const std::size_t nodes = grid.nodes();

    // u(1, x) = E^[ramp(x + X)], hence E^[ramp(X - c)] = u(1, -c), and -c is the
    // mirrored node on a symmetric grid.
    auto upper_at_nodes = [&]() {
        auto u = solve_gheat([h](double y) { return ramp(y, h); }, band, grid, 1.0, options);
        std::vector<double> f(nodes);
        for (std::size_t j = 0; j < nodes; ++j) f[j] = u[nodes - 1 - j];
        return f;
    };
    auto lower_at_nodes = [&]() {
        auto u = solve_gheat([h](double y) { return -ramp(y, h); }, band, grid, 1.0, options);
        std::vector<double> f(nodes);
        for (std::size_t j = 0; j < nodes; ++j) f[j] = -u[nodes - 1 - j];
        return f;
    };

    GNormalTable table{grid, grid.abscissae(), {}, {}, band, capacity};
    switch (capacity) {
    case Capacity::upper: table.cdf = upper_at_nodes(); break;
    case Capacity::lower: table.cdf = lower_at_nodes(); break;
    case Capacity::symmetric: {
        auto up = upper_at_nodes();
        auto lo = lower_at_nodes();
        table.cdf.resize(nodes);
        for (std::size_t j = 0; j < nodes; ++j) table.cdf[j] = 0.5 * (up[j] + lo[j]);
        break;
    }
    }

    // Round-off can leave the cdf a hair outside [0, 1] or non-monotone.
    double running = 0.0;
    for (double& f : table.cdf) {
        f = std::clamp(f, 0.0, 1.0);
        running = std::max(running, f);
        f = running;
    }

    table.pdf.assign(nodes, 0.0);
    for (std::size_t j = 1; j + 1 < nodes; ++j) {
        table.pdf[j] = std::max(0.0, (table.cdf[j + 1] - table.cdf[j - 1]) / (2.0 * h));
    }
    const double mass = table.mass();
    if (!(mass > 0.0)) throw NumericalError("G-normal density has zero mass");
    for (double& p : table.pdf) p /= mass;
    return table;
}

double GNormalTable::cdf_at(double xv) const
{
    return interpolate(cdf, grid, xv);
}

double GNormalTable::quantile(double u) const
{
    if (u <= cdf.front()) return x.front();
    if (u >= cdf.back()) return x.back();
    // First node with cdf > u; cdf[j-1] <= u < cdf[j].
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto j = static_cast<std::size_t>(it - cdf.begin());
    const double f0 = cdf[j - 1];
    const double f1 = cdf[j];
    return x[j - 1] + (u - f0) / (f1 - f0) * (x[j] - x[j - 1]);
}

double GNormalTable::mass() const
{
    const double h = grid.dx();
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < pdf.size(); ++j) s += 0.5 * h * (pdf[j] + pdf[j + 1]);
    return s;
}

double GNormalTable::mean() const
{
    const double h = grid.dx();
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < pdf.size(); ++j) {
        s += 0.5 * h * (x[j] * pdf[j] + x[j + 1] * pdf[j + 1]);
    }
    return s;
}

double GNormalTable::variance() const
{
    const double h = grid.dx();
    const double m = mean();
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < pdf.size(); ++j) {
        const double a = x[j] - m;
        const double b = x[j + 1] - m;
        s += 0.5 * h * (a * a * pdf[j] + b * b * pdf[j + 1]);
    }
    return s;
}

void write_csv(std::ostream& os, const GNormalTable& table)
{
    os << "x,cdf,pdf\n";
    for (std::size_t j = 0; j < table.x.size(); ++j) {
        os << fmt::format("{:.10e},{:.10e},{:.10e}\n", table.x[j], table.cdf[j], table.pdf[j]);
    }
}

}  // namespace gsdde::gcalc
