#include "gsdde/cli/config.hpp"

#include "gsdde/error.hpp"

#include <fmt/format.h>
#include <fstream>
#include <set>

namespace gsdde::cli {

using nlohmann::json;

namespace {

const std::set<std::string>& top_keys()
{
    static const std::set<std::string> keys{
        "sigma_min",   "sigma_max",      "horizon",         "growth",      "tau",
        "alpha",       "sigma_scale",    "loading",         "history",     "history_constant",
        "dt",          "n_paths",        "seed",            "mode",        "degree",
        "driver_sign", "weighting",      "sigma_scaled_z",  "control_variate",
        "sigma_floor", "capacity",       "table_intervals", "table_width", "workers",
        "csv_paths",   "chatter"};
    return keys;
}

template <class T>
void read(const json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("config key '{}' has the wrong type", key));
    }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where)
{
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError(fmt::format("unknown config key '{}{}'", where, key));
    }
}

}  // namespace

void ChatterConfig::validate() const
{
    if (actions.empty()) throw ConfigError("chatter.actions must not be empty");
    if (weights.size() != actions.size()) {
        throw ConfigError("chatter.weights must have one entry per action");
    }
    if (levels.empty()) throw ConfigError("chatter.levels must not be empty");
    if (n_paths < 2) throw ConfigError("chatter.n_paths must be at least 2");
    (void)sdde::TimeGrid::make(tau, horizon, dt);
}

RunConfig parse_config(const json& in)
{
    if (!in.is_object()) throw ConfigError("config must be a JSON object");
    const json& j = in.contains("manifest_version") ? in.at("config") : in;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j, top_keys(), "");

    RunConfig cfg;
    auto& e = cfg.econ;
    read(j, "sigma_min", e.sigma_min);
    read(j, "sigma_max", e.sigma_max);
    read(j, "horizon", e.horizon);
    read(j, "growth", e.growth);
    read(j, "tau", e.tau);
    read(j, "alpha", e.alpha);
    read(j, "sigma_scale", e.sigma_scale);
    read(j, "loading", e.loading);
    if (j.contains("history")) {
        const auto& h = j.at("history");
        if (!h.is_object()) throw ConfigError("config key 'history' must be an object");
        reject_unknown(h, {"lo", "hi", "per_node"}, "history.");
        read(h, "lo", e.history.lo);
        read(h, "hi", e.history.hi);
        read(h, "per_node", e.history.per_node);
    }
    if (j.contains("history_constant") && !j.at("history_constant").is_null()) {
        double v = 0.0;
        read(j, "history_constant", v);
        e.history_constant = v;
    }
    read(j, "dt", e.dt);
    read(j, "n_paths", e.n_paths);
    read(j, "seed", e.seed);
    std::string s;
    if (j.contains("mode")) {
        read(j, "mode", s);
        e.mode = econ::mode_from_string(s);
    }
    read(j, "degree", e.degree);
    if (j.contains("driver_sign")) {
        read(j, "driver_sign", s);
        e.driver_sign = fbsdde::driver_sign_from_string(s);
    }
    if (j.contains("weighting")) {
        read(j, "weighting", s);
        e.weighting = fbsdde::weighting_from_string(s);
    }
    read(j, "sigma_scaled_z", e.sigma_scaled_z);
    read(j, "control_variate", e.control_variate);
    read(j, "sigma_floor", e.sigma_floor);
    if (j.contains("capacity")) {
        read(j, "capacity", s);
        e.capacity = gcalc::capacity_from_string(s);
    }
    read(j, "table_intervals", e.table_intervals);
    read(j, "table_width", e.table_width);
    read(j, "workers", e.workers);
    read(j, "csv_paths", e.csv_paths);

    if (j.contains("chatter")) {
        const auto& c = j.at("chatter");
        if (!c.is_object()) throw ConfigError("config key 'chatter' must be an object");
        reject_unknown(c,
                       {"actions", "weights", "levels", "dt", "horizon", "tau", "x0", "diffusion",
                        "n_paths"},
                       "chatter.");
        auto& ch = cfg.chatter;
        read(c, "actions", ch.actions);
        read(c, "weights", ch.weights);
        read(c, "levels", ch.levels);
        read(c, "dt", ch.dt);
        read(c, "horizon", ch.horizon);
        read(c, "tau", ch.tau);
        read(c, "x0", ch.x0);
        read(c, "diffusion", ch.diffusion);
        read(c, "n_paths", ch.n_paths);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& ex) {
        throw ConfigError(fmt::format("config file '{}' is not valid JSON: {}", path.string(),
                                      ex.what()));
    }
    return parse_config(j);
}

json to_json(const RunConfig& cfg)
{
    const auto& e = cfg.econ;
    const auto& c = cfg.chatter;
    json j;
    j["sigma_min"] = e.sigma_min;
    j["sigma_max"] = e.sigma_max;
    j["horizon"] = e.horizon;
    j["growth"] = e.growth;
    j["tau"] = e.tau;
    j["alpha"] = e.alpha;
    j["sigma_scale"] = e.sigma_scale;
    j["loading"] = e.loading;
    j["history"] = {{"lo", e.history.lo}, {"hi", e.history.hi}, {"per_node", e.history.per_node}};
    j["history_constant"] = e.history_constant ? json(*e.history_constant) : json(nullptr);
    j["dt"] = e.dt;
    j["n_paths"] = e.n_paths;
    j["seed"] = e.seed;
    j["mode"] = econ::to_string(e.mode);
    j["degree"] = e.degree;
    j["driver_sign"] = fbsdde::to_string(e.driver_sign);
    j["weighting"] = fbsdde::to_string(e.weighting);
    j["sigma_scaled_z"] = e.sigma_scaled_z;
    j["control_variate"] = e.control_variate;
    j["sigma_floor"] = e.sigma_floor;
    j["capacity"] = std::string(gcalc::to_string(e.capacity));
    j["table_intervals"] = e.table_intervals;
    j["table_width"] = e.table_width;
    j["workers"] = e.workers;
    j["csv_paths"] = e.csv_paths;
    j["chatter"] = {{"actions", c.actions}, {"weights", c.weights}, {"levels", c.levels},
                    {"dt", c.dt},           {"horizon", c.horizon}, {"tau", c.tau},
                    {"x0", c.x0},           {"diffusion", c.diffusion}, {"n_paths", c.n_paths}};
    return j;
}

void apply(RunConfig& cfg, const Overrides& o)
{
    if (o.seed) cfg.econ.seed = *o.seed;
    if (o.paths) {
        cfg.econ.n_paths = *o.paths;
        cfg.chatter.n_paths = *o.paths;
    }
    if (o.dt) cfg.econ.dt = *o.dt;
    if (o.workers) cfg.econ.workers = *o.workers;
    if (o.mode) cfg.econ.mode = econ::mode_from_string(*o.mode);
}

json unstated_defaults(const RunConfig& cfg)
{
    const auto& e = cfg.econ;
    json out = json::array();
    auto add = [&](const char* key, json value, const char* note) {
        out.push_back({{"key", key}, {"value", std::move(value)}, {"note", note}});
    };
    add("loading", e.loading, "control loading C(t), constant in t");
    add("dt", e.dt, "time step of forward and backward schemes");
    add("n_paths", e.n_paths, "Monte Carlo sample paths");
    add("seed", e.seed, "master seed");
    add("degree", e.degree, "total polynomial degree of the regression basis in (K(t), K(t - tau))");
    add("mode", econ::to_string(e.mode), "sublinear expectation via G-normal sampling or scenario max");
    add("driver_sign", fbsdde::to_string(e.driver_sign),
        "hjb: Y_n = E[Y_{n+1} - 1/2 (C Z / sigma)^2 dt]; scheme: + sign");
    add("weighting", fbsdde::to_string(e.weighting), "regression weights");
    add("sigma_scaled_z", e.sigma_scaled_z, "Z basis multiplied by sigma(K(t - tau))");
    add("control_variate", e.control_variate, "Z estimator centred by the fitted conditional mean");
    add("sigma_floor", e.sigma_floor, "|k| floor for 1/sigma(k)");
    add("history", json{{"lo", e.history.lo}, {"hi", e.history.hi}, {"per_node", e.history.per_node}},
        "independent uniform draw at every history node of every path");
    add("capacity", std::string(gcalc::to_string(e.capacity)), "G-normal table construction");
    add("table_intervals", e.table_intervals, "finite difference intervals of the G-heat solve");
    add("table_width", e.table_width, "half width of the G-heat grid in units of sigma_max");
    add("control_history", "first grid action",
        "delayed control before t = 0 in relaxed and chattering runs");
    return out;
}

std::vector<std::string> defaulted_keys(const json& given)
{
    const json& j = given.is_object() && given.contains("manifest_version") ? given.at("config") : given;
    std::vector<std::string> out;
    for (const auto& key : top_keys()) {
        if (!j.is_object() || !j.contains(key)) out.push_back(key);
    }
    return out;
}

}  // namespace gsdde::cli
