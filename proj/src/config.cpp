#include "extruder/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "extruder/errors.hpp"

namespace extruder {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"model", {"L", "N0", "xi", "B", "Kd", "rho0", "S_eff", "eta", "time_unit"}},
        {"perturbation", {"eps", "omega"}},
        {"setpoint", {"x_star", "v_max", "S", "S_offset"}},
        {"sim", {"mode", "x0", "u_history0", "tau", "horizon", "seed"}},
    };
    return keys;
}

double to_number(const std::string& section, const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || text.find_first_not_of(" \t", used) != std::string::npos) {
        throw ConfigError(fmt::format("[{}] {}: '{}' is not a number", section, key, text));
    }
    return value;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> text(const std::string& section, const std::string& key) const
    {
        auto sec = tree_.get_child_optional(section);
        if (!sec) {
            return std::nullopt;
        }
        auto value = sec->get_optional<std::string>(key);
        if (!value) {
            return std::nullopt;
        }
        return *value;
    }

    std::optional<double> number(const std::string& section, const std::string& key) const
    {
        if (auto t = text(section, key)) {
            return to_number(section, key, *t);
        }
        return std::nullopt;
    }

    void read(const std::string& section, const std::string& key, double& out) const
    {
        if (auto v = number(section, key)) {
            out = *v;
        }
    }

private:
    const pt::ptree& tree_;
};

void check_schema(const pt::ptree& tree)
{
    for (const auto& [section, body] : tree) {
        auto it = schema().find(section);
        if (it == schema().end()) {
            if (body.empty() && !body.data().empty()) {
                throw ConfigError(fmt::format("key '{}' outside of any section", section));
            }
            throw ConfigError(fmt::format("unknown section [{}]", section));
        }
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) {
                throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, section));
            }
        }
    }
}

std::string num(double v)
{
    return fmt::format("{:.17g}", v);
}

}  // namespace

ScenarioConfig parse_config(std::string_view text)
{
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("malformed config: {}", e.message()));
    }
    check_schema(tree);
    Reader r(tree);

    ScenarioConfig cfg = default_scenario();
    auto& p = cfg.params;
    r.read("model", "L", p.L);
    r.read("model", "N0", p.N0);
    r.read("model", "xi", p.xi);
    r.read("model", "B", p.B);
    r.read("model", "Kd", p.Kd);
    r.read("model", "rho0", p.rho0);
    p.S_eff = r.number("model", "S_eff");
    p.eta = r.number("model", "eta");

    double time_scale = 1.0;  // config time unit -> minutes
    if (auto unit = r.text("model", "time_unit")) {
        if (*unit == "s") {
            time_scale = 1.0 / 60.0;
        } else if (*unit != "min") {
            throw ConfigError(fmt::format("time_unit must be 'min' or 's', got '{}'", *unit));
        }
    }

    r.read("perturbation", "eps", cfg.pert.eps);
    if (auto omega = r.number("perturbation", "omega")) {
        cfg.pert.omega = *omega / time_scale;
    }

    r.read("setpoint", "x_star", cfg.setpoint.x_star);
    r.read("setpoint", "v_max", cfg.setpoint.v_max);
    auto S = r.number("setpoint", "S");
    auto offset = r.number("setpoint", "S_offset");
    if (S && offset) {
        throw ConfigError("give either S or S_offset in [setpoint], not both");
    }

    if (auto mode = r.text("sim", "mode")) {
        cfg.mode = mode_from_string(*mode);
    }
    r.read("sim", "x0", cfg.x0);
    r.read("sim", "u_history0", cfg.u_history0);
    if (auto tau = r.number("sim", "tau")) {
        cfg.tau = *tau * time_scale;
    }
    if (auto horizon = r.number("sim", "horizon")) {
        cfg.horizon = *horizon * time_scale;
    }
    if (auto seed = r.text("sim", "seed")) {
        try {
            std::size_t used = 0;
            cfg.seed = std::stoull(*seed, &used);
            if (used != seed->size() || seed->find('-') != std::string::npos) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("[sim] seed: '{}' is not an unsigned integer", *seed));
        }
    }

    try {
        p.validate();
        cfg.pert.validate();
        auto coeffs = derive_coefficients(p);
        double minimum = s_min(coeffs, cfg.setpoint.x_star, cfg.setpoint.v_max);
        if (S) {
            if (!(*S > minimum)) {
                throw ConfigError(fmt::format("setpoint slope S = {} must exceed S_min = {:.6g} at x* = {}", *S,
                                              minimum, cfg.setpoint.x_star));
            }
            cfg.setpoint.S = *S;
        } else {
            cfg.setpoint.S = minimum + offset.value_or(kDefaultSlopeOffset);
        }
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open config '{}'", path));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string echo_config(const ScenarioConfig& c)
{
    std::string out;
    out += "[model]\n";
    out += fmt::format("time_unit = min\nL = {}\nN0 = {}\nxi = {}\nB = {}\nKd = {}\nrho0 = {}\n", num(c.params.L),
                       num(c.params.N0), num(c.params.xi), num(c.params.B), num(c.params.Kd), num(c.params.rho0));
    if (c.params.S_eff) {
        out += fmt::format("S_eff = {}\n", num(*c.params.S_eff));
    }
    if (c.params.eta) {
        out += fmt::format("eta = {}\n", num(*c.params.eta));
    }
    out += fmt::format("\n[perturbation]\neps = {}\nomega = {}\n", num(c.pert.eps), num(c.pert.omega));
    out += fmt::format("\n[setpoint]\nx_star = {}\nv_max = {}\nS = {}\n", num(c.setpoint.x_star),
                       num(c.setpoint.v_max), num(c.setpoint.S));
    out += fmt::format("\n[sim]\nmode = {}\nx0 = {}\nu_history0 = {}\ntau = {}\nhorizon = {}\nseed = {}\n",
                       to_string(c.mode), num(c.x0), num(c.u_history0), num(c.tau), num(c.horizon), c.seed);
    return out;
}

std::string manifest_json(const RunManifest& m)
{
    using nlohmann::json;
    json verdict = {
        {"satisfied", m.verdict.satisfied},
        {"branch", std::string(to_string(m.verdict.branch))},
        {"lhs", m.verdict.lhs},
        {"bounds",
         {{"increasing", m.verdict.bounds.increasing},
          {"decreasing", m.verdict.bounds.decreasing},
          {"interior_max", m.verdict.bounds.interior_max}}},
        {"sup_lambda", m.verdict.sup_lambda},
        {"x1", m.verdict.x1 ? json(*m.verdict.x1) : json(nullptr)},
    };
    json monitors = {
        {"max_dDdt", m.monitors.max_dDdt},
        {"delay_rate_below_one", m.monitors.max_dDdt < 1.0},
        {"max_delay", m.monitors.max_delay},
        {"delay_bound", m.monitors.delay_bound},
        {"max_F", m.monitors.max_F},
        {"min_denominator", m.monitors.min_denominator},
        {"backstepping_residual",
         m.monitors.backstepping_residual ? json(*m.monitors.backstepping_residual) : json(nullptr)},
    };
    json doc = {
        {"version", std::string(kVersion)},
        {"units", {{"time", "min"}, {"length", "m"}}},
        {"config_path", m.config_path},
        {"config", m.config_echo},
        {"mode", m.mode},
        {"outputs", m.outputs},
        {"wall_clock_seconds", m.wall_clock_seconds},
        {"feasibility", verdict},
        {"monitors", monitors},
    };
    return doc.dump(2);
}

std::string default_output_dir(const std::string& fallback)
{
    if (const char* env = std::getenv("EXTRUDER_OUTPUT_DIR"); env && *env) {
        return env;
    }
    return fallback;
}

}  // namespace extruder
