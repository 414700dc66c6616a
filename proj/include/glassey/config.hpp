/**
 * @file config.hpp
 * @brief Plain key=value run configuration shared by every CLI subcommand.
 *
 * Format: one `key = value` per line, `#` starts a comment, blank lines are
 * ignored. Unknown or repeated keys are errors. Lists are comma separated.
 */
#ifndef GLASSEY_CONFIG_HPP
#define GLASSEY_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "glassey/core_model.hpp"
#include "glassey/radial_solver.hpp"
#include "glassey/report.hpp"
#include "glassey/sweep_harness.hpp"

namespace glassey {

struct RunConfig {
    ModelParams params;
    // Data profile.
    double data_radius = 1.0;
    double amplitude_f = 1.0;
    double amplitude_g = 1.0;
    // Grid and solver (solve).
    double dr = 0.005;
    double t_final = 100.0;
    double cfl = 0.8;
    double safety = 0.05;
    double blowup_factor = 1e6;
    double dt_floor = 1e-12;
    double sample_interval = 0.0;
    bool source = true;
    bool check_weak_residual = false;
    std::vector<double> snapshot_times;
    // Sweep.
    std::vector<double> eps_values;
    bool critical = false;
    bool repeat_refined = true;
    double slope_tolerance = 0.3;
    double t_budget = 400.0;
    double dr_max = 0.005;
    int points_per_T = 4000;
    int jobs = 1;
    // Output.
    std::string out_dir = "run";

    [[nodiscard]] DataProfile data() const { return make_bump_data(data_radius, amplitude_f, amplitude_g); }

    [[nodiscard]] SolverOptions solver_options() const {
        SolverOptions o;
        o.cfl = cfl;
        o.safety = safety;
        o.blowup_factor = blowup_factor;
        o.dt_floor = dt_floor;
        o.sample_interval = sample_interval;
        o.source = source;
        o.snapshot_times = snapshot_times;
        return o;
    }

    [[nodiscard]] SweepPlan sweep_plan() const {
        SweepPlan plan;
        plan.params_base = params;
        plan.data = data();
        plan.eps_values = eps_values;
        plan.repeat_refined = repeat_refined;
        plan.slope_tolerance = slope_tolerance;
        plan.t_budget = t_budget;
        plan.dr_max = dr_max;
        plan.points_per_T = points_per_T;
        plan.jobs = jobs;
        plan.solver = solver_options();
        plan.solver.snapshot_times.clear();
        return plan;
    }

    /// Checks every field the CLI relies on. n is capped at 5 here, not in the library.
    void validate() const {
        params.validate();
        if (params.n > 5) throw ValidationError("n must lie in 1..5");
        data().validate(params.R);
        if (!(dr > 0.0)) throw ValidationError("dr must be > 0");
        if (!(t_final > 0.0)) throw ValidationError("t_final must be > 0");
        solver_options().validate();
        if (!(dt_floor > 0.0)) throw ValidationError("dt_floor must be > 0");
        if (jobs < 1) throw ValidationError("jobs must be >= 1");
        if (out_dir.empty()) throw ValidationError("out must not be empty");
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
        throw ValidationError("key '" + key + "': '" + text + "' is not a finite number");
    return value;
}

inline int parse_int(const std::string& key, const std::string& text) {
    int value = 0;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (ec != std::errc() || ptr != last) throw ValidationError("key '" + key + "': '" + text + "' is not an integer");
    return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ValidationError("key '" + key + "': '" + text + "' is not a boolean");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

inline std::string format_list(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ",";
        s += format_shortest(xs[i]);
    }
    return s;
}

struct ConfigField {
    std::string key;
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
    bool is_flag = false;  ///< boolean key, usable as a bare command-line flag
};

template <class T>
ConfigField number_field(std::string key, std::string help, T RunConfig::*member) {
    ConfigField f{key, std::move(help), nullptr, nullptr};
    f.set = [key, member](RunConfig& c, const std::string& v) {
        if constexpr (std::is_same_v<T, int>) c.*member = parse_int(key, v);
        else c.*member = parse_double(key, v);
    };
    f.get = [member](const RunConfig& c) {
        if constexpr (std::is_same_v<T, int>) return std::to_string(c.*member);
        else return format_shortest(c.*member);
    };
    return f;
}

template <class T>
ConfigField param_field(std::string key, std::string help, T ModelParams::*member) {
    ConfigField f{key, std::move(help), nullptr, nullptr};
    f.set = [key, member](RunConfig& c, const std::string& v) {
        if constexpr (std::is_same_v<T, int>) c.params.*member = parse_int(key, v);
        else c.params.*member = parse_double(key, v);
    };
    f.get = [member](const RunConfig& c) {
        if constexpr (std::is_same_v<T, int>) return std::to_string(c.params.*member);
        else return format_shortest(c.params.*member);
    };
    return f;
}

inline ConfigField bool_field(std::string key, std::string help, bool RunConfig::*member) {
    ConfigField f{key, std::move(help), nullptr, nullptr};
    f.set = [key, member](RunConfig& c, const std::string& v) { c.*member = parse_bool(key, v); };
    f.get = [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); };
    f.is_flag = true;
    return f;
}

inline ConfigField list_field(std::string key, std::string help, std::vector<double> RunConfig::*member) {
    ConfigField f{key, std::move(help), nullptr, nullptr};
    f.set = [key, member](RunConfig& c, const std::string& v) { c.*member = parse_list(key, v); };
    f.get = [member](const RunConfig& c) { return format_list(c.*member); };
    return f;
}

}  // namespace detail

/// Every recognised key, in echo order.
[[nodiscard]] inline const std::vector<detail::ConfigField>& config_fields() {
    using namespace detail;
    static const std::vector<ConfigField> fields = [] {
        std::vector<ConfigField> f;
        f.push_back(param_field("n", "spatial dimension (1..5)", &ModelParams::n));
        f.push_back(param_field("p", "nonlinearity exponent (> 1)", &ModelParams::p));
        f.push_back(param_field("mu", "damping strength (>= 0)", &ModelParams::mu));
        f.push_back(param_field("beta", "damping decay rate (>= 1)", &ModelParams::beta));
        f.push_back(param_field("R", "support radius (>= 1)", &ModelParams::R));
        f.push_back(param_field("eps", "data amplitude (> 0)", &ModelParams::eps));
        f.push_back(number_field("data_radius", "bump support radius (<= R)", &RunConfig::data_radius));
        f.push_back(number_field("amplitude_f", "bump amplitude of f (>= 0)", &RunConfig::amplitude_f));
        f.push_back(number_field("amplitude_g", "bump amplitude of g (> 0)", &RunConfig::amplitude_g));
        f.push_back(number_field("dr", "grid spacing for solve", &RunConfig::dr));
        f.push_back(number_field("t_final", "final time for solve", &RunConfig::t_final));
        f.push_back(number_field("cfl", "CFL factor in (0, 0.9]", &RunConfig::cfl));
        f.push_back(number_field("safety", "nonlinear step safety factor", &RunConfig::safety));
        f.push_back(number_field("blowup_factor", "blow-up threshold as a multiple of eps", &RunConfig::blowup_factor));
        f.push_back(number_field("dt_floor", "blow-up when dt falls below this", &RunConfig::dt_floor));
        f.push_back(number_field("sample_interval", "trace cadence (0: t_final/4000)", &RunConfig::sample_interval));
        f.push_back(bool_field("source", "include the |u_t|^p source", &RunConfig::source));
        f.push_back(bool_field("check_weak_residual", "add the weak-form residual to the solve report",
                               &RunConfig::check_weak_residual));
        f.push_back(list_field("snapshot_times", "times at which (r,u,v) snapshots are written", &RunConfig::snapshot_times));
        f.push_back(list_field("eps_values", "sweep amplitudes, strictly decreasing", &RunConfig::eps_values));
        f.push_back(bool_field("critical", "run the critical form check instead of the power-law fit", &RunConfig::critical));
        f.push_back(bool_field("repeat_refined", "rerun each eps at dr/2", &RunConfig::repeat_refined));
        f.push_back(number_field("slope_tolerance", "allowed |fitted - theorem| slope gap", &RunConfig::slope_tolerance));
        f.push_back(number_field("t_budget", "largest simulated time per sweep run", &RunConfig::t_budget));
        f.push_back(number_field("dr_max", "coarsest sweep grid spacing", &RunConfig::dr_max));
        f.push_back(number_field("points_per_T", "sweep resolution: dr <= T_pred / points_per_T", &RunConfig::points_per_T));
        f.push_back(number_field("jobs", "worker threads for sweeps", &RunConfig::jobs));
        ConfigField out{"out", "output directory", nullptr, nullptr};
        out.set = [](RunConfig& c, const std::string& v) { c.out_dir = v; };
        out.get = [](const RunConfig& c) { return c.out_dir; };
        f.push_back(out);
        return f;
    }();
    return fields;
}

/// Assigns one key; unknown keys are validation errors.
inline void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    for (const auto& field : config_fields()) {
        if (field.key == key) {
            field.set(config, detail::trim(value));
            return;
        }
    }
    throw ValidationError("unknown config key '" + key + "'");
}

/// Parses key=value text into (key, value) pairs in file order.
[[nodiscard]] inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text,
                                                                                       const std::string& origin) {
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
        std::string key = detail::trim(std::string_view(body).substr(0, eq));
        std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ValidationError(where + ": empty key");
        if (!seen.insert(key).second) throw ValidationError(where + ": key '" + key + "' repeated");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

[[nodiscard]] inline RunConfig config_from_text(std::string_view text, const std::string& origin = "<config>",
                                                RunConfig base = {}) {
    for (const auto& [key, value] : parse_config_text(text, origin)) {
        try {
            apply_setting(base, key, value);
        } catch (const ValidationError& e) {
            throw ValidationError(origin + ": " + e.what());
        }
    }
    return base;
}

[[nodiscard]] inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Canonical key=value listing of every field; parsing it reproduces the config.
[[nodiscard]] inline std::string config_echo(const RunConfig& config) {
    std::string s;
    for (const auto& field : config_fields()) {
        const std::string value = field.get(config);
        s += field.key + (value.empty() ? " =" : " = " + value) + "\n";
    }
    return s;
}

}  // namespace glassey

#endif  // GLASSEY_CONFIG_HPP
