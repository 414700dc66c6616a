/**
 * @file cli.hpp
 * @brief Subcommands bound | solve | sweep | check behind a CLI11 front end.
 *
 * Every subcommand reads an optional key=value config file (positional) and
 * lets `--key value` flags override single keys. Run directories get
 * result.json (deterministic), config-echo.txt and metadata.json (timestamped).
 *
 * Exit codes: 0 success / pass, 1 internal error, 2 validation error,
 * 3 failed verdict or check, 4 inconclusive sweep.
 */
#ifndef GLASSEY_CLI_HPP
#define GLASSEY_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glassey/config.hpp"
#include "glassey/core_model.hpp"
#include "glassey/functionals.hpp"
#include "glassey/lifespan_bounds.hpp"
#include "glassey/multipliers.hpp"
#include "glassey/radial_solver.hpp"
#include "glassey/report.hpp"
#include "glassey/special_functions.hpp"
#include "glassey/sweep_harness.hpp"

#ifndef GLASSEY_DEFAULT_CONFIG_DIR
#define GLASSEY_DEFAULT_CONFIG_DIR "configs"
#endif

namespace glassey::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitFail = 3;
inline constexpr int kExitInconclusive = 4;
inline constexpr const char* kVersion = "1.0.0";

/// Pre-blow-up window used for monitor pass rates: t <= 0.9 T.
inline constexpr double kPreBlowupFraction = 0.9;

inline void print_regime(std::ostream& out, const ModelParams& params) {
    const Regime regime = classify(params);
    out << "regime: " << to_string(regime.tag) << " (effective dimension " << format_shortest(regime.effective_dimension)
        << ")\n";
}

[[nodiscard]] inline Json regime_json(const ModelParams& params) {
    const Regime regime = classify(params);
    return Json{{"tag", std::string(to_string(regime.tag))}, {"effective_dimension", regime.effective_dimension}};
}

[[nodiscard]] inline Json data_json(const DataProfile& d) {
    return Json{{"support_radius", d.support_radius}, {"amplitude_f", d.amplitude_f}, {"amplitude_g", d.amplitude_g}};
}

[[nodiscard]] inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

/// Writes config-echo.txt and metadata.json; the timestamp lives only in the latter.
inline void write_run_files(const std::filesystem::path& dir, const RunConfig& config, const std::string& command,
                            const std::optional<std::string>& config_path) {
    ensure_directory(dir);
    write_text_file(dir / "config-echo.txt", config_echo(config));
    Json meta{{"command", command},
              {"version", kVersion},
              {"created_utc", utc_timestamp()},
              {"config_file", config_path ? Json(*config_path) : Json(nullptr)}};
    write_text_file(dir / "metadata.json", dump_json(meta));
}

// ---------------------------------------------------------------- bound

[[nodiscard]] inline Json bound_json(const RunConfig& config, std::ostream& out) {
    const ModelParams& params = config.params;
    const auto C1 = default_C1(params.n, params.R);
    const auto coeffs = ode_coefficients(params, config.data(), C1);
    const auto bound = solve_comparison_ode(coeffs);
    const Regime regime = classify(params);

    Json theorem = nullptr;
    if (regime.tag == RegimeTag::supercritical) {
        out << "no lifespan bound applies (supercritical); the ODE witness below is outside the theorem scope\n";
    } else {
        const auto e = theorem_exponent(params);
        theorem = Json{{"critical", e.critical}, {"power", e.power}};
        if (e.critical)
            out << "critical marker: T <= exp(C eps^-" << format_shortest(e.power) << ")\n";
        else
            out << "lifespan exponent: T <= C eps^" << format_shortest(e.power) << "\n";
    }
    out << "comparison ODE: A = " << format_shortest(coeffs.A) << ", k = " << format_shortest(coeffs.k)
        << ", H0 = " << format_shortest(coeffs.H0) << "\n";
    out << "witness: log(1+T) = " << format_shortest(bound.log1p_T) << ", T = " << format_shortest(bound.T_blowup)
        << "\n";
    return Json{{"command", "bound"},
                {"params", params},
                {"data", data_json(config.data())},
                {"regime", regime_json(params)},
                {"theorem_exponent", theorem},
                {"C1", C1.value},
                {"ode", Json{{"A", coeffs.A}, {"k", coeffs.k}, {"p", coeffs.p}, {"H0", coeffs.H0}}},
                {"bound", bound}};
}

// ---------------------------------------------------------------- solve

struct MonitorSummary {
    double t_cut = 0.0;
    double lemma_F1 = 1.0;
    double H_ode = 1.0;
    double mJ_ge_H = 1.0;
    bool H_nondecreasing = true;
    bool F1_positive = true;
    bool G_lower_bound = true;
};

[[nodiscard]] inline MonitorSummary summarize_monitors(const RunResult& run) {
    MonitorSummary s;
    const auto& trace = run.trace;
    s.t_cut = run.report.blow_up_time ? kPreBlowupFraction * *run.report.blow_up_time : run.report.final_time;
    s.lemma_F1 = pass_rate(trace.times, trace.flag_lemma_F1, s.t_cut);
    s.H_ode = pass_rate(trace.times, trace.flag_H_ode, s.t_cut);
    s.mJ_ge_H = pass_rate(trace.times, trace.flag_mJ_ge_H, s.t_cut);
    const double tol = MonitorTolerances{}.lemma_F1_rel * trace.eps * trace.C_fg;
    for (std::size_t j = 0; j < trace.size() && trace.times[j] <= s.t_cut; ++j) {
        if (j > 0 && trace.H[j] < trace.H[j - 1]) s.H_nondecreasing = false;
        if (!(trace.F1[j] > -tol)) s.F1_positive = false;
        if (!(trace.G[j] >= std::exp(-2.0 * trace.times[j]) * trace.G[0] - tol)) s.G_lower_bound = false;
    }
    return s;
}

[[nodiscard]] inline Json monitors_json(const MonitorSummary& s) {
    return Json{{"t_cut", s.t_cut},
                {"pass_rate_lemma_F1", s.lemma_F1},
                {"pass_rate_H_ode", s.H_ode},
                {"pass_rate_mJ_ge_H", s.mJ_ge_H},
                {"H_nondecreasing", s.H_nondecreasing},
                {"F1_positive", s.F1_positive},
                {"G_lower_bound", s.G_lower_bound}};
}

/// Weak-form residual on a short pre-blow-up window stored at every step.
[[nodiscard]] inline WeakResidualTerms weak_residual_window(const RunConfig& config, double window) {
    const ModelParams& params = config.params;
    const auto grid = RadialGrid::covering(params.n, config.dr, window, params.R);
    SolverOptions options = config.solver_options();
    options.snapshot_times.clear();
    options.store_states = true;
    const auto run = run_until_blowup(params, config.data(), grid, window, options);
    const auto phi = bump_test_function(params.R + window, 1.0);
    return weak_residual(run.states, phi, params, grid, config.source);
}

struct SolveOutput {
    RunResult run;
    RadialGrid grid;
    MonitorSummary monitors;
    Json json;
};

[[nodiscard]] inline SolveOutput solve_config(const RunConfig& config, std::ostream& out) {
    const ModelParams& params = config.params;
    SolveOutput result;
    result.grid = RadialGrid::covering(params.n, config.dr, config.t_final, params.R);
    const auto C1 = default_C1(params.n, params.R);
    result.run = run_until_blowup(params, config.data(), result.grid, config.t_final, config.solver_options(), C1);
    result.monitors = summarize_monitors(result.run);
    const auto& report = result.run.report;
    const auto bound = bound_from_run(params, config.data(), C1);
    const auto constants = data_constants(config.data(), params.n);

    out << "outcome: " << to_string(report.reason);
    if (report.blow_up_time) out << " at t = " << format_shortest(*report.blow_up_time);
    out << " after " << report.steps << " steps\n";
    out << "monitor pass rates (t <= " << format_shortest(result.monitors.t_cut)
        << "): lemma_F1 " << format_shortest(result.monitors.lemma_F1) << ", H_ode "
        << format_shortest(result.monitors.H_ode) << ", mJ_ge_H " << format_shortest(result.monitors.mJ_ge_H) << "\n";

    result.json = Json{{"command", "solve"},
                       {"params", params},
                       {"data", data_json(config.data())},
                       {"regime", regime_json(params)},
                       {"grid", Json{{"dr", result.grid.dr}, {"nodes", result.grid.nodes}, {"r_max", result.grid.r_max()}}},
                       {"t_final", config.t_final},
                       {"report", blowup_report_json(report)},
                       {"C1", Json{{"value", C1.value}, {"q_max", C1.q_max}, {"t_grid_max", C1.t_grid_max}}},
                       {"constants", Json{{"C_f0", constants.C_f0}, {"C_0g", constants.C_0g}, {"C_fg", constants.C_fg()}}},
                       {"bound_witness", bound},
                       {"monitors", monitors_json(result.monitors)},
                       {"samples", result.run.trace.size()}};

    if (config.check_weak_residual) {
        const double horizon = report.blow_up_time ? 0.5 * *report.blow_up_time : config.t_final;
        const double window = std::min(1.0, horizon);
        const auto terms = weak_residual_window(config, window);
        out << "weak residual on [0, " << format_shortest(window) << "]: " << format_shortest(terms.residual) << "\n";
        result.json["weak_residual"] = Json{{"window", window},
                                            {"residual", terms.residual},
                                            {"velocity_now", terms.velocity_now},
                                            {"velocity_start", terms.velocity_start},
                                            {"flux", terms.flux},
                                            {"damping", terms.damping},
                                            {"source", terms.source}};
    }
    return result;
}

inline void write_solve_files(const SolveOutput& s, const std::filesystem::path& dir) {
    ensure_directory(dir);
    write_text_file(dir / "result.json", dump_json(s.json));
    write_text_file(dir / "trace.csv", trace_csv(s.run.trace));
    for (const auto& snap : s.run.snapshots)
        write_text_file(dir / ("snapshot_t" + format_shortest(snap.t) + ".csv"), state_csv(s.grid, snap));
}

// ---------------------------------------------------------------- sweep

inline void print_sweep(std::ostream& out, const SweepResult& r) {
    out << std::left << std::setw(12) << "eps" << std::setw(22) << "T" << std::setw(22) << "T_refined"
        << "reason\n";
    for (const auto& rec : r.records) {
        auto opt = [](const std::optional<double>& x) { return x ? format_shortest(*x) : std::string("-"); };
        out << std::left << std::setw(12) << format_shortest(rec.eps) << std::setw(22) << opt(rec.T_numeric)
            << std::setw(22) << opt(rec.T_refined) << rec.reason << "\n";
    }
    if (r.kind == SweepKind::power_law)
        out << "fitted slope " << format_shortest(r.fitted_slope) << " +/- " << format_shortest(r.slope_stderr)
            << ", theorem slope " << format_shortest(r.theorem_slope) << ", tolerance "
            << format_shortest(r.slope_tolerance) << "\n";
    else
        out << "ln T vs eps^-(p-1): slope " << format_shortest(r.fitted_slope) << ", R^2 "
            << format_shortest(r.r_squared) << " (form-consistency check only)\n";
    out << "verdict: " << to_string(r.verdict);
    if (!r.note.empty()) out << " (" << r.note << ")";
    out << "\n";
}

[[nodiscard]] inline int verdict_exit_code(Verdict v) {
    switch (v) {
        case Verdict::pass: return kExitOk;
        case Verdict::fail: return kExitFail;
        case Verdict::inconclusive: return kExitInconclusive;
    }
    return kExitInternal;
}

// ---------------------------------------------------------------- check

/// Largest r - (t + R + 2dr) over snapshots, r being the outermost node with |u| > 1e-8 max|u|.
[[nodiscard]] inline double support_excess(const std::vector<RadialState>& snapshots, const RadialGrid& grid, double R) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& snap : snapshots) {
        const double umax = snap.max_abs_u();
        int last = 0;
        for (int i = 0; i < static_cast<int>(snap.u.size()); ++i)
            if (std::abs(snap.u[i]) > 1e-8 * umax) last = i;
        worst = std::max(worst, grid.r(last) - (snap.t + R + 2.0 * grid.dr));
    }
    return worst;
}

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
    bool informational = false;  ///< printed as INFO, never gates the exit code
};

/// Invariant checks on one solve config; returns one line per check.
[[nodiscard]] inline std::vector<CheckLine> run_checks(RunConfig config, std::ostream& out) {
    std::vector<CheckLine> lines;
    auto add = [&](std::string name, bool pass, std::string detail) {
        lines.push_back({std::move(name), pass, std::move(detail), false});
    };
    const ModelParams& params = config.params;

    // Support containment is checked on 20 snapshots spread over the run.
    config.snapshot_times.clear();
    for (int k = 1; k <= 20; ++k) config.snapshot_times.push_back(config.t_final * k / 20.0);
    config.check_weak_residual = true;
    const auto s = solve_config(config, out);
    const auto& m = s.monitors;
    add("lemma_F1 pass rate >= 0.99", m.lemma_F1 >= 0.99, format_shortest(m.lemma_F1));
    add("H-ODE pass rate >= 0.99", m.H_ode >= 0.99, format_shortest(m.H_ode));
    add("mJ >= H pass rate >= 0.99", m.mJ_ge_H >= 0.99, format_shortest(m.mJ_ge_H));
    add("H nondecreasing", m.H_nondecreasing, "");
    add("F1 > 0 before blow-up", m.F1_positive, "");
    add("G(t) >= exp(-2t) G(0)", m.G_lower_bound, "");

    // Strict containment at the 1e-8 level is reported; the gate is that the
    // dispersive precursor ahead of t + R narrows under 2x refinement.
    const double coarse_excess = support_excess(s.run.snapshots, s.grid, params.R);
    RunConfig fine_config = config;
    fine_config.dr *= 0.5;
    fine_config.check_weak_residual = false;
    std::ostringstream sink;
    const auto fine = solve_config(fine_config, sink);
    const double fine_excess = support_excess(fine.run.snapshots, fine.grid, params.R);
    lines.push_back({"support within t + R + 2dr", coarse_excess <= 0.0,
                     "largest excess " + format_shortest(std::max(coarse_excess, 0.0)) + " over " +
                         std::to_string(s.run.snapshots.size()) + " snapshots",
                     true});
    add("support precursor narrows under refinement", fine_excess <= 0.0 || fine_excess < coarse_excess,
        "excess " + format_shortest(std::max(coarse_excess, 0.0)) + " -> " + format_shortest(std::max(fine_excess, 0.0)));

    const double wr = s.json["weak_residual"]["residual"].get<double>();
    add("weak residual < 1e-2", wr < 1e-2, format_shortest(wr));

    std::vector<double> r_grid;
    for (int i = 0; i <= 99; ++i) r_grid.push_back(0.1 + 9.9 * i / 99.0);
    const double psi_res = check_psi_identities(params.n, r_grid, 1e-3);
    add("psi identity residual < 1e-5", psi_res < 1e-5, format_shortest(psi_res));

    std::vector<double> t_grid;
    for (int i = 1; i <= 100; ++i) t_grid.push_back(0.5 * i);
    const double md = check_log_derivative(Multiplier::for_params(params), t_grid, 1e-4);
    add("multiplier log-derivative residual < 1e-7", md < 1e-7, format_shortest(md));
    return lines;
}

// ---------------------------------------------------------------- front end

/// Parses argv and dispatches. Output goes to `out`, diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Blow-up lifespan laboratory for u_tt - Lu + mu (1+t)^-beta u_t = |u_t|^p"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    struct SubState {
        std::string config_path;
        std::map<std::string, std::string> values;
        std::map<std::string, bool> flags;
    };
    std::map<std::string, SubState> states;
    std::string check_config_dir = GLASSEY_DEFAULT_CONFIG_DIR;

    auto make_sub = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        auto& st = states[name];
        sub->add_option("config", st.config_path, "key=value config file");
        for (const auto& field : config_fields()) {
            std::string names = "--" + field.key;
            std::string dashed = field.key;
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            if (dashed != field.key) names += ",--" + dashed;
            if (field.is_flag) {
                sub->add_flag(names, st.flags[field.key], field.help);
            } else {
                sub->add_option(names, st.values[field.key], field.help);
            }
        }
        return sub;
    };
    auto* bound_cmd = make_sub("bound", "closed-form lifespan bound and theorem exponent");
    auto* solve_cmd = make_sub("solve", "integrate one run until blow-up or t_final");
    auto* sweep_cmd = make_sub("sweep", "eps-sweep with log-log fit (or --critical form check)");
    auto* check_cmd = make_sub("check", "invariant suite on the shipped demo configs (or on the given config)");
    check_cmd->add_option("--config-dir", check_config_dir, "directory holding demo_*.cfg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    auto& st = states[command];

    auto resolve = [&](const std::string& path) {
        RunConfig config;
        if (!path.empty()) config = config_from_text(read_text_file(path), path);
        for (const auto& field : config_fields()) {
            const std::string names = "--" + field.key;
            if (chosen->get_option(names)->count() == 0) continue;
            if (field.is_flag) apply_setting(config, field.key, st.flags[field.key] ? "true" : "false");
            else apply_setting(config, field.key, st.values[field.key]);
        }
        config.validate();
        return config;
    };
    const std::optional<std::string> config_path =
        st.config_path.empty() ? std::nullopt : std::optional<std::string>(st.config_path);

    try {
        if (chosen == bound_cmd) {
            const RunConfig config = resolve(st.config_path);
            print_regime(out, config.params);
            const Json j = bound_json(config, out);
            out << dump_json(j);
            if (chosen->get_option("--out")->count() > 0 || config_path) {
                write_run_files(config.out_dir, config, command, config_path);
                write_text_file(std::filesystem::path(config.out_dir) / "result.json", dump_json(j));
            }
            return kExitOk;
        }
        if (chosen == solve_cmd) {
            const RunConfig config = resolve(st.config_path);
            print_regime(out, config.params);
            const auto s = solve_config(config, out);
            write_run_files(config.out_dir, config, command, config_path);
            write_solve_files(s, config.out_dir);
            out << "wrote " << config.out_dir << "\n";
            return kExitOk;
        }
        if (chosen == sweep_cmd) {
            const RunConfig config = resolve(st.config_path);
            print_regime(out, config.params);
            const SweepPlan plan = config.sweep_plan();
            validate_plan(plan, config.critical ? SweepKind::critical : SweepKind::power_law);
            const auto result = config.critical ? run_critical_sweep(plan) : run_sweep(plan);
            print_sweep(out, result);
            write_run_files(config.out_dir, config, command, config_path);
            emit_report(result, config.out_dir);
            out << "wrote " << config.out_dir << "\n";
            return verdict_exit_code(result.verdict);
        }
        if (chosen == check_cmd) {
            std::vector<std::string> paths;
            if (config_path) {
                paths.push_back(*config_path);
            } else {
                std::error_code ec;
                for (const auto& entry : std::filesystem::directory_iterator(check_config_dir, ec)) {
                    const auto name = entry.path().filename().string();
                    if (name.rfind("demo_", 0) == 0 && entry.path().extension() == ".cfg")
                        paths.push_back(entry.path().string());
                }
                if (ec) throw ValidationError("cannot list config directory '" + check_config_dir + "'");
                std::sort(paths.begin(), paths.end());
                if (paths.empty()) throw ValidationError("no demo_*.cfg files in '" + check_config_dir + "'");
            }
            bool all_pass = true;
            for (const auto& path : paths) {
                const RunConfig config = resolve(path);
                out << "== " << path << "\n";
                print_regime(out, config.params);
                for (const auto& line : run_checks(config, out)) {
                    out << (line.informational ? "[INFO] " : line.pass ? "[PASS] " : "[FAIL] ") << line.name;
                    if (!line.detail.empty()) out << ": " << line.detail;
                    out << "\n";
                    if (!line.informational) all_pass = all_pass && line.pass;
                }
            }
            return all_pass ? kExitOk : kExitFail;
        }
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace glassey::cli

#endif  // GLASSEY_CLI_HPP
