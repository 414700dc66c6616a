/**
 * @file report.hpp
 * @brief JSON / CSV / SVG output for sweep results, plus trace and snapshot CSV writers.
 *
 * Non-finite and absent values serialize as JSON null. Numbers use the shortest
 * representation that parses back to the same double.
 */
#ifndef GLASSEY_REPORT_HPP
#define GLASSEY_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "glassey/core_model.hpp"
#include "glassey/functionals.hpp"
#include "glassey/lifespan_bounds.hpp"
#include "glassey/radial_solver.hpp"
#include "glassey/sweep_harness.hpp"

namespace glassey {

using Json = nlohmann::json;

/// printf-style %.17g, used by the CSV and SVG writers.
[[nodiscard]] inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Shortest text that parses back to the same double.
[[nodiscard]] inline std::string format_shortest(double x) {
    if (!std::isfinite(x)) return format_double(x);
    return Json(x).dump();
}

namespace detail {

inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
inline Json optional_or_null(const std::optional<double>& x) { return x ? number_or_null(*x) : Json(nullptr); }

inline std::optional<double> read_optional(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}
inline double read_or_inf(const Json& j, const char* key) {
    const auto v = read_optional(j, key);
    return v ? *v : std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline void to_json(Json& j, const ModelParams& p) {
    j = Json{{"n", p.n}, {"p", p.p}, {"mu", p.mu}, {"beta", p.beta}, {"R", p.R}, {"eps", p.eps}};
}
inline void from_json(const Json& j, ModelParams& p) {
    j.at("n").get_to(p.n);
    j.at("p").get_to(p.p);
    j.at("mu").get_to(p.mu);
    j.at("beta").get_to(p.beta);
    j.at("R").get_to(p.R);
    j.at("eps").get_to(p.eps);
}

inline void to_json(Json& j, const LifespanBound& b) {
    j = Json{{"regime", std::string(to_string(b.regime))},
             {"T_blowup", detail::number_or_null(b.T_blowup)},
             {"log1p_T", detail::number_or_null(b.log1p_T)},
             {"exponent_in_eps", detail::optional_or_null(b.exponent_in_eps)},
             {"outside_theorem_scope", b.outside_theorem_scope}};
}
inline void from_json(const Json& j, LifespanBound& b) {
    const auto regime = j.at("regime").get<std::string>();
    if (regime == "subcritical") b.regime = DecayRegime::subcritical;
    else if (regime == "critical") b.regime = DecayRegime::critical;
    else if (regime == "supercritical") b.regime = DecayRegime::supercritical;
    else throw ValidationError("unknown decay regime '" + regime + "'");
    b.T_blowup = detail::read_or_inf(j, "T_blowup");
    b.log1p_T = detail::read_or_inf(j, "log1p_T");
    b.exponent_in_eps = detail::read_optional(j, "exponent_in_eps");
    j.at("outside_theorem_scope").get_to(b.outside_theorem_scope);
}

inline void to_json(Json& j, const EpsRecord& r) {
    j = Json{{"eps", r.eps},
             {"dr", r.dr},
             {"t_final", r.t_final},
             {"T_numeric", detail::optional_or_null(r.T_numeric)},
             {"T_refined", detail::optional_or_null(r.T_refined)},
             {"T_threshold_1e4", detail::optional_or_null(r.T_threshold_1e4)},
             {"T_bound_witness", detail::optional_or_null(r.T_bound_witness)},
             {"log1p_T_bound", detail::number_or_null(r.log1p_T_bound)},
             {"refinement_shift", detail::optional_or_null(r.refinement_shift)},
             {"reason", r.reason},
             {"steps", r.steps}};
}
inline void from_json(const Json& j, EpsRecord& r) {
    j.at("eps").get_to(r.eps);
    j.at("dr").get_to(r.dr);
    j.at("t_final").get_to(r.t_final);
    r.T_numeric = detail::read_optional(j, "T_numeric");
    r.T_refined = detail::read_optional(j, "T_refined");
    r.T_threshold_1e4 = detail::read_optional(j, "T_threshold_1e4");
    r.T_bound_witness = detail::read_optional(j, "T_bound_witness");
    r.log1p_T_bound = detail::read_or_inf(j, "log1p_T_bound");
    r.refinement_shift = detail::read_optional(j, "refinement_shift");
    j.at("reason").get_to(r.reason);
    j.at("steps").get_to(r.steps);
}

inline void to_json(Json& j, const SweepResult& s) {
    j = Json{{"kind", std::string(to_string(s.kind))},
             {"params_base", s.params_base},
             {"records", s.records},
             {"fitted_slope", s.fitted_slope},
             {"slope_stderr", s.slope_stderr},
             {"intercept", s.intercept},
             {"r_squared", s.r_squared},
             {"theorem_slope", s.theorem_slope},
             {"slope_threshold_1e4", detail::optional_or_null(s.slope_threshold_1e4)},
             {"slope_tolerance", s.slope_tolerance},
             {"points_fitted", s.points_fitted},
             {"verdict", std::string(to_string(s.verdict))},
             {"note", s.note}};
}
inline void from_json(const Json& j, SweepResult& s) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "power_law") s.kind = SweepKind::power_law;
    else if (kind == "critical") s.kind = SweepKind::critical;
    else throw ValidationError("unknown sweep kind '" + kind + "'");
    j.at("params_base").get_to(s.params_base);
    j.at("records").get_to(s.records);
    j.at("fitted_slope").get_to(s.fitted_slope);
    j.at("slope_stderr").get_to(s.slope_stderr);
    j.at("intercept").get_to(s.intercept);
    j.at("r_squared").get_to(s.r_squared);
    j.at("theorem_slope").get_to(s.theorem_slope);
    s.slope_threshold_1e4 = detail::read_optional(j, "slope_threshold_1e4");
    j.at("slope_tolerance").get_to(s.slope_tolerance);
    j.at("points_fitted").get_to(s.points_fitted);
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict == "pass") s.verdict = Verdict::pass;
    else if (verdict == "fail") s.verdict = Verdict::fail;
    else if (verdict == "inconclusive") s.verdict = Verdict::inconclusive;
    else throw ValidationError("unknown verdict '" + verdict + "'");
    j.at("note").get_to(s.note);
}

/// Report summary of a solver run (history arrays omitted; see the trace CSV).
[[nodiscard]] inline Json blowup_report_json(const BlowupReport& r) {
    Json crossings = Json::array();
    for (const auto& c : r.decade_crossing) crossings.push_back(detail::optional_or_null(c));
    return Json{{"blow_up_time", detail::optional_or_null(r.blow_up_time)},
                {"reason", std::string(to_string(r.reason))},
                {"steps", r.steps},
                {"final_time", r.final_time},
                {"threshold_crossings", crossings}};
}

[[nodiscard]] inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

/// Writes `content` to `path`; failures carry the path.
inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());
}

[[nodiscard]] inline std::string sweep_csv(const SweepResult& s) {
    auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
    std::ostringstream out;
    out << "eps,dr,t_final,T_numeric,T_refined,refinement_shift,T_threshold_1e4,T_bound_witness,log1p_T_bound,reason,"
           "steps\n";
    for (const auto& r : s.records) {
        out << format_double(r.eps) << ',' << format_double(r.dr) << ',' << format_double(r.t_final) << ','
            << opt(r.T_numeric) << ',' << opt(r.T_refined) << ',' << opt(r.refinement_shift) << ','
            << opt(r.T_threshold_1e4) << ',' << opt(r.T_bound_witness) << ',' << format_double(r.log1p_T_bound)
            << ',' << r.reason << ',' << r.steps << '\n';
    }
    return out.str();
}

/**
 * @brief Scatter of the fitted points with the OLS line and a theorem guide.
 *
 * Power-law sweeps plot log10 T against log10 ε; the guide has the theorem
 * slope and passes through the centroid. Critical sweeps plot ln T against
 * ε^{-(p-1)} and show only the fit.
 */
[[nodiscard]] inline std::string scaling_svg(const SweepResult& s) {
    const bool critical = s.kind == SweepKind::critical;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : s.records) {
        if (!r.T_numeric) continue;
        if (critical) {
            xs.push_back(std::pow(r.eps, -(s.params_base.p - 1.0)));
            ys.push_back(std::log(*r.T_numeric));
        } else {
            xs.push_back(std::log10(r.eps));
            ys.push_back(std::log10(*r.T_numeric));
        }
    }
    constexpr double W = 640, H = 480, L = 70, Rm = 20, T = 40, B = 60;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    out << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    const std::string title = critical ? "ln T vs eps^-(p-1)" : "log10 T vs log10 eps";
    out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << title
        << "</text>\n";
    if (xs.empty()) {
        out << "<text x=\"320\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\">no blow-up recorded</text>\n";
        out << "</svg>\n";
        return out.str();
    }
    double x0 = *std::min_element(xs.begin(), xs.end());
    double x1 = *std::max_element(xs.begin(), xs.end());
    double y0 = *std::min_element(ys.begin(), ys.end());
    double y1 = *std::max_element(ys.begin(), ys.end());
    if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
    if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
    const double padx = 0.08 * (x1 - x0);
    const double pady = 0.08 * (y1 - y0);
    x0 -= padx; x1 += padx; y0 -= pady; y1 += pady;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - Rm); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - Rm << "\" height=\"" << H - T - B
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0;
        const double yv = y0 + (y1 - y0) * k / 4.0;
        out << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << H - B + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(xv) << "</text>\n";
        out << "<text x=\"" << L - 6 << "\" y=\"" << fmt(py(yv) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(yv) << "</text>\n";
    }
    out << "<text x=\"" << fmt((L + W - Rm) / 2) << "\" y=\"" << H - 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << (critical ? "eps^-(p-1)" : "log10 eps") << "</text>\n";
    out << "<text x=\"18\" y=\"" << fmt((T + H - B) / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 18 " << fmt((T + H - B) / 2) << ")\">"
        << (critical ? "ln T" : "log10 T") << "</text>\n";

    auto line = [&](double slope, double icept, const char* colour, const char* dash) {
        out << "<line x1=\"" << fmt(px(x0)) << "\" y1=\"" << fmt(py(icept + slope * x0)) << "\" x2=\"" << fmt(px(x1))
            << "\" y2=\"" << fmt(py(icept + slope * x1)) << "\" stroke=\"" << colour << "\" stroke-width=\"1.5\""
            << dash << " clip-path=\"url(#plot)\"/>\n";
    };
    out << "<clipPath id=\"plot\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - Rm << "\" height=\""
        << H - T - B << "\"/></clipPath>\n";
    // The fit is done in natural logs; convert to the plotted axes.
    const double ln10 = std::log(10.0);
    if (s.points_fitted >= 2) {
        if (critical) line(s.fitted_slope, s.intercept, "steelblue", "");
        else line(s.fitted_slope, s.intercept / ln10, "steelblue", "");
    }
    if (!critical) {
        double cx = 0.0;
        double cy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            cx += xs[i];
            cy += ys[i];
        }
        cx /= static_cast<double>(xs.size());
        cy /= static_cast<double>(xs.size());
        line(s.theorem_slope, cy - s.theorem_slope * cx, "firebrick", " stroke-dasharray=\"6 4\"");
    }
    for (std::size_t i = 0; i < xs.size(); ++i)
        out << "<circle cx=\"" << fmt(px(xs[i])) << "\" cy=\"" << fmt(py(ys[i])) << "\" r=\"4\" fill=\"black\"/>\n";

    out << "<text x=\"" << L + 10 << "\" y=\"" << T + 18 << "\" font-family=\"sans-serif\" font-size=\"12\" "
        << "fill=\"steelblue\">fit slope " << fmt(s.fitted_slope) << "</text>\n";
    if (!critical)
        out << "<text x=\"" << L + 10 << "\" y=\"" << T + 34 << "\" font-family=\"sans-serif\" font-size=\"12\" "
            << "fill=\"firebrick\">theorem slope " << fmt(s.theorem_slope) << "</text>\n";
    else
        out << "<text x=\"" << L + 10 << "\" y=\"" << T + 34 << "\" font-family=\"sans-serif\" font-size=\"12\">R^2 "
            << fmt(s.r_squared) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

struct ReportFormats {
    bool json = true;
    bool csv = true;
    bool svg = true;
};

/// Writes result.json, sweep.csv and scaling.svg under `dir`. Nothing is written for an empty result.
inline void emit_report(const SweepResult& result, const std::filesystem::path& dir, ReportFormats formats = {}) {
    if (result.records.empty()) throw ValidationError("cannot emit a report for an empty sweep result");
    // Render everything before touching the filesystem.
    const std::string json = formats.json ? dump_json(Json(result)) : std::string();
    const std::string csv = formats.csv ? sweep_csv(result) : std::string();
    const std::string svg = formats.svg ? scaling_svg(result) : std::string();
    ensure_directory(dir);
    if (formats.json) write_text_file(dir / "result.json", json);
    if (formats.csv) write_text_file(dir / "sweep.csv", csv);
    if (formats.svg) write_text_file(dir / "scaling.svg", svg);
}

/// Trace CSV. Column order: t,F1,G,H,max_ut,flag_lemma_F1,flag_H_ode,flag_mJ_ge_H.
[[nodiscard]] inline std::string trace_csv(const FunctionalTrace& trace) {
    std::ostringstream out;
    out << "t,F1,G,H,max_ut,flag_lemma_F1,flag_H_ode,flag_mJ_ge_H\n";
    for (std::size_t j = 0; j < trace.size(); ++j) {
        out << format_double(trace.times[j]) << ',' << format_double(trace.F1[j]) << ',' << format_double(trace.G[j])
            << ',' << format_double(trace.H[j]) << ',' << format_double(trace.max_ut[j]) << ','
            << int(trace.flag_lemma_F1[j]) << ',' << int(trace.flag_H_ode[j]) << ',' << int(trace.flag_mJ_ge_H[j])
            << '\n';
    }
    return out.str();
}

/// Snapshot CSV with columns r,u,v.
[[nodiscard]] inline std::string state_csv(const RadialGrid& grid, const RadialState& state) {
    std::ostringstream out;
    out << "r,u,v\n";
    for (std::size_t i = 0; i < state.u.size(); ++i)
        out << format_double(grid.r(static_cast<int>(i))) << ',' << format_double(state.u[i]) << ','
            << format_double(state.v[i]) << '\n';
    return out.str();
}

}  // namespace glassey

#endif  // GLASSEY_REPORT_HPP
