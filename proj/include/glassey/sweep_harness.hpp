/**
 * @file sweep_harness.hpp
 * @brief ε-sweeps of the radial solver, log-log fits of the blow-up times
 *        and comparison with the lifespan-bound exponents.
 */
#ifndef GLASSEY_SWEEP_HARNESS_HPP
#define GLASSEY_SWEEP_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "glassey/core_model.hpp"
#include "glassey/lifespan_bounds.hpp"
#include "glassey/radial_solver.hpp"
#include "glassey/special_functions.hpp"

namespace glassey {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
[[nodiscard]] inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("fit_line: x and y differ in length");
    if (x.size() < 2) throw ValidationError("fit_line needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw ValidationError("fit_line: x values are all equal");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += e * e;
    }
    fit.slope_stderr = x.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
    fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return fit;
}

enum class SweepKind { power_law, critical };
enum class Verdict { pass, fail, inconclusive };

[[nodiscard]] inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}
[[nodiscard]] inline std::string_view to_string(SweepKind k) {
    return k == SweepKind::critical ? "critical" : "power_law";
}

struct SweepPlan {
    ModelParams params_base;          ///< eps is ignored
    DataProfile data = make_bump_data(1.0, 1.0, 1.0);
    std::vector<double> eps_values;   ///< strictly decreasing
    bool repeat_refined = true;       ///< rerun every ε at dr/2
    double slope_tolerance = 0.3;
    double refinement_tolerance = 0.05;
    double t_budget = 400.0;          ///< largest simulated time per run
    double dr_max = 0.005;
    int points_per_T = 4000;          ///< dr = min(dr_max, T_pred / points_per_T)
    double critical_min_r_squared = 0.95;
    int jobs = 1;
    SolverOptions solver;
};

struct EpsRecord {
    double eps = 0.0;
    double dr = 0.0;
    double t_final = 0.0;
    std::optional<double> T_numeric;
    std::optional<double> T_refined;
    std::optional<double> T_threshold_1e4;   ///< same run, threshold 10^4 ε
    std::optional<double> T_bound_witness;   ///< comparison-ODE blow-up time (absent when it overflows)
    double log1p_T_bound = 0.0;
    std::optional<double> refinement_shift;  ///< |T - T_refined| / T_refined
    std::string reason;
    std::int64_t steps = 0;

    bool operator==(const EpsRecord&) const = default;
};

struct SweepResult {
    SweepKind kind = SweepKind::power_law;
    ModelParams params_base;
    std::vector<EpsRecord> records;   ///< sorted by decreasing ε
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double theorem_slope = 0.0;       ///< power of ε (power law) or power inside exp (critical)
    std::optional<double> slope_threshold_1e4;
    double slope_tolerance = 0.3;
    int points_fitted = 0;
    Verdict verdict = Verdict::inconclusive;
    std::string note;

    bool operator==(const SweepResult&) const = default;
};

namespace detail {

struct RunSpec {
    double eps = 0.0;
    double dr = 0.0;
    double t_final = 0.0;
    double sample_interval = 0.0;
};

struct RunOutcome {
    std::optional<double> T;
    std::optional<double> T_1e4;
    std::string reason;
    std::int64_t steps = 0;
};

inline RunOutcome run_one(const SweepPlan& plan, const RunSpec& spec, const C1Estimate& C1) {
    ModelParams params = plan.params_base;
    params.eps = spec.eps;
    const auto grid = RadialGrid::covering(params.n, spec.dr, spec.t_final, params.R);
    SolverOptions options = plan.solver;
    options.sample_interval = spec.sample_interval;
    options.store_states = false;
    const auto result = run_until_blowup(params, plan.data, grid, spec.t_final, options, C1);
    RunOutcome out;
    out.T = result.report.blow_up_time;
    if (out.T) out.T_1e4 = result.report.time_at_threshold(4).value_or(*out.T);
    out.reason = std::string(to_string(result.report.reason));
    out.steps = result.report.steps;
    return out;
}

/// Runs every task on at most `jobs` threads; results land at their task index.
template <class Task, class Result, class Fn>
void parallel_map(const std::vector<Task>& tasks, std::vector<Result>& results, int jobs, Fn&& fn) {
    results.assign(tasks.size(), Result{});
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                results[i] = fn(tasks[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Checks plan consistency; `kind` selects the regime the plan must be in.
inline void validate_plan(const SweepPlan& plan, SweepKind kind) {
    ModelParams probe = plan.params_base;
    probe.eps = 1.0;
    probe.validate();
    plan.data.validate(probe.R);
    plan.solver.validate();
    const std::size_t min_points = kind == SweepKind::critical ? 3 : 5;
    if (plan.eps_values.size() < min_points)
        throw ValidationError(kind == SweepKind::critical ? "critical sweep needs at least 3 eps values"
                                                          : "sweep needs at least 5 eps values");
    for (std::size_t i = 0; i < plan.eps_values.size(); ++i) {
        if (!(plan.eps_values[i] > 0.0)) throw ValidationError("eps values must be > 0");
        if (i > 0 && !(plan.eps_values[i] < plan.eps_values[i - 1]))
            throw ValidationError("eps values must be strictly decreasing");
    }
    if (!(plan.slope_tolerance > 0.0)) throw ValidationError("slope tolerance must be > 0");
    if (!(plan.t_budget > 0.0)) throw ValidationError("t_budget must be > 0");
    if (!(plan.dr_max > 0.0) || plan.points_per_T < 10) throw ValidationError("invalid grid policy");
    if (plan.jobs < 1) throw ValidationError("jobs must be >= 1");
    const RegimeTag tag = classify(probe).tag;
    if (kind == SweepKind::power_law && tag != RegimeTag::subcritical)
        throw ValidationError("power-law sweep requires subcritical parameters");
    if (kind == SweepKind::critical && tag != RegimeTag::critical)
        throw ValidationError("critical sweep requires critical parameters");
}

namespace detail {

inline SweepResult execute_sweep(const SweepPlan& plan, SweepKind kind) {
    validate_plan(plan, kind);
    const ModelParams& base = plan.params_base;
    const C1Estimate C1 = default_C1(base.n, base.R);

    std::vector<RunSpec> specs;
    std::vector<EpsRecord> records;
    for (double eps : plan.eps_values) {
        ModelParams params = base;
        params.eps = eps;
        const auto witness = bound_from_run(params, plan.data, C1);
        EpsRecord rec;
        rec.eps = eps;
        rec.log1p_T_bound = witness.log1p_T;
        if (witness.finite() && std::isfinite(witness.T_blowup)) rec.T_bound_witness = witness.T_blowup;
        const double T_pred = std::min(witness.T_blowup, plan.t_budget);
        rec.dr = std::min(plan.dr_max, T_pred / plan.points_per_T);
        rec.t_final = std::min(plan.t_budget, 1.5 * witness.T_blowup + 2.0 * base.R);
        records.push_back(rec);
        specs.push_back({eps, rec.dr, rec.t_final, rec.t_final / 4000.0});
    }
    const std::size_t coarse_count = specs.size();
    if (plan.repeat_refined) {
        for (std::size_t i = 0; i < coarse_count; ++i) {
            RunSpec fine = specs[i];
            fine.dr *= 0.5;
            specs.push_back(fine);
        }
    }
    std::vector<RunOutcome> outcomes;
    parallel_map(specs, outcomes, plan.jobs, [&](const RunSpec& s) { return run_one(plan, s, C1); });

    for (std::size_t i = 0; i < coarse_count; ++i) {
        auto& rec = records[i];
        rec.T_numeric = outcomes[i].T;
        rec.T_threshold_1e4 = outcomes[i].T_1e4;
        rec.reason = outcomes[i].reason;
        rec.steps = outcomes[i].steps;
        if (plan.repeat_refined) {
            rec.T_refined = outcomes[coarse_count + i].T;
            if (rec.T_numeric && rec.T_refined)
                rec.refinement_shift = std::abs(*rec.T_numeric - *rec.T_refined) / *rec.T_refined;
        }
    }

    SweepResult result;
    result.kind = kind;
    result.params_base = base;
    result.records = records;
    result.slope_tolerance = plan.slope_tolerance;
    const auto theorem = theorem_exponent([&] {
        ModelParams p = base;
        p.eps = plan.eps_values.front();
        return p;
    }());
    result.theorem_slope = theorem.power;

    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y4;
    bool refinement_ok = true;
    std::size_t blown = 0;
    for (const auto& rec : records) {
        if (!rec.T_numeric) continue;
        ++blown;
        if (plan.repeat_refined && !(rec.refinement_shift && *rec.refinement_shift < plan.refinement_tolerance))
            refinement_ok = false;
        if (kind == SweepKind::power_law) {
            x.push_back(std::log(rec.eps));
            y.push_back(std::log(*rec.T_numeric));
            y4.push_back(std::log(*rec.T_threshold_1e4));
        } else {
            x.push_back(std::pow(rec.eps, -(base.p - 1.0)));
            y.push_back(std::log(*rec.T_numeric));
        }
    }
    result.points_fitted = static_cast<int>(blown);

    if (kind == SweepKind::power_law) {
        if (blown < records.size()) {
            result.verdict = Verdict::inconclusive;
            result.note = "some runs reached t_final without blow-up; raise t_budget";
            if (blown >= 2) {
                const auto fit = fit_line(x, y);
                result.fitted_slope = fit.slope;
                result.slope_stderr = fit.slope_stderr;
                result.intercept = fit.intercept;
                result.r_squared = fit.r_squared;
            }
            return result;
        }
        const auto fit = fit_line(x, y);
        result.fitted_slope = fit.slope;
        result.slope_stderr = fit.slope_stderr;
        result.intercept = fit.intercept;
        result.r_squared = fit.r_squared;
        result.slope_threshold_1e4 = fit_line(x, y4).slope;
        const bool slope_ok = std::abs(fit.slope - result.theorem_slope) <= plan.slope_tolerance;
        if (plan.repeat_refined && std::any_of(records.begin(), records.end(),
                                               [](const EpsRecord& r) { return !r.T_refined; })) {
            result.verdict = Verdict::inconclusive;
            result.note = "a refined run reached t_final without blow-up";
            return result;
        }
        result.verdict = slope_ok && refinement_ok ? Verdict::pass : Verdict::fail;
        if (!slope_ok) result.note = "fitted slope differs from the theorem exponent beyond tolerance";
        else if (!refinement_ok) result.note = "a blow-up time moved by 5% or more under refinement";
        return result;
    }

    // Critical: log T must be linear in ε^{-(p-1)} with positive slope.
    if (blown < 4) {
        result.verdict = Verdict::inconclusive;
        result.note = "fewer than 4 eps values blew up within the budget";
        if (blown >= 2) {
            const auto fit = fit_line(x, y);
            result.fitted_slope = fit.slope;
            result.intercept = fit.intercept;
            result.r_squared = fit.r_squared;
            result.slope_stderr = fit.slope_stderr;
        }
        return result;
    }
    const auto fit = fit_line(x, y);
    result.fitted_slope = fit.slope;
    result.slope_stderr = fit.slope_stderr;
    result.intercept = fit.intercept;
    result.r_squared = fit.r_squared;
    const bool form_ok = fit.slope > 0.0 && fit.r_squared >= plan.critical_min_r_squared;
    result.verdict = form_ok && refinement_ok ? Verdict::pass : Verdict::fail;
    result.note = "form-consistency check only: log T against eps^{-(p-1)}";
    if (!refinement_ok) result.note += "; a blow-up time moved by 5% or more under refinement";
    return result;
}

}  // namespace detail

/// Subcritical sweep: fits log T against log ε and compares with the theorem exponent.
[[nodiscard]] inline SweepResult run_sweep(const SweepPlan& plan) {
    return detail::execute_sweep(plan, SweepKind::power_law);
}

/// Critical sweep: checks that log T is linear in ε^{-(p-1)} (R² >= 0.95, positive slope).
[[nodiscard]] inline SweepResult run_critical_sweep(const SweepPlan& plan) {
    return detail::execute_sweep(plan, SweepKind::critical);
}

}  // namespace glassey

#endif  // GLASSEY_SWEEP_HARNESS_HPP
