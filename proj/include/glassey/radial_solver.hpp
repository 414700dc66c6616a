/**
 * @file radial_solver.hpp
 * @brief Finite-difference evolution of the radial problem
 *        u_tt - u_rr - (n-1)/r u_r + b(t) u_t = |u_t|^p,  b(t) = μ (1+t)^{-β}.
 *
 * Space: the conservative second-order stencil
 *   (L u)_i = [r_{i+½}^{n-1}(u_{i+1}-u_i) - r_{i-½}^{n-1}(u_i-u_{i-1})] / (r_i^{n-1} dr²),
 * which reduces to 2n (u_1 - u_0)/dr² = n u_rr(0) at the origin, with u = 0 at r_max.
 *
 * Time: Strang splitting of the damping (exact factor m(t)/m(t') from the
 * multiplier, half a step on each side) around a kick-drift-kick leapfrog
 * for u_tt = L u + |u_t|^p. The source is explicit; the closing kick uses
 * u_t extrapolated to the new level. Steps adapt as
 *   dt = min(c_cfl dr / √n, safety / max|u_t|^{p-1}).
 */
#ifndef GLASSEY_RADIAL_SOLVER_HPP
#define GLASSEY_RADIAL_SOLVER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "glassey/core_model.hpp"
#include "glassey/functionals.hpp"
#include "glassey/multipliers.hpp"
#include "glassey/radial_state.hpp"
#include "glassey/special_functions.hpp"

namespace glassey {

struct SolverOptions {
    double cfl = 0.8;               ///< c_cfl <= 0.9; the step cap is c_cfl dr / √n
    double safety = 0.05;           ///< nonlinear step control safety / |u_t|^{p-1}
    double blowup_factor = 1e6;     ///< blow-up when max|u_t| >= blowup_factor ε
    double dt_floor = 1e-12;        ///< blow-up when dt falls below this
    bool source = true;             ///< false: linear damped wave equation
    double sample_interval = 0.0;   ///< trace cadence; <= 0 means t_final / 4000
    bool store_states = false;      ///< keep snapshots (for the weak residual)
    int store_stride = 1;           ///< keep every k-th step when store_states
    double flush_level = 1e-30;     ///< values below flush_level * (initial amplitude) are zeroed ahead of the front
    std::vector<double> snapshot_times;  ///< increasing; steps are shortened to land on each one

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 0.9)) throw ValidationError("cfl must lie in (0, 0.9]");
        if (!(safety > 0.0)) throw ValidationError("safety must be > 0");
        if (!(blowup_factor > 1.0)) throw ValidationError("blowup_factor must be > 1");
        if (store_stride < 1) throw ValidationError("store_stride must be >= 1");
        for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
            if (!(snapshot_times[i] > 0.0)) throw ValidationError("snapshot times must be > 0");
            if (i > 0 && !(snapshot_times[i] > snapshot_times[i - 1]))
                throw ValidationError("snapshot times must be strictly increasing");
        }
    }
};

enum class BlowupReason { amplitude_threshold, dt_collapse, t_final_reached };

[[nodiscard]] inline std::string_view to_string(BlowupReason r) {
    switch (r) {
        case BlowupReason::amplitude_threshold: return "amplitude_threshold";
        case BlowupReason::dt_collapse: return "dt_collapse";
        case BlowupReason::t_final_reached: return "t_final_reached";
    }
    return "unknown";
}

/// First times at which max|u_t| reached 10^k ε, k = 1..6.
inline constexpr int kThresholdDecades = 6;

struct BlowupReport {
    std::optional<double> blow_up_time;
    BlowupReason reason = BlowupReason::t_final_reached;
    std::vector<double> history_t;
    std::vector<double> history_max_ut;
    std::array<std::optional<double>, kThresholdDecades> decade_crossing{};
    std::int64_t steps = 0;
    double final_time = 0.0;

    /// Blow-up time under the threshold 10^decade ε (decade in 1..6).
    [[nodiscard]] std::optional<double> time_at_threshold(int decade) const {
        return decade_crossing.at(static_cast<std::size_t>(decade - 1));
    }
};

class RadialSolver {
  public:
    RadialSolver(RadialGrid grid, ModelParams params, SolverOptions options = {})
        : grid_(grid), params_(params), options_(options), multiplier_(Multiplier::for_params(params)) {
        params_.validate();
        options_.validate();
        const int n = grid_.n;
        const double inv_dr2 = 1.0 / (grid_.dr * grid_.dr);
        plus_.assign(grid_.size(), 0.0);
        minus_.assign(grid_.size(), 0.0);
        plus_[0] = 2.0 * n * inv_dr2;
        for (int i = 1; i < grid_.nodes; ++i) {
            const double ri = grid_.r(i);
            const double rp = ri + 0.5 * grid_.dr;
            const double rm = ri - 0.5 * grid_.dr;
            plus_[i] = std::pow(rp / ri, n - 1) * inv_dr2;
            minus_[i] = std::pow(rm / ri, n - 1) * inv_dr2;
        }
        dt_max_ = options_.cfl * grid_.dr / std::sqrt(static_cast<double>(n));
    }

    [[nodiscard]] const RadialGrid& grid() const { return grid_; }
    [[nodiscard]] const ModelParams& params() const { return params_; }
    [[nodiscard]] const SolverOptions& options() const { return options_; }
    [[nodiscard]] const Multiplier& multiplier() const { return multiplier_; }
    [[nodiscard]] double dt_max() const { return dt_max_; }

    /// Step from the stability cap and the nonlinear growth control.
    [[nodiscard]] double choose_dt(const RadialState& state) const {
        double dt = dt_max_;
        if (options_.source) {
            const double vmax = state.max_abs_v();
            if (vmax > 0.0) dt = std::min(dt, options_.safety / std::pow(vmax, params_.p - 1.0));
        }
        return dt;
    }

    /// (L u)_i for an interior or origin node.
    [[nodiscard]] double laplacian(const std::vector<double>& u, int i) const {
        if (i == 0) return plus_[0] * (u[1] - u[0]);
        return plus_[i] * (u[i + 1] - u[i]) - minus_[i] * (u[i] - u[i - 1]);
    }

    /**
     * @brief Advances by state.dt in place. Returns false (state untouched) when the step
     *        would produce non-finite values; the caller then flags blow-up.
     */
    bool advance(RadialState& state) {
        const double dt = state.dt;
        const double t0 = state.t;
        const double th = t0 + 0.5 * dt;
        const double t1 = t0 + dt;
        const int last = std::min(state.front + 2, grid_.nodes - 1);
        const double p = params_.p;
        auto& u = state.u;
        auto& v = state.v;
        scratch_v_.assign(v.begin(), v.begin() + last + 1);

        const double d1 = multiplier_.is_trivial() ? 1.0 : multiplier_.decay_factor(t0, th);
        const double d2 = multiplier_.is_trivial() ? 1.0 : multiplier_.decay_factor(th, t1);
        const double half = 0.5 * dt;

        // Damping half step, then kick with L u^n + |v|^p.
        vhalf_.resize(last + 1);
        for (int i = 0; i <= last; ++i) {
            const double vi = d1 * v[i];
            const double src = options_.source ? source(vi, p) : 0.0;
            vhalf_[i] = vi + half * (laplacian(u, i) + src);
        }
        // Drift.
        for (int i = 0; i <= last; ++i) u[i] += dt * vhalf_[i];
        // Closing kick with the source at the extrapolated new level, then damping half step.
        double vmax = 0.0;
        bool finite = true;
        for (int i = 0; i <= last; ++i) {
            double src = 0.0;
            if (options_.source) {
                const double v_ext = 2.0 * vhalf_[i] - d1 * scratch_v_[i];
                src = source(v_ext, p);
            }
            const double vi = d2 * (vhalf_[i] + half * (laplacian(u, i) + src));
            v[i] = vi;
            const double a = std::abs(vi);
            if (!(a <= 1e300) || !std::isfinite(u[i])) finite = false;
            vmax = std::max(vmax, a);
        }
        if (!finite) {
            // Roll back: u was advanced with vhalf.
            for (int i = 0; i <= last; ++i) {
                u[i] -= dt * vhalf_[i];
                v[i] = scratch_v_[i];
            }
            return false;
        }
        // Flush the far tail ahead of the physical front to exact zero.
        int front = last;
        const double floor = options_.flush_level * flush_scale_;
        while (front > 0 && std::abs(u[front]) < floor && std::abs(v[front]) < floor) {
            u[front] = 0.0;
            v[front] = 0.0;
            --front;
        }
        state.front = std::max(front, 1);
        state.t = t1;
        ++state.step_count;
        last_max_v_ = vmax;
        return true;
    }

    /// One step of size state.dt, value in / value out.
    [[nodiscard]] RadialState step(RadialState state) {
        if (state.blown_up) throw std::logic_error("step called on a blown-up state");
        if (!(state.dt > 0.0 && state.dt <= dt_max_ * (1.0 + 1e-12)))
            throw ValidationError("dt must satisfy 0 < dt <= c_cfl dr / sqrt(n)");
        if (flush_scale_ == 0.0) flush_scale_ = std::max(state.max_abs_u(), state.max_abs_v());
        if (!advance(state)) state.blown_up = true;
        return state;
    }

    void set_flush_scale(double s) { flush_scale_ = s; }
    [[nodiscard]] double last_max_v() const { return last_max_v_; }

    [[nodiscard]] static double source(double v, double p) {
        const double a = std::abs(v);
        if (p == 2.0) return a * a;
        if (p == 3.0) return a * a * a;
        if (p == 1.5) return a * std::sqrt(a);
        return std::pow(a, p);
    }

  private:
    RadialGrid grid_;
    ModelParams params_;
    SolverOptions options_;
    Multiplier multiplier_;
    std::vector<double> plus_;
    std::vector<double> minus_;
    std::vector<double> vhalf_;
    std::vector<double> scratch_v_;
    double dt_max_ = 0.0;
    double flush_scale_ = 0.0;
    double last_max_v_ = 0.0;
};

/// Discrete energy ½ Σ w v² + ½ Σ |S^{n-1}| r_{i+½}^{n-1} (u_{i+1}-u_i)² / dr, conserved by the linear undamped scheme.
[[nodiscard]] inline double discrete_energy(const RadialGrid& grid, const RadialState& state) {
    const auto w = grid.volume_weights();
    const double omega = sphere_area(grid.n);
    double kinetic = 0.0;
    double potential = 0.0;
    for (int i = 0; i < grid.nodes; ++i) {
        kinetic += w[i] * state.v[i] * state.v[i];
        const double du = state.u[i + 1] - state.u[i];
        potential += omega * std::pow(grid.r(i) + 0.5 * grid.dr, grid.n - 1) * du * du / grid.dr;
    }
    return 0.5 * (kinetic + potential);
}

struct RunResult {
    BlowupReport report;
    FunctionalTrace trace;
    std::vector<RadialState> states;     ///< every store_stride-th step when SolverOptions::store_states
    std::vector<RadialState> snapshots;  ///< states at SolverOptions::snapshot_times reached before stopping
};

/**
 * @brief Integrates from t = 0 until blow-up or t_final and records the functional trace.
 *
 * Blow-up is declared when max|u_t| >= blowup_factor ε or the adaptive step
 * falls below dt_floor. Reaching t_final is a normal outcome.
 */
[[nodiscard]] inline RunResult run_until_blowup(const ModelParams& params, const DataProfile& data,
                                                const RadialGrid& grid, double t_final,
                                                const SolverOptions& options = {},
                                                const std::optional<C1Estimate>& C1 = std::nullopt) {
    params.validate();
    data.validate(params.R);
    if (grid.n != params.n) throw ValidationError("grid dimension differs from params.n");
    if (!(t_final > 0.0)) throw ValidationError("t_final must be > 0");
    grid.validate(t_final, params.R);

    RadialSolver solver(grid, params, options);
    const FunctionalContext ctx(grid, params, data);
    const double threshold = options.blowup_factor * params.eps;
    const double interval = options.sample_interval > 0.0 ? options.sample_interval : t_final / 4000.0;

    RunResult result;
    auto& report = result.report;
    auto& trace = result.trace;
    // Samples land on step ends, so the nominal cadence is never finer than one full step.
    trace.sample_interval = std::max(interval, solver.dt_max());

    RadialState state = initial_state(grid, data, params.eps);
    solver.set_flush_scale(std::max({state.max_abs_u(), state.max_abs_v(), params.eps}));

    auto sample = [&](const RadialState& s, double vmax) {
        // With the source off the equation has no |u_t|^p term, so neither does H.
        trace.append(s.t, ctx.F1(s), ctx.J(s), options.source ? ctx.N(s) : 0.0, ctx.multiplier().value(s.t), vmax);
        report.history_t.push_back(s.t);
        report.history_max_ut.push_back(vmax);
    };
    auto note_crossings = [&](double t, double vmax) {
        double level = 10.0 * params.eps;
        for (auto& crossing : report.decade_crossing) {
            if (!crossing && vmax >= level) crossing = t;
            level *= 10.0;
        }
    };

    double vmax = state.max_abs_v();
    sample(state, vmax);
    note_crossings(0.0, vmax);
    if (options.store_states) result.states.push_back(state);
    double next_sample = interval;
    std::size_t next_snapshot = 0;

    while (true) {
        if (state.t >= t_final) {
            report.reason = BlowupReason::t_final_reached;
            break;
        }
        double dt = solver.choose_dt(state);
        if (dt < options.dt_floor) {
            report.reason = BlowupReason::dt_collapse;
            report.blow_up_time = state.t;
            state.blown_up = true;
            break;
        }
        const bool last_step = state.t + dt >= t_final;
        if (last_step) dt = t_final - state.t;
        bool snapshot_step = false;
        if (next_snapshot < options.snapshot_times.size() && options.snapshot_times[next_snapshot] < t_final &&
            state.t + dt >= options.snapshot_times[next_snapshot]) {
            dt = options.snapshot_times[next_snapshot] - state.t;
            snapshot_step = true;
        }
        state.dt = dt;
        if (!solver.advance(state)) {
            // The amplitude ran past representable values within one step.
            report.reason = BlowupReason::amplitude_threshold;
            report.blow_up_time = state.t + dt;
            state.blown_up = true;
            break;
        }
        if (snapshot_step) {
            state.t = options.snapshot_times[next_snapshot++];
        } else if (last_step) {
            state.t = t_final;
        }
        vmax = solver.last_max_v();
        if (snapshot_step) result.snapshots.push_back(state);
        note_crossings(state.t, vmax);
        if (options.store_states && state.step_count % options.store_stride == 0) result.states.push_back(state);
        if (vmax >= threshold) {
            report.reason = BlowupReason::amplitude_threshold;
            report.blow_up_time = state.t;
            state.blown_up = true;
            break;
        }
        if (state.t >= next_sample - 1e-12 * interval) {
            sample(state, vmax);
            while (next_sample <= state.t + 1e-12 * interval) next_sample += interval;
        }
    }
    if (next_snapshot < options.snapshot_times.size() && options.snapshot_times[next_snapshot] == t_final &&
        state.t == t_final)
        result.snapshots.push_back(state);
    if (trace.times.back() != state.t) sample(state, vmax);
    if (options.store_states && (result.states.empty() || result.states.back().t != state.t))
        result.states.push_back(state);
    report.steps = state.step_count;
    report.final_time = state.t;

    finalize_trace(trace, ctx, C1 ? *C1 : default_C1(params.n, params.R));
    return result;
}

/// A test function φ(r, t) with its partial derivatives and spatial support radius.
struct TestFunction {
    std::function<double(double, double)> value;
    std::function<double(double, double)> d_t;
    std::function<double(double, double)> d_r;
    double support_radius = 1.0;
};

/// φ(r, t) = (1 - (r/ρ)²)_+^4 e^{-λ t}.
[[nodiscard]] inline TestFunction bump_test_function(double rho, double lambda) {
    TestFunction phi;
    phi.support_radius = rho;
    phi.value = [=](double r, double t) {
        if (r >= rho) return 0.0;
        const double w = 1.0 - (r / rho) * (r / rho);
        return w * w * w * w * std::exp(-lambda * t);
    };
    phi.d_t = [=](double r, double t) {
        if (r >= rho) return 0.0;
        const double w = 1.0 - (r / rho) * (r / rho);
        return -lambda * w * w * w * w * std::exp(-lambda * t);
    };
    phi.d_r = [=](double r, double t) {
        if (r >= rho) return 0.0;
        const double w = 1.0 - (r / rho) * (r / rho);
        return -8.0 * r / (rho * rho) * w * w * w * std::exp(-lambda * t);
    };
    return phi;
}

struct WeakResidualTerms {
    double velocity_now = 0.0;    ///< ∫ u_t(t) φ(t)
    double velocity_start = 0.0;  ///< -∫ u_t(0) φ(0)
    double flux = 0.0;            ///< ∫₀ᵗ∫ (-u_t φ_t + ∇u·∇φ)
    double damping = 0.0;         ///< ∫₀ᵗ∫ b u_t φ
    double source = 0.0;          ///< ∫₀ᵗ∫ |u_t|^p φ
    double residual = 0.0;        ///< |lhs - rhs| / largest term
};

/**
 * @brief Energy-solution identity evaluated on stored states at the time of the last one.
 *
 * Space integrals use the grid volume weights with centred u_r; time integrals
 * use the trapezoid rule over the stored snapshots.
 */
[[nodiscard]] inline WeakResidualTerms weak_residual(const std::vector<RadialState>& states, const TestFunction& phi,
                                                     const ModelParams& params, const RadialGrid& grid,
                                                     bool with_source = true) {
    if (states.empty()) throw ValidationError("weak_residual needs at least one state");
    if (!(phi.support_radius < grid.r_max() - grid.dr))
        throw ValidationError("test function support touches the domain boundary");
    const auto w = grid.volume_weights();
    const auto multiplier = Multiplier::for_params(params);
    const int last = std::min(grid.nodes - 1, static_cast<int>(std::ceil(phi.support_radius / grid.dr)) + 1);

    auto space = [&](auto&& fn) {
        double s = 0.0;
        for (int i = 0; i <= last; ++i) s += w[i] * fn(i);
        return s;
    };
    auto flux_density = [&](const RadialState& s) {
        return space([&](int i) {
            const double r = grid.r(i);
            const double ur = i == 0 ? 0.0 : (s.u[i + 1] - s.u[i - 1]) / (2.0 * grid.dr);
            return -s.v[i] * phi.d_t(r, s.t) + ur * phi.d_r(r, s.t);
        });
    };
    auto damping_density = [&](const RadialState& s) {
        const double b = multiplier.log_derivative(s.t);
        return space([&](int i) { return b * s.v[i] * phi.value(grid.r(i), s.t); });
    };
    auto source_density = [&](const RadialState& s) {
        if (!with_source) return 0.0;
        return space([&](int i) { return RadialSolver::source(s.v[i], params.p) * phi.value(grid.r(i), s.t); });
    };

    WeakResidualTerms terms;
    const auto& first = states.front();
    const auto& final_state = states.back();
    terms.velocity_now = space([&](int i) { return final_state.v[i] * phi.value(grid.r(i), final_state.t); });
    terms.velocity_start = -space([&](int i) { return first.v[i] * phi.value(grid.r(i), first.t); });
    double prev_flux = flux_density(first);
    double prev_damp = damping_density(first);
    double prev_src = source_density(first);
    for (std::size_t k = 1; k < states.size(); ++k) {
        const double h = states[k].t - states[k - 1].t;
        const double fl = flux_density(states[k]);
        const double dm = damping_density(states[k]);
        const double sr = source_density(states[k]);
        terms.flux += 0.5 * h * (fl + prev_flux);
        terms.damping += 0.5 * h * (dm + prev_damp);
        terms.source += 0.5 * h * (sr + prev_src);
        prev_flux = fl;
        prev_damp = dm;
        prev_src = sr;
    }
    const double lhs = terms.velocity_now + terms.velocity_start + terms.flux + terms.damping;
    const double scale = std::max({std::abs(terms.velocity_now), std::abs(terms.velocity_start), std::abs(terms.flux),
                                   std::abs(terms.damping), std::abs(terms.source)});
    terms.residual = scale == 0.0 ? 0.0 : std::abs(lhs - terms.source) / scale;
    return terms;
}

}  // namespace glassey

#endif  // GLASSEY_RADIAL_SOLVER_HPP
