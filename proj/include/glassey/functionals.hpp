/**
 * @file functionals.hpp
 * @brief Weighted functionals of a numerical solution and the inequality monitors built on them.
 *
 * With ψ(x,t) = e^{-t} φ₁(x) and the damping multiplier m (m₁ when β = 1):
 *
 *   F₁(t) = ∫ u ψ dx
 *   J(t)  = ∫ u_t ψ dx
 *   N(t)  = ∫ |u_t|^p ψ dx
 *   H(t)  = ½ ∫₀ᵗ m(s) N(s) ds + (m(0) ε / 2) C_{0,g}
 *   G(t)  = m(t) J(t) - (m(0) ε / 2) C_{0,g} - ½ ∫₀ᵗ m(s) N(s) ds
 *
 * where C_{f,0} = ∫ f φ₁ dx and C_{0,g} = ∫ g φ₁ dx. The monitors flag, per
 * sample, whether the numerical solution satisfies the lower bound on F₁,
 * the bound m J >= H and the comparison inequality H' >= A (1+t)^{-k} H^p.
 * They never throw: near blow-up a discrete solution may legitimately
 * violate them, and the pass rate is what gets reported.
 */
#ifndef GLASSEY_FUNCTIONALS_HPP
#define GLASSEY_FUNCTIONALS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "glassey/core_model.hpp"
#include "glassey/multipliers.hpp"
#include "glassey/quadrature.hpp"
#include "glassey/radial_state.hpp"
#include "glassey/special_functions.hpp"

namespace glassey {

/// ∫ f φ₁ dx and ∫ g φ₁ dx for the unit-amplitude data (ε excluded).
struct DataConstants {
    double C_f0 = 0.0;
    double C_0g = 0.0;
    [[nodiscard]] double C_fg() const { return C_f0 + C_0g; }
};

[[nodiscard]] inline DataConstants data_constants(const DataProfile& data, int n) {
    const GaussLegendre rule(16);
    const double omega = sphere_area(n);
    const double a = data.support_radius;
    auto radial = [&](auto&& fn) {
        return omega * rule.integrate_composite(
                           [&](double r) { return fn(r) * phi1(r, n) * std::pow(r, n - 1); }, 0.0, a, 32);
    };
    DataConstants c;
    c.C_f0 = radial([&](double r) { return data.f(r); });
    c.C_0g = radial([&](double r) { return data.g(r); });
    if (!(c.C_0g > 0.0)) throw ValidationError("C_{0,g} must be > 0 (g must not vanish identically)");
    return c;
}

/// Grid-level weights for evaluating ψ-weighted integrals of a state.
class FunctionalContext {
  public:
    FunctionalContext(const RadialGrid& grid, const ModelParams& params, const DataProfile& data)
        : grid_(grid), params_(params), multiplier_(Multiplier::for_params(params)),
          constants_(data_constants(data, grid.n)) {
        const auto w = grid.volume_weights();
        weighted_phi_.resize(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) weighted_phi_[i] = w[i] * phi1_scaled(grid.r(static_cast<int>(i)), grid.n);
    }

    [[nodiscard]] const RadialGrid& grid() const { return grid_; }
    [[nodiscard]] const ModelParams& params() const { return params_; }
    [[nodiscard]] const Multiplier& multiplier() const { return multiplier_; }
    [[nodiscard]] const DataConstants& constants() const { return constants_; }

    /// ∫ h(state_i) ψ(r_i, t) dx over the active nodes.
    template <class Fn>
    [[nodiscard]] double psi_integral(const RadialState& state, Fn&& h) const {
        double sum = 0.0;
        const int last = std::min(state.front, grid_.nodes);
        for (int i = 0; i <= last; ++i) {
            const double value = h(i);
            if (value != 0.0) sum += weighted_phi_[i] * std::exp(grid_.r(i) - state.t) * value;
        }
        return sum;
    }

    [[nodiscard]] double F1(const RadialState& s) const {
        return psi_integral(s, [&](int i) { return s.u[i]; });
    }
    [[nodiscard]] double J(const RadialState& s) const {
        return psi_integral(s, [&](int i) { return s.v[i]; });
    }
    [[nodiscard]] double N(const RadialState& s) const {
        const double p = params_.p;
        return psi_integral(s, [&](int i) { return std::pow(std::abs(s.v[i]), p); });
    }

    /// (m(0) ε / 2) C_{0,g}: the common initial value of G and H.
    [[nodiscard]] double initial_level() const {
        return 0.5 * multiplier_.value(0.0) * params_.eps * constants_.C_0g;
    }

  private:
    RadialGrid grid_;
    ModelParams params_;
    Multiplier multiplier_;
    DataConstants constants_;
    std::vector<double> weighted_phi_;
};

[[nodiscard]] inline double compute_F1(const RadialState& state, const FunctionalContext& ctx) { return ctx.F1(state); }

/// Sampled functionals of one run.
struct FunctionalTrace {
    std::vector<double> times;
    std::vector<double> F1;
    std::vector<double> J;       ///< ∫ u_t ψ
    std::vector<double> N;       ///< ∫ |u_t|^p ψ
    std::vector<double> m;       ///< multiplier at each sample
    std::vector<double> G;
    std::vector<double> H;
    std::vector<double> max_ut;
    std::vector<std::uint8_t> flag_lemma_F1;
    std::vector<std::uint8_t> flag_mJ_ge_H;
    std::vector<std::uint8_t> flag_H_ode;
    double C_f0 = 0.0;
    double C_0g = 0.0;
    double C_fg = 0.0;
    double eps = 0.0;
    double sample_interval = 0.0;  ///< nominal spacing requested from the recorder

    [[nodiscard]] std::size_t size() const { return times.size(); }

    void append(double t, double f1, double j, double nl, double mt, double max_v) {
        times.push_back(t);
        F1.push_back(f1);
        J.push_back(j);
        N.push_back(nl);
        m.push_back(mt);
        max_ut.push_back(max_v);
    }
};

/// Running ½ ∫₀^{t_j} m N ds by the trapezoid rule.
[[nodiscard]] inline std::vector<double> half_source_integral(const FunctionalTrace& trace) {
    std::vector<double> acc(trace.size(), 0.0);
    for (std::size_t j = 1; j < trace.size(); ++j) {
        const double dt = trace.times[j] - trace.times[j - 1];
        acc[j] = acc[j - 1] + 0.25 * dt * (trace.m[j] * trace.N[j] + trace.m[j - 1] * trace.N[j - 1]);
    }
    return acc;
}

/// H (H₁ when β = 1) at every sample.
[[nodiscard]] inline std::vector<double> compute_H(const FunctionalTrace& trace, const FunctionalContext& ctx) {
    auto h = half_source_integral(trace);
    const double level = ctx.initial_level();
    for (double& x : h) x += level;
    return h;
}

namespace detail {
inline void check_sampling(const FunctionalTrace& trace) {
    if (!(trace.sample_interval > 0.0)) return;
    for (std::size_t j = 1; j < trace.size(); ++j) {
        if (trace.times[j] - trace.times[j - 1] > 10.0 * trace.sample_interval)
            throw std::runtime_error("trace samples too sparse for the time integral in G");
    }
}
}  // namespace detail

/// G at every sample. Throws if a sample gap exceeds 10x the nominal sample interval.
[[nodiscard]] inline std::vector<double> compute_G_series(const FunctionalTrace& trace, const FunctionalContext& ctx) {
    detail::check_sampling(trace);
    auto g = half_source_integral(trace);
    const double level = ctx.initial_level();
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = trace.m[j] * trace.J[j] - level - g[j];
    return g;
}

/// G at the time of `state`, extending the trace recorded so far by one trapezoid panel.
[[nodiscard]] inline double compute_G(const RadialState& state, const FunctionalTrace& trace_so_far,
                                      const FunctionalContext& ctx) {
    detail::check_sampling(trace_so_far);
    const double mt = ctx.multiplier().value(state.t);
    double integral = 0.0;
    if (!trace_so_far.times.empty()) {
        const auto acc = half_source_integral(trace_so_far);
        const std::size_t last = trace_so_far.size() - 1;
        const double gap = state.t - trace_so_far.times[last];
        if (gap < 0.0) throw std::invalid_argument("state lies before the end of the trace");
        if (trace_so_far.sample_interval > 0.0 && gap > 10.0 * trace_so_far.sample_interval)
            throw std::runtime_error("trace samples too sparse for the time integral in G");
        integral = acc[last] + 0.25 * gap * (mt * ctx.N(state) + trace_so_far.m[last] * trace_so_far.N[last]);
    }
    return mt * ctx.J(state) - ctx.initial_level() - integral;
}

/// Tolerances of the monitors.
struct MonitorTolerances {
    double lemma_F1_rel = 1e-4;  ///< times ε C_{f,g}
    double H_ode_rel = 0.05;
    double mJ_ge_H_rel = 0.05;
};

/**
 * @brief Lower bound on F₁: (m(0) ε / 2) C_{f,0} for β > 1, C_{f,0} ε / (2 m₁(t)) for β = 1.
 *
 * A sample passes when F₁ >= bound - tol, tol = 1e-4 ε C_{f,g}.
 */
[[nodiscard]] inline std::vector<std::uint8_t> monitor_lemma_F1(const FunctionalTrace& trace,
                                                               const FunctionalContext& ctx,
                                                               const MonitorTolerances& tol = {}) {
    const auto& params = ctx.params();
    const auto& m = ctx.multiplier();
    const double C_f0 = ctx.constants().C_f0;
    const double slack = tol.lemma_F1_rel * params.eps * ctx.constants().C_fg();
    std::vector<std::uint8_t> flags(trace.size());
    for (std::size_t j = 0; j < trace.size(); ++j) {
        const double bound = params.scale_invariant()
                                 ? C_f0 * params.eps / (2.0 * m.value(trace.times[j]))
                                 : 0.5 * m.value(0.0) * params.eps * C_f0;
        flags[j] = trace.F1[j] >= bound - slack;
    }
    return flags;
}

/// Time-decay exponent k of the comparison inequality: (n-1)(p-1)/2, or (n+2μ-1)(p-1)/2 when β = 1.
[[nodiscard]] inline double comparison_decay_exponent(const ModelParams& params) {
    return (effective_dimension(params) - 1.0) * (params.p - 1.0) / 2.0;
}

/// Discrete derivative of a series: centred inside, one-sided at the ends.
[[nodiscard]] inline std::vector<double> discrete_derivative(const std::vector<double>& t, const std::vector<double>& y) {
    std::vector<double> d(y.size(), 0.0);
    const std::size_t n = y.size();
    if (n < 2) return d;
    d[0] = (y[1] - y[0]) / (t[1] - t[0]);
    d[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (y[j + 1] - y[j - 1]) / (t[j + 1] - t[j - 1]);
    return d;
}

struct HOdeFlags {
    std::vector<std::uint8_t> h_ode;    ///< H' >= (1 - tol) A (1+t)^{-k} H^p
    std::vector<std::uint8_t> mJ_ge_H;  ///< m(t) J(t) >= (1 - tol) H(t)
};

/// Checks the comparison inequality with A = C₁^{1-p}/2 on the recorded H series.
[[nodiscard]] inline HOdeFlags monitor_H_ode(const FunctionalTrace& trace, const C1Estimate& C1,
                                             const FunctionalContext& ctx, const MonitorTolerances& tol = {}) {
    const auto& params = ctx.params();
    const double A = 0.5 * std::pow(C1.value, 1.0 - params.p);
    const double k = comparison_decay_exponent(params);
    const auto dH = discrete_derivative(trace.times, trace.H);
    HOdeFlags flags;
    flags.h_ode.resize(trace.size());
    flags.mJ_ge_H.resize(trace.size());
    for (std::size_t j = 0; j < trace.size(); ++j) {
        const double rhs = A * std::pow(1.0 + trace.times[j], -k) * std::pow(trace.H[j], params.p);
        flags.h_ode[j] = dH[j] >= (1.0 - tol.H_ode_rel) * rhs;
        flags.mJ_ge_H[j] = trace.m[j] * trace.J[j] >= (1.0 - tol.mJ_ge_H_rel) * trace.H[j];
    }
    return flags;
}

/// Fills G, H and every monitor flag of a recorded trace.
inline void finalize_trace(FunctionalTrace& trace, const FunctionalContext& ctx, const C1Estimate& C1,
                           const MonitorTolerances& tol = {}) {
    trace.C_f0 = ctx.constants().C_f0;
    trace.C_0g = ctx.constants().C_0g;
    trace.C_fg = ctx.constants().C_fg();
    trace.eps = ctx.params().eps;
    trace.H = compute_H(trace, ctx);
    trace.G = compute_G_series(trace, ctx);
    trace.flag_lemma_F1 = monitor_lemma_F1(trace, ctx, tol);
    auto h = monitor_H_ode(trace, C1, ctx, tol);
    trace.flag_H_ode = std::move(h.h_ode);
    trace.flag_mJ_ge_H = std::move(h.mJ_ge_H);
}

/// Fraction of samples with t <= t_cut whose flag is set.
[[nodiscard]] inline double pass_rate(const std::vector<double>& times, const std::vector<std::uint8_t>& flags,
                                      double t_cut) {
    std::size_t total = 0;
    std::size_t ok = 0;
    for (std::size_t j = 0; j < flags.size(); ++j) {
        if (times[j] > t_cut) break;
        ++total;
        ok += flags[j] ? 1u : 0u;
    }
    return total == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(total);
}

}  // namespace glassey

#endif  // GLASSEY_FUNCTIONALS_HPP
