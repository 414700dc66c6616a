/**
 * @file lifespan_bounds.hpp
 * @brief Blow-up time of the comparison ODE H' = A (1+t)^{-k} H^p, H(0) = H0,
 *        and the ε-exponents of the resulting lifespan bounds.
 *
 * Separating variables, blow-up happens at the T with
 *   ∫₀ᵀ A (1+s)^{-k} ds = H0^{1-p} / (p-1) =: X,
 * so log(1+T) = log1p((1-k) X / A) / (1-k) for k != 1 (finite for k > 1 only
 * when X < A/(k-1)) and log(1+T) = X / A for k = 1. Since the true functional
 * satisfies the inequality, T is an upper-bound witness for the lifespan.
 */
#ifndef GLASSEY_LIFESPAN_BOUNDS_HPP
#define GLASSEY_LIFESPAN_BOUNDS_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string_view>

#include "glassey/core_model.hpp"
#include "glassey/functionals.hpp"
#include "glassey/multipliers.hpp"
#include "glassey/special_functions.hpp"

namespace glassey {

struct OdeCoefficients {
    double A = 1.0;
    double k = 0.0;
    double p = 2.0;
    double H0 = 1.0;

    void validate() const {
        if (!(A > 0.0) || !std::isfinite(A)) throw ValidationError("ODE coefficient A must be > 0");
        if (!(k >= 0.0) || !std::isfinite(k)) throw ValidationError("ODE exponent k must be >= 0");
        if (!(p > 1.0)) throw ValidationError("ODE power p must be > 1");
        if (!(H0 > 0.0) || !std::isfinite(H0)) throw ValidationError("ODE initial value H0 must be > 0");
    }
};

enum class DecayRegime { subcritical, critical, supercritical };

[[nodiscard]] inline std::string_view to_string(DecayRegime r) {
    switch (r) {
        case DecayRegime::subcritical: return "subcritical";
        case DecayRegime::critical: return "critical";
        case DecayRegime::supercritical: return "supercritical";
    }
    return "unknown";
}

struct LifespanBound {
    DecayRegime regime = DecayRegime::subcritical;
    double T_blowup = std::numeric_limits<double>::infinity();
    double log1p_T = std::numeric_limits<double>::infinity();  ///< log(1+T); finite even when T overflows
    std::optional<double> exponent_in_eps;  ///< -(p-1)/(1-k) in the subcritical regime
    bool outside_theorem_scope = false;     ///< true for k > 1

    [[nodiscard]] bool finite() const { return std::isfinite(log1p_T); }
};

[[nodiscard]] inline DecayRegime decay_regime(double k) {
    if (std::abs(k - 1.0) <= kCriticalTolerance) return DecayRegime::critical;
    return k < 1.0 ? DecayRegime::subcritical : DecayRegime::supercritical;
}

[[nodiscard]] inline LifespanBound solve_comparison_ode(const OdeCoefficients& c) {
    c.validate();
    LifespanBound bound;
    bound.regime = decay_regime(c.k);
    // X / A computed in logs so tiny H0 does not overflow before the division.
    const double log_x_over_a = (1.0 - c.p) * std::log(c.H0) - std::log(c.p - 1.0) - std::log(c.A);
    const double x_over_a = std::exp(log_x_over_a);
    switch (bound.regime) {
        case DecayRegime::critical:
            bound.log1p_T = x_over_a;
            break;
        case DecayRegime::subcritical:
            bound.log1p_T = std::log1p((1.0 - c.k) * x_over_a) / (1.0 - c.k);
            bound.exponent_in_eps = -(c.p - 1.0) / (1.0 - c.k);
            break;
        case DecayRegime::supercritical: {
            bound.outside_theorem_scope = true;
            const double arg = (1.0 - c.k) * x_over_a;  // negative
            bound.log1p_T = arg > -1.0 ? std::log1p(arg) / (1.0 - c.k) : std::numeric_limits<double>::infinity();
            break;
        }
    }
    bound.T_blowup = std::isfinite(bound.log1p_T) ? std::expm1(bound.log1p_T) : std::numeric_limits<double>::infinity();
    return bound;
}

/// Either the power -(p-1)/(1-k) of ε in a subcritical bound, or the critical exp(C ε^{-(p-1)}) form.
struct TheoremExponent {
    bool critical = false;
    double power = 0.0;  ///< the ε exponent (subcritical) or the ε power inside the exponential (critical)
};

/**
 * @brief ε-exponent of the lifespan bound for the given parameters.
 *
 * Subcritical: -(p-1)/(1-(d-1)(p-1)/2) with d = n (β > 1) or n + 2μ (β = 1).
 * Critical: marker with power p-1 inside exp(C ε^{-(p-1)}). Supercritical is rejected.
 */
[[nodiscard]] inline TheoremExponent theorem_exponent(const ModelParams& params) {
    const Regime regime = classify(params);
    if (regime.tag == RegimeTag::supercritical)
        throw ValidationError("supercritical parameters: no lifespan bound applies");
    TheoremExponent e;
    if (regime.tag == RegimeTag::critical) {
        e.critical = true;
        e.power = params.p - 1.0;
        return e;
    }
    const double k = (regime.effective_dimension - 1.0) * (params.p - 1.0) / 2.0;
    e.power = -(params.p - 1.0) / (1.0 - k);
    return e;
}

/// Coefficients of the comparison ODE for a run: A = C₁^{1-p}/2 and H0 = (m(0) ε / 2) C_{0,g}.
[[nodiscard]] inline OdeCoefficients ode_coefficients(const ModelParams& params, const DataProfile& data,
                                                      const C1Estimate& C1) {
    params.validate();
    const auto constants = data_constants(data, params.n);
    const auto m = Multiplier::for_params(params);
    OdeCoefficients c;
    c.A = 0.5 * std::pow(C1.value, 1.0 - params.p);
    c.k = comparison_decay_exponent(params);
    c.p = params.p;
    c.H0 = 0.5 * m.value(0.0) * params.eps * constants.C_0g;
    return c;
}

[[nodiscard]] inline LifespanBound bound_from_run(const ModelParams& params, const DataProfile& data,
                                                  const C1Estimate& C1) {
    return solve_comparison_ode(ode_coefficients(params, data, C1));
}

/// d log T / d log ε from the closed form, differencing at ε and ε/2. `per_unit_eps.H0` holds H0 / ε.
[[nodiscard]] inline double closed_form_eps_slope(OdeCoefficients per_unit_eps, double eps) {
    OdeCoefficients c = per_unit_eps;
    const double h_per_eps = c.H0;
    c.H0 = h_per_eps * eps;
    const auto full = solve_comparison_ode(c);
    c.H0 = h_per_eps * eps * 0.5;
    const auto half = solve_comparison_ode(c);
    return (std::log(full.T_blowup) - std::log(half.T_blowup)) / std::log(2.0);
}

/// d log log T / d log ε from the closed form (critical regime), same differencing.
[[nodiscard]] inline double closed_form_eps_slope_loglog(OdeCoefficients per_unit_eps, double eps) {
    OdeCoefficients c = per_unit_eps;
    const double h_per_eps = c.H0;
    c.H0 = h_per_eps * eps;
    const auto full = solve_comparison_ode(c);
    c.H0 = h_per_eps * eps * 0.5;
    const auto half = solve_comparison_ode(c);
    return (std::log(full.log1p_T) - std::log(half.log1p_T)) / std::log(2.0);
}

}  // namespace glassey

#endif  // GLASSEY_LIFESPAN_BOUNDS_HPP
