/**
 * @file core_model.hpp
 * @brief Problem definition for u_tt - Δu + μ(1+t)^{-β} u_t = |u_t|^p.
 *
 * Holds the parameter tuple (n, p, μ, β, R, ε), the Glassey critical
 * exponent, regime classification and the polynomial-bump initial data
 * used by every run.
 */
#ifndef GLASSEY_CORE_MODEL_HPP
#define GLASSEY_CORE_MODEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace glassey {

/// Raised for any parameter or configuration that violates a documented precondition.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Tolerance used when deciding whether p sits exactly on a critical exponent.
inline constexpr double kCriticalTolerance = 1e-12;

struct ModelParams {
    int n = 1;          ///< spatial dimension
    double p = 2.0;     ///< nonlinearity exponent
    double mu = 0.0;    ///< damping strength
    double beta = 2.0;  ///< damping decay rate
    double R = 1.0;     ///< support radius of the data
    double eps = 0.1;   ///< data amplitude

    void validate() const {
        if (n < 1) throw ValidationError("n must be a positive integer");
        if (!(p > 1.0) || !std::isfinite(p)) throw ValidationError("p must be > 1");
        if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be >= 0");
        if (!(beta >= 1.0) || !std::isfinite(beta)) throw ValidationError("beta must be >= 1");
        if (!(R >= 1.0) || !std::isfinite(R)) throw ValidationError("R must be >= 1");
        if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("eps must be > 0");
    }

    bool operator==(const ModelParams&) const = default;

    /// True for the scale-invariant damping β = 1.
    [[nodiscard]] bool scale_invariant() const { return beta == 1.0; }
};

/// p_c(d) = (d+1)/(d-1). Undefined for d <= 1.
[[nodiscard]] inline double critical_exponent(double d) {
    if (!(d > 1.0)) throw ValidationError("critical_exponent requires d > 1");
    return (d + 1.0) / (d - 1.0);
}

enum class RegimeTag { subcritical, critical, supercritical };

[[nodiscard]] inline std::string_view to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::subcritical: return "subcritical";
        case RegimeTag::critical: return "critical";
        case RegimeTag::supercritical: return "supercritical";
    }
    return "unknown";
}

struct Regime {
    RegimeTag tag = RegimeTag::subcritical;
    double effective_dimension = 1.0;
};

/// Effective dimension: n for β > 1, n + 2μ for β = 1.
[[nodiscard]] inline double effective_dimension(const ModelParams& params) {
    return params.scale_invariant() ? params.n + 2.0 * params.mu : static_cast<double>(params.n);
}

[[nodiscard]] inline Regime classify(const ModelParams& params) {
    params.validate();
    Regime regime;
    regime.effective_dimension = effective_dimension(params);
    // No critical exponent exists in effective dimension <= 1: every p > 1 blows up.
    if (regime.effective_dimension <= 1.0) {
        regime.tag = RegimeTag::subcritical;
        return regime;
    }
    const double pc = critical_exponent(regime.effective_dimension);
    if (std::abs(params.p - pc) <= kCriticalTolerance) {
        regime.tag = RegimeTag::critical;
    } else if (params.p < pc) {
        regime.tag = RegimeTag::subcritical;
    } else {
        regime.tag = RegimeTag::supercritical;
    }
    return regime;
}

/**
 * @brief Radial initial data f, g built from the bump (1 - (r/a)^2)_+^3.
 *
 * f(r) = amplitude_f * B(r/a), g(r) = amplitude_g * B(r/a). The bump is C^2,
 * non-negative and vanishes identically for r >= a.
 */
struct DataProfile {
    double support_radius = 1.0;
    double amplitude_f = 0.0;
    double amplitude_g = 1.0;

    bool operator==(const DataProfile&) const = default;

    [[nodiscard]] static double bump(double s) {
        if (s >= 1.0) return 0.0;
        const double w = 1.0 - s * s;
        return w * w * w;
    }
    /// d/ds of the bump.
    [[nodiscard]] static double bump_derivative(double s) {
        if (s >= 1.0) return 0.0;
        const double w = 1.0 - s * s;
        return -6.0 * s * w * w;
    }

    [[nodiscard]] double f(double r) const { return amplitude_f * bump(r / support_radius); }
    [[nodiscard]] double g(double r) const { return amplitude_g * bump(r / support_radius); }
    [[nodiscard]] double f_prime(double r) const {
        return amplitude_f * bump_derivative(r / support_radius) / support_radius;
    }

    /// Checks the data hypotheses: non-negativity on a fine grid, exact zero past the support, g not identically zero.
    void validate(double R) const {
        if (!(support_radius > 0.0) || !(support_radius <= R))
            throw ValidationError("data support radius must lie in (0, R]");
        if (!(amplitude_f >= 0.0)) throw ValidationError("f amplitude must be >= 0");
        if (!(amplitude_g > 0.0)) throw ValidationError("g must not vanish identically (amplitude_g > 0)");
        constexpr int kSamples = 4096;
        for (int i = 0; i <= kSamples; ++i) {
            const double r = 1.25 * support_radius * i / kSamples;
            if (f(r) < 0.0 || g(r) < 0.0) throw ValidationError("data must be non-negative");
            if (r >= support_radius && (f(r) != 0.0 || g(r) != 0.0))
                throw ValidationError("data must vanish beyond the support radius");
        }
    }
};

[[nodiscard]] inline DataProfile make_bump_data(double support_radius, double amplitude_f, double amplitude_g) {
    if (!(support_radius > 0.0)) throw ValidationError("support radius must be > 0");
    if (!(amplitude_f >= 0.0)) throw ValidationError("amplitude_f must be >= 0");
    if (!(amplitude_g > 0.0)) throw ValidationError("amplitude_g must be > 0: g must not vanish identically");
    return DataProfile{support_radius, amplitude_f, amplitude_g};
}

}  // namespace glassey

#endif  // GLASSEY_CORE_MODEL_HPP
