/**
 * @file multipliers.hpp
 * @brief Integrating factors m(t) with m'/m equal to the damping coefficient.
 *
 *  - scattering:      m(t)  = exp(μ (1+t)^{1-β} / (1-β)),  β > 1, bounded in [m(0), 1]
 *  - scale invariant: m₁(t) = (1+t)^μ,                      unbounded for μ > 0
 *  - general:         m(t)  = exp(-∫_t^∞ b(s) ds),          b ∈ L¹ from a parametric family
 */
#ifndef GLASSEY_MULTIPLIERS_HPP
#define GLASSEY_MULTIPLIERS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <variant>

#include "glassey/core_model.hpp"
#include "glassey/quadrature.hpp"

namespace glassey {

[[nodiscard]] inline double m_scattering(double t, double mu, double beta) {
    if (!(beta > 1.0)) throw ValidationError("m_scattering requires beta > 1");
    if (!(t >= 0.0) || !(mu >= 0.0)) throw ValidationError("m_scattering requires t >= 0, mu >= 0");
    // (μ/(1-β)) <= 0 times (1+t)^{1-β} in (0, 1] keeps the exponent in [μ/(1-β), 0].
    return std::exp(mu / (1.0 - beta) * std::pow(1.0 + t, 1.0 - beta));
}

[[nodiscard]] inline double m_scale_invariant(double t, double mu) {
    if (!(t >= 0.0) || !(mu >= 0.0)) throw ValidationError("m_scale_invariant requires t >= 0, mu >= 0");
    return std::pow(1.0 + t, mu);
}

/// b(s) = c (1+s)^{-decay}; integrable iff decay > 1.
struct PowerTailDamping {
    double c = 1.0;
    double decay = 2.0;
};
/// b(s) = c e^{-rate s}.
struct ExponentialDamping {
    double c = 1.0;
    double rate = 1.0;
};
/// b(s) = c (1 - s/end)_+^2, zero after `end`.
struct CompactDamping {
    double c = 1.0;
    double end = 1.0;
};

using DampingProfile = std::variant<PowerTailDamping, ExponentialDamping, CompactDamping>;

[[nodiscard]] inline double damping_value(const DampingProfile& b, double s) {
    return std::visit(
        [s](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PowerTailDamping>) {
                return d.c * std::pow(1.0 + s, -d.decay);
            } else if constexpr (std::is_same_v<T, ExponentialDamping>) {
                return d.c * std::exp(-d.rate * s);
            } else {
                if (s >= d.end) return 0.0;
                const double w = 1.0 - s / d.end;
                return d.c * w * w;
            }
        },
        b);
}

/// ∫_t^∞ b(s) ds in closed form. Throws when the tail diverges.
[[nodiscard]] inline double damping_tail_exact(const DampingProfile& b, double t) {
    return std::visit(
        [t](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PowerTailDamping>) {
                if (!(d.decay > 1.0)) throw std::domain_error("power-tail damping with decay <= 1 is not integrable");
                return d.c * std::pow(1.0 + t, 1.0 - d.decay) / (d.decay - 1.0);
            } else if constexpr (std::is_same_v<T, ExponentialDamping>) {
                if (!(d.rate > 0.0)) throw std::domain_error("exponential damping needs rate > 0");
                return d.c * std::exp(-d.rate * t) / d.rate;
            } else {
                if (t >= d.end) return 0.0;
                const double w = 1.0 - t / d.end;
                return d.c * d.end * w * w * w / 3.0;
            }
        },
        b);
}

inline void validate_damping(const DampingProfile& b) {
    std::visit(
        [](const auto& d) {
            if (!(d.c >= 0.0)) throw ValidationError("damping coefficient must be >= 0");
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, CompactDamping>) {
                if (!(d.end > 0.0)) throw ValidationError("compact damping needs end > 0");
            }
        },
        b);
}

enum class TailScheme { closed_form, geometric_panels };

/**
 * @brief ∫_t^∞ b(s) ds by Gauss-Legendre on panels whose length doubles in (1+s).
 *
 * Panel contributions of an integrable tail eventually shrink geometrically;
 * the unsummed remainder is estimated from the last contribution ratio and
 * added once it falls below 1e-13 of the running total. A ratio that does not
 * settle below 1 means b is not integrable and std::domain_error is thrown.
 */
[[nodiscard]] inline double damping_tail_quadrature(const DampingProfile& b, double t) {
    static const GaussLegendre rule(24);
    auto integrand = [&](double s) { return damping_value(b, s); };
    double total = 0.0;
    double prev = 0.0;
    double a = t;
    double width = 1.0 + t;
    for (int panel = 0; panel < 400; ++panel) {
        // Sub-divide long panels so the exponential family stays resolved.
        const int sub = std::clamp(static_cast<int>(std::ceil(width)), 1, 64);
        const double part = rule.integrate_composite(integrand, a, a + width, sub);
        total += part;
        if (part == 0.0 && total == 0.0 && panel > 2) return 0.0;
        if (panel >= 3) {
            if (part == 0.0) return total;
            const double ratio = part / prev;
            if (ratio < 0.99) {
                const double remainder = part * ratio / (1.0 - ratio);
                if (remainder <= 1e-13 * total) return total + remainder;
            }
        }
        prev = part;
        a += width;
        width *= 2.0;
        if (!std::isfinite(a)) break;
    }
    throw std::domain_error("damping tail does not converge: b is not integrable on [t, inf)");
}

struct ScatteringKind {
    double mu = 0.0;
    double beta = 2.0;
};
struct ScaleInvariantKind {
    double mu = 0.0;
};
struct GeneralKind {
    DampingProfile b;
    TailScheme scheme = TailScheme::closed_form;
};

/// A multiplier m(t) together with its logarithm and logarithmic derivative (the damping b(t)).
class Multiplier {
  public:
    using Kind = std::variant<ScatteringKind, ScaleInvariantKind, GeneralKind>;

    explicit Multiplier(Kind kind) : kind_(std::move(kind)) {
        std::visit(
            [](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, ScatteringKind>) {
                    if (!(k.beta > 1.0)) throw ValidationError("scattering multiplier needs beta > 1");
                    if (!(k.mu >= 0.0)) throw ValidationError("mu must be >= 0");
                } else if constexpr (std::is_same_v<T, ScaleInvariantKind>) {
                    if (!(k.mu >= 0.0)) throw ValidationError("mu must be >= 0");
                } else {
                    validate_damping(k.b);
                }
            },
            kind_);
    }

    static Multiplier scattering(double mu, double beta) { return Multiplier(ScatteringKind{mu, beta}); }
    static Multiplier scale_invariant(double mu) { return Multiplier(ScaleInvariantKind{mu}); }
    static Multiplier general(DampingProfile b, TailScheme scheme = TailScheme::closed_form) {
        return Multiplier(GeneralKind{b, scheme});
    }

    /// m for μ(1+t)^{-β}: scattering when β > 1, m₁ when β = 1.
    static Multiplier for_params(const ModelParams& params) {
        if (params.scale_invariant()) return scale_invariant(params.mu);
        return scattering(params.mu, params.beta);
    }

    [[nodiscard]] const Kind& kind() const { return kind_; }

    [[nodiscard]] double log_value(double t) const {
        return std::visit(
            [t](const auto& k) -> double {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, ScatteringKind>) {
                    return k.mu / (1.0 - k.beta) * std::pow(1.0 + t, 1.0 - k.beta);
                } else if constexpr (std::is_same_v<T, ScaleInvariantKind>) {
                    return k.mu * std::log1p(t);
                } else {
                    return k.scheme == TailScheme::closed_form ? -damping_tail_exact(k.b, t)
                                                               : -damping_tail_quadrature(k.b, t);
                }
            },
            kind_);
    }

    [[nodiscard]] double value(double t) const {
        if (const auto* k = std::get_if<ScatteringKind>(&kind_)) return m_scattering(t, k->mu, k->beta);
        if (const auto* k = std::get_if<ScaleInvariantKind>(&kind_)) return m_scale_invariant(t, k->mu);
        return std::exp(log_value(t));
    }

    /// m'(t)/m(t), which equals the damping coefficient b(t).
    [[nodiscard]] double log_derivative(double t) const {
        return std::visit(
            [t](const auto& k) -> double {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, ScatteringKind>) {
                    return k.mu * std::pow(1.0 + t, -k.beta);
                } else if constexpr (std::is_same_v<T, ScaleInvariantKind>) {
                    return k.mu / (1.0 + t);
                } else {
                    return damping_value(k.b, t);
                }
            },
            kind_);
    }

    /// m(t0)/m(t1) = exp(-∫_{t0}^{t1} b), the exact decay factor of the damping over a step.
    [[nodiscard]] double decay_factor(double t0, double t1) const {
        return std::exp(log_value(t0) - log_value(t1));
    }

    [[nodiscard]] bool is_trivial() const {
        if (const auto* k = std::get_if<ScatteringKind>(&kind_)) return k->mu == 0.0;
        if (const auto* k = std::get_if<ScaleInvariantKind>(&kind_)) return k->mu == 0.0;
        return false;
    }

  private:
    Kind kind_;
};

/// exp(-∫_t^∞ b) for a parametric integrable b.
[[nodiscard]] inline double m_general(double t, const DampingProfile& b, TailScheme scheme) {
    if (!(t >= 0.0)) throw ValidationError("m_general requires t >= 0");
    return Multiplier::general(b, scheme).value(t);
}

/// max over t_grid of |(log m(t+h) - log m(t-h))/(2h) - b(t)|.
[[nodiscard]] inline double check_log_derivative(const Multiplier& m, std::span<const double> t_grid, double h) {
    if (!(h > 0.0)) throw ValidationError("step h must be > 0");
    double worst = 0.0;
    for (double t : t_grid) {
        if (t - h < 0.0) throw ValidationError("t_grid must stay at least h inside t >= 0");
        const double fd = (m.log_value(t + h) - m.log_value(t - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - m.log_derivative(t)));
    }
    return worst;
}

}  // namespace glassey

#endif  // GLASSEY_MULTIPLIERS_HPP
