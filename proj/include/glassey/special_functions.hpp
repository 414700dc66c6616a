/**
 * @file special_functions.hpp
 * @brief The test function φ₁(x) = ∫_{S^{n-1}} e^{x·ω} dS_ω, the weight
 *        ψ(x,t) = e^{-t} φ₁(x), and the envelope constant C₁ with
 *        ∫_{|x|<=t+R} ψ dx <= C₁ (1+t)^{(n-1)/2}.
 *
 * φ₁ is radial and grows like e^r, so the primary representation is the
 * scaled value e^{-r} φ₁(r); unscaled evaluation is refused past r = 700.
 * For n >= 2 the closed form is φ₁(r) = (2π)^{n/2} r^{1-n/2} I_{n/2-1}(r),
 * evaluated through the ascending series
 *   φ₁(r) = 2π^{n/2} Σ_k (r²/4)^k / (k! Γ(k+n/2))
 * for r <= 15 and the large-argument expansion of I_ν above. A direct
 * quadrature over the sphere is kept as an independent cross-check.
 */
#ifndef GLASSEY_SPECIAL_FUNCTIONS_HPP
#define GLASSEY_SPECIAL_FUNCTIONS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "glassey/core_model.hpp"
#include "glassey/quadrature.hpp"

namespace glassey {

namespace detail {

inline constexpr double kSeriesCutoff = 15.0;

/// e^{-r} φ₁(r) by the ascending series; valid for every n >= 1.
[[nodiscard]] inline double phi1_scaled_series(double r, int n) {
    const double nu1 = 0.5 * n;  // k + n/2
    const double x = 0.25 * r * r;
    double term = 1.0 / std::tgamma(nu1);
    double sum = term;
    for (int k = 0; k < 500; ++k) {
        term *= x / ((k + 1.0) * (k + nu1));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return 2.0 * std::pow(std::numbers::pi, nu1) * sum * std::exp(-r);
}

/// e^{-r} I_ν(r) from the large-argument expansion, summed until the terms stop shrinking.
[[nodiscard]] inline double bessel_i_scaled_asymptotic(double nu, double r) {
    const double mu4 = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu4 - odd * odd) / (8.0 * k * r);
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (term == 0.0 || std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * r);
}

}  // namespace detail

/// e^{-r} φ₁(r). Finite for every r >= 0.
[[nodiscard]] inline double phi1_scaled(double r, int n) {
    if (!(r >= 0.0)) throw ValidationError("phi1 requires r >= 0");
    if (n < 1) throw ValidationError("phi1 requires n >= 1");
    if (n == 1) return 1.0 + std::exp(-2.0 * r);
    if (r <= detail::kSeriesCutoff) return detail::phi1_scaled_series(r, n);
    const double nu = 0.5 * n - 1.0;
    return std::pow(2.0 * std::numbers::pi, 0.5 * n) * std::pow(r, 1.0 - 0.5 * n) *
           detail::bessel_i_scaled_asymptotic(nu, r);
}

inline constexpr double kPhi1MaxRadius = 700.0;

/// φ₁(r) for |x| = r. Throws std::overflow_error past r = 700; use phi1_scaled there.
[[nodiscard]] inline double phi1(double r, int n) {
    if (r > kPhi1MaxRadius) throw std::overflow_error("phi1: r beyond 700 overflows, use phi1_scaled");
    if (n == 1) {
        if (!(r >= 0.0)) throw ValidationError("phi1 requires r >= 0");
        return std::exp(r) + std::exp(-r);
    }
    return std::exp(r) * phi1_scaled(r, n);
}

/// ψ(r, t) = e^{-t} φ₁(r), evaluated as e^{r-t} (e^{-r} φ₁) so it stays finite on the light cone.
[[nodiscard]] inline double psi(double r, double t, int n) {
    if (!(t >= 0.0)) throw ValidationError("psi requires t >= 0");
    return std::exp(r - t) * phi1_scaled(r, n);
}

/**
 * @brief φ₁ by direct quadrature over S^{n-1}.
 *
 * Uses ∫_{S^{n-1}} e^{r ω₁} dS = |S^{n-2}| ∫₀^π e^{r cos θ} sin^{n-2}θ dθ with
 * composite Gauss-Legendre in θ; returns the scaled value e^{-r} φ₁(r).
 */
[[nodiscard]] inline double phi1_scaled_sphere_quadrature(double r, int n, int order = 20, int panels = 64) {
    if (n < 2) throw ValidationError("sphere quadrature needs n >= 2");
    if (!(r >= 0.0)) throw ValidationError("phi1 requires r >= 0");
    const GaussLegendre rule(order);
    const int power = n - 2;
    const double integral = rule.integrate_composite(
        [&](double theta) {
            const double s = std::sin(theta);
            double w = 1.0;
            for (int i = 0; i < power; ++i) w *= s;
            return std::exp(r * (std::cos(theta) - 1.0)) * w;
        },
        0.0, std::numbers::pi, panels);
    return sphere_area(n - 1) * integral;
}

enum class Phi1Method { closed_form_1d, bessel_series, sphere_quadrature };

/// Selects how φ₁ is evaluated. n = 1 always uses the closed form e^r + e^{-r}.
struct Phi1Evaluator {
    int n = 1;
    Phi1Method method = Phi1Method::bessel_series;
    int quadrature_order = 20;

    [[nodiscard]] double scaled(double r) const {
        if (n == 1 || method == Phi1Method::closed_form_1d) {
            if (n != 1) throw ValidationError("closed_form_1d applies to n = 1 only");
            return phi1_scaled(r, 1);
        }
        if (method == Phi1Method::sphere_quadrature) return phi1_scaled_sphere_quadrature(r, n, quadrature_order);
        return phi1_scaled(r, n);
    }
    [[nodiscard]] double operator()(double r) const {
        if (r > kPhi1MaxRadius) throw std::overflow_error("phi1: r beyond 700 overflows, use scaled()");
        return std::exp(r) * scaled(r);
    }
};

/**
 * @brief Max over r_grid of |φ₁'' + (n-1)/r φ₁' - φ₁| / φ₁, derivatives by centred differences of step h.
 *
 * At r = 0 the radial Laplacian is replaced by its symmetric limit n φ₁''(0).
 * The residual is relative to φ₁(r) so that it is meaningful at large r.
 */
[[nodiscard]] inline double check_psi_identities(int n, std::span<const double> r_grid, double h) {
    if (!(h > 0.0)) throw ValidationError("step h must be > 0");
    double worst = 0.0;
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const double r = r_grid[i];
        if (i > 0 && !(r > r_grid[i - 1])) throw ValidationError("r_grid must be strictly increasing");
        const double centre = phi1_scaled(r, n);
        const double plus = std::exp(h) * phi1_scaled(r + h, n) / centre;
        double residual = 0.0;
        if (r == 0.0) {
            // φ₁ is even in r: φ₁(-h) = φ₁(h).
            const double second = 2.0 * (plus - 1.0) / (h * h);
            residual = n * second - 1.0;
        } else {
            if (r - h < 0.0) throw ValidationError("grid point closer to 0 than h");
            const double minus = std::exp(-h) * phi1_scaled(r - h, n) / centre;
            const double second = (plus - 2.0 + minus) / (h * h);
            const double first = (plus - minus) / (2.0 * h);
            residual = second + (n - 1) / r * first - 1.0;
        }
        worst = std::max(worst, std::abs(residual));
    }
    return worst;
}

struct C1Estimate {
    int n = 1;
    double R = 1.0;
    double value = 0.0;      ///< envelope with safety margin applied
    double q_max = 0.0;      ///< raw max of the sampled ratio
    double t_grid_max = 0.0;
};

inline constexpr double kC1SafetyMargin = 0.05;

/// Sampled ratio q(t_j) = ∫_{|x|<=t+R} ψ dx / (1+t)^{(n-1)/2} on t_j = t_max j/(samples-1).
[[nodiscard]] inline std::vector<double> psi_ball_ratio(int n, double R, double t_max, int samples) {
    if (!(t_max > 0.0)) throw ValidationError("t_max must be > 0");
    if (samples < 2) throw ValidationError("samples must be >= 2");
    if (!(R > 0.0)) throw ValidationError("R must be > 0");
    const GaussLegendre rule(12);
    const double omega = sphere_area(n);
    // K(x) = ∫₀^x e^{r-x} (e^{-r}φ₁(r)) r^{n-1} dr, advanced panel by panel.
    auto segment = [&](double a, double b) {
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.25)));
        return rule.integrate_composite(
            [&](double r) { return std::exp(r - b) * phi1_scaled(r, n) * std::pow(r, n - 1); }, a, b, panels);
    };
    std::vector<double> q(samples);
    double x_prev = 0.0;
    double K = 0.0;
    for (int j = 0; j < samples; ++j) {
        const double t = t_max * j / (samples - 1);
        const double x = t + R;
        K = std::exp(x_prev - x) * K + segment(x_prev, x);
        x_prev = x;
        q[j] = omega * std::exp(R) * K / std::pow(1.0 + t, 0.5 * (n - 1));
    }
    return q;
}

/**
 * @brief Empirical C₁(n, R): 5% above the largest sampled q(t).
 *
 * Throws std::runtime_error when q is still rising by more than 1% per unit
 * time at t_max, i.e. the sampled window has not reached the envelope.
 */
[[nodiscard]] inline C1Estimate estimate_C1(int n, double R, double t_max, int samples) {
    const auto q = psi_ball_ratio(n, R, t_max, samples);
    const double dt = t_max / (samples - 1);
    const double growth = (q[samples - 1] - q[samples - 2]) / dt / q[samples - 1];
    if (growth > 0.01) throw std::runtime_error("estimate_C1: ratio still increasing at t_max; raise t_max");
    C1Estimate est;
    est.n = n;
    est.R = R;
    est.q_max = *std::max_element(q.begin(), q.end());
    est.value = est.q_max * (1.0 + kC1SafetyMargin);
    est.t_grid_max = t_max;
    return est;
}

/// Default sampling used by the run pipeline.
[[nodiscard]] inline C1Estimate default_C1(int n, double R) { return estimate_C1(n, R, 200.0, 801); }

}  // namespace glassey

#endif  // GLASSEY_SPECIAL_FUNCTIONS_HPP
