// Independent reference computations used only by the tests. None of these
// call into the library's quadrature, special-function or ODE code.
#ifndef GLASSEY_TESTS_ORACLES_HPP
#define GLASSEY_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace oracle {

/// Adaptive Simpson on [a, b] to absolute tolerance tol.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 50) {
    struct Rec {
        const std::function<double(double)>& f;
        double run(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m);
            const double rm = 0.5 * (m + b);
            const double flm = f(lm);
            const double frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double diff = left + right - whole;
            if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
            return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    } rec{f};
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec.run(a, b, fa, fm, fb, whole, tol, depth);
}

/// φ₁(r) for n >= 2 from the standard library Bessel function: (2π)^{n/2} r^{1-n/2} I_{n/2-1}(r).
inline double phi1_bessel_std(double r, int n) {
    const double nu = 0.5 * n - 1.0;
    if (r == 0.0) return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
    return std::pow(2.0 * std::numbers::pi, 0.5 * n) * std::pow(r, 1.0 - 0.5 * n) * std::cyl_bessel_i(nu, r);
}

/// φ₁(r) e^{-r} by adaptive Simpson of |S^{n-2}| ∫₀^π e^{r(cosθ - 1)} sin^{n-2}θ dθ (n >= 2).
inline double phi1_scaled_simpson(double r, int n) {
    const double omega_nm2 = n == 2 ? 2.0 : 2.0 * std::pow(std::numbers::pi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n - 1));
    auto f = [&](double th) { return std::exp(r * (std::cos(th) - 1.0)) * std::pow(std::sin(th), n - 2); };
    return omega_nm2 * adaptive_simpson(f, 0.0, std::numbers::pi, 1e-14);
}

/// Antiderivative of the bump (1 - s²)³ on [-1, 1], constant beyond.
inline double bump_antiderivative(double s) {
    const double c = std::clamp(s, -1.0, 1.0);
    const double c2 = c * c;
    return c * (1.0 - c2 + 0.6 * c2 * c2 - c2 * c2 * c2 / 7.0);
}

/// 1D free wave with u(0) = 0, u_t(0) = even bump of unit amplitude: ½ ∫_{x-t}^{x+t} g.
inline double dalembert(double x, double t) { return 0.5 * (bump_antiderivative(x + t) - bump_antiderivative(x - t)); }

/**
 * Hitting time of H = level for H' = A (1+t)^{-k} H^p, H(0) = H0.
 *
 * Integrates τ = log(1+t) as a function of s = log(H / H0),
 * dτ/ds = exp((k-1)τ) H0^{1-p} e^{(1-p)s} / A, with an adaptive Dormand-Prince 5(4)
 * pair at relative tolerance 1e-13. Returns +inf when τ diverges before the level.
 */
inline double ode_hitting_time(double A, double k, double p, double H0, double level = 1e40) {
    const double s_end = std::log(level / H0);
    const double log_c = (1.0 - p) * std::log(H0) - std::log(A);
    auto f = [&](double s, double tau) { return std::exp((k - 1.0) * tau + log_c + (1.0 - p) * s); };
    constexpr double kDivergent = 700.0;
    double s = 0.0;
    double tau = 0.0;
    double h = std::min(1e-3, 1e-3 / f(0.0, 0.0));
    while (s < s_end) {
        h = std::min(h, s_end - s);
        const double k1 = f(s, tau);
        const double k2 = f(s + h / 5, tau + h * (k1 / 5));
        const double k3 = f(s + 3 * h / 10, tau + h * (3 * k1 / 40 + 9 * k2 / 40));
        const double k4 = f(s + 4 * h / 5, tau + h * (44 * k1 / 45 - 56 * k2 / 15 + 32 * k3 / 9));
        const double k5 = f(s + 8 * h / 9, tau + h * (19372 * k1 / 6561 - 25360 * k2 / 2187 + 64448 * k3 / 6561 -
                                                      212 * k4 / 729));
        const double k6 = f(s + h, tau + h * (9017 * k1 / 3168 - 355 * k2 / 33 + 46732 * k3 / 5247 + 49 * k4 / 176 -
                                              5103 * k5 / 18656));
        const double next = tau + h * (35 * k1 / 384 + 500 * k3 / 1113 + 125 * k4 / 192 - 2187 * k5 / 6784 + 11 * k6 / 84);
        const double k7 = f(s + h, next);
        const double err = h * std::abs(71 * k1 / 57600 - 71 * k3 / 16695 + 71 * k4 / 1920 - 17253 * k5 / 339200 +
                                        22 * k6 / 525 - k7 / 40);
        const double tol = 1e-15 + 1e-13 * std::abs(next);
        if (!std::isfinite(next) || next > kDivergent) {
            if (h < 1e-12) return std::numeric_limits<double>::infinity();
            h *= 0.25;
            continue;
        }
        if (err <= tol) {
            s += h;
            tau = next;
        }
        const double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(tol / err, 0.2);
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return std::expm1(tau);
}

}  // namespace oracle

#endif  // GLASSEY_TESTS_ORACLES_HPP
