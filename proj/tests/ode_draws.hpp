// Random comparison-ODE coefficients shared by the unit and acceptance tests.
#ifndef GLASSEY_TESTS_ODE_DRAWS_HPP
#define GLASSEY_TESTS_ODE_DRAWS_HPP

#include <cmath>
#include <random>
#include <vector>

#include "glassey/lifespan_bounds.hpp"

namespace oracle {

/// Draws cycling through k < 1, k = 1 and k > 1. Supercritical draws keep X below half the
/// finite-time threshold A/(k-1) so the hitting time stays finite and well conditioned.
inline std::vector<glassey::OdeCoefficients> ode_draws(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };
    std::vector<glassey::OdeCoefficients> out;
    while (static_cast<int>(out.size()) < count) {
        glassey::OdeCoefficients c;
        c.A = log_uniform(0.1, 10.0);
        c.H0 = log_uniform(1e-3, 1.0);
        c.p = 1.2 + 2.8 * unit(rng);
        switch (out.size() % 3) {
            case 0: c.k = 0.99 * unit(rng); break;
            case 1: c.k = 1.0; break;
            default: {
                c.k = 1.01 + 2.0 * unit(rng);
                const double X = std::pow(c.H0, 1.0 - c.p) / (c.p - 1.0);
                if (!(X < 0.5 * c.A / (c.k - 1.0))) continue;
            }
        }
        // Keep log(1+T) moderate so the oracle's step count stays bounded.
        if (glassey::solve_comparison_ode(c).log1p_T > 60.0) continue;
        out.push_back(c);
    }
    return out;
}

}  // namespace oracle

#endif  // GLASSEY_TESTS_ODE_DRAWS_HPP
