/**
 * @file radial_state.hpp
 * @brief Radial grid, discrete state (u, u_t) and the volume weights shared
 *        by the solver and the functionals.
 */
#ifndef GLASSEY_RADIAL_STATE_HPP
#define GLASSEY_RADIAL_STATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "glassey/core_model.hpp"
#include "glassey/quadrature.hpp"

namespace glassey {

/**
 * @brief Uniform grid r_i = i dr, i = 0..nodes, with a homogeneous Dirichlet node at r_max = nodes dr.
 */
struct RadialGrid {
    int n = 1;
    double dr = 0.01;
    int nodes = 100;

    [[nodiscard]] double r_max() const { return nodes * dr; }
    [[nodiscard]] double r(int i) const { return i * dr; }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(nodes) + 1; }

    /// Smallest grid that keeps the support t + R strictly inside the domain until t_final.
    static RadialGrid covering(int n, double dr, double t_final, double R) {
        if (!(dr > 0.0)) throw ValidationError("dr must be > 0");
        RadialGrid grid;
        grid.n = n;
        grid.dr = dr;
        grid.nodes = static_cast<int>(std::ceil((t_final + R) / dr)) + 8;
        return grid;
    }

    void validate(double t_final, double R) const {
        if (n < 1) throw ValidationError("grid dimension must be >= 1");
        if (!(dr > 0.0)) throw ValidationError("dr must be > 0");
        if (nodes < 4) throw ValidationError("grid needs at least 4 nodes");
        if (r_max() < t_final + R + 2.0 * dr)
            throw ValidationError("r_max must be >= t_final + R + 2 dr (support would reach the boundary)");
    }

    /**
     * @brief Volume weights w_i ≈ ∫ over the cell around r_i of |S^{n-1}| r^{n-1} dr.
     *
     * Interior: |S^{n-1}| r_i^{n-1} dr; origin: |S^{n-1}| (dr/2)^n / n; boundary: half cell.
     * For n = 1 this is the trapezoid rule on the full line.
     */
    [[nodiscard]] std::vector<double> volume_weights() const {
        const double omega = sphere_area(n);
        std::vector<double> w(size());
        w[0] = omega * std::pow(0.5 * dr, n) / n;
        for (int i = 1; i <= nodes; ++i) w[i] = omega * std::pow(r(i), n - 1) * dr;
        w[nodes] *= 0.5;
        return w;
    }
};

/// Discrete (u, v = u_t) on a RadialGrid.
struct RadialState {
    std::vector<double> u;
    std::vector<double> v;
    double t = 0.0;
    double dt = 0.0;
    std::int64_t step_count = 0;
    bool blown_up = false;
    int front = 0;  ///< last node that may be nonzero

    [[nodiscard]] double max_abs_v() const {
        double m = 0.0;
        for (int i = 0; i <= front && i < static_cast<int>(v.size()); ++i) m = std::max(m, std::abs(v[i]));
        return m;
    }
    [[nodiscard]] double max_abs_u() const {
        double m = 0.0;
        for (int i = 0; i <= front && i < static_cast<int>(u.size()); ++i) m = std::max(m, std::abs(u[i]));
        return m;
    }
};

/// State with u = ε f, u_t = ε g sampled on the grid.
[[nodiscard]] inline RadialState initial_state(const RadialGrid& grid, const DataProfile& data, double eps) {
    RadialState state;
    state.u.assign(grid.size(), 0.0);
    state.v.assign(grid.size(), 0.0);
    int front = 0;
    for (int i = 0; i < grid.nodes; ++i) {
        const double r = grid.r(i);
        state.u[i] = eps * data.f(r);
        state.v[i] = eps * data.g(r);
        if (state.u[i] != 0.0 || state.v[i] != 0.0) front = i;
    }
    state.front = std::min(front + 1, grid.nodes - 1);
    return state;
}

}  // namespace glassey

#endif  // GLASSEY_RADIAL_STATE_HPP
