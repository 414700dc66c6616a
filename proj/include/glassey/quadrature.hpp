/**
 * @file quadrature.hpp
 * @brief Gauss-Legendre rules and composite integration helpers.
 */
#ifndef GLASSEY_QUADRATURE_HPP
#define GLASSEY_QUADRATURE_HPP

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace glassey {

/// Gauss-Legendre nodes and weights on [-1, 1].
class GaussLegendre {
  public:
    explicit GaussLegendre(int order) : nodes_(order), weights_(order) {
        if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be >= 1");
        const int m = (order + 1) / 2;
        for (int i = 0; i < m; ++i) {
            // Tricomi initial guess, then Newton on P_order.
            double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= order; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = order * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes_[i] = -x;
            nodes_[order - 1 - i] = x;
            weights_[i] = w;
            weights_[order - 1 - i] = w;
        }
    }

    [[nodiscard]] int order() const { return static_cast<int>(nodes_.size()); }
    [[nodiscard]] std::span<const double> nodes() const { return nodes_; }
    [[nodiscard]] std::span<const double> weights() const { return weights_; }

    /// Integral of fn over [a, b] with a single panel.
    template <class Fn>
    [[nodiscard]] double integrate(Fn&& fn, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * fn(mid + half * nodes_[i]);
        return half * sum;
    }

    /// Composite rule with `panels` equal panels on [a, b].
    template <class Fn>
    [[nodiscard]] double integrate_composite(Fn&& fn, double a, double b, int panels) const {
        const double h = (b - a) / panels;
        double sum = 0.0;
        for (int k = 0; k < panels; ++k) sum += integrate(fn, a + k * h, a + (k + 1) * h);
        return sum;
    }

  private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Trapezoid rule on samples y over abscissae x (same length, x increasing).
[[nodiscard]] inline double trapezoid(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return sum;
}

/// Surface area of the unit sphere S^{n-1} in R^n: 2π^{n/2}/Γ(n/2). Equals 2 for n = 1.
[[nodiscard]] inline double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace glassey

#endif  // GLASSEY_QUADRATURE_HPP
