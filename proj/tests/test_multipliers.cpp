#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "glassey/multipliers.hpp"

using namespace glassey;

TEST(Scattering, Examples) {
    EXPECT_NEAR(m_scattering(0.0, 2.0, 2.0), std::exp(-2.0), 1e-15);
    EXPECT_NEAR(m_scattering(1.0, 1.0, 2.0), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(m_scattering(1e12, 3.0, 2.0), 1.0, 1e-11);
    EXPECT_THROW((void)m_scattering(0.0, 1.0, 1.0), ValidationError);
    EXPECT_THROW((void)Multiplier::scattering(1.0, 0.9), ValidationError);
}

TEST(ScaleInvariant, Examples) {
    EXPECT_DOUBLE_EQ(m_scale_invariant(3.0, 2.0), 16.0);
    EXPECT_DOUBLE_EQ(m_scale_invariant(0.0, 4.2), 1.0);
    EXPECT_NEAR(m_scale_invariant(1.0, 0.5), std::sqrt(2.0), 1e-15);
    const auto m = Multiplier::scale_invariant(2.0);
    EXPECT_DOUBLE_EQ(m.log_derivative(1.0), 1.0);
}

TEST(ScaleInvariant, Unbounded) {
    const auto m = Multiplier::scale_invariant(0.5);
    double prev = m.value(0.0);
    for (double t = 10.0; t < 1e12; t *= 10.0) {
        const double v = m.value(t);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_GT(prev, 1e5);
}

TEST(Scattering, BoundOnRandomSamples) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> log_t(-6.0, 8.0);
    std::uniform_real_distribution<double> mu_dist(0.0, 10.0);
    // β >= 1.05 keeps m(0) >= e^{-200}, away from underflow.
    std::uniform_real_distribution<double> beta_dist(1.05, 6.0);
    int violations = 0;
    for (int i = 0; i < 1'000'000; ++i) {
        const double t = i % 10 == 0 ? 0.0 : std::pow(10.0, log_t(rng));
        const double mu = mu_dist(rng);
        const double beta = beta_dist(rng);
        const double m = m_scattering(t, mu, beta);
        const double m0 = m_scattering(0.0, mu, beta);
        if (!(m <= 1.0 && m >= m0 && m0 > 0.0)) ++violations;
    }
    EXPECT_EQ(violations, 0);
}

TEST(LogDerivative, ScatteringResidual) {
    std::vector<double> grid;
    for (double t = 0.01; t <= 50.0; t += 0.01) grid.push_back(t);
    EXPECT_LT(check_log_derivative(Multiplier::scattering(1.0, 2.0), grid, 1e-4), 1e-7);
    EXPECT_LT(check_log_derivative(Multiplier::scale_invariant(0.5), grid, 1e-4), 1e-7);
    EXPECT_EQ(check_log_derivative(Multiplier::scattering(0.0, 2.0), grid, 1e-4), 0.0);
    EXPECT_EQ(check_log_derivative(Multiplier::scale_invariant(0.0), grid, 1e-4), 0.0);
}

TEST(LogDerivative, SecondOrderInStep) {
    const std::vector<double> grid{0.5, 1.0, 2.0};
    const auto m = Multiplier::scattering(2.0, 2.5);
    const double e1 = check_log_derivative(m, grid, 1e-2);
    const double e2 = check_log_derivative(m, grid, 5e-3);
    EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(LogDerivative, Errors) {
    const std::vector<double> grid{0.5};
    EXPECT_THROW((void)check_log_derivative(Multiplier::scattering(1, 2), grid, 1.0), ValidationError);
    EXPECT_THROW((void)check_log_derivative(Multiplier::scattering(1, 2), grid, 0.0), ValidationError);
}

TEST(General, ReproducesScatteringOnPowerTail) {
    for (double mu : {0.5, 1.0, 2.0}) {
        for (double beta : {1.5, 2.0, 3.0}) {
            const DampingProfile b = PowerTailDamping{mu, beta};
            for (double t : {0.0, 0.3, 1.0, 10.0, 500.0}) {
                const double ref = m_scattering(t, mu, beta);
                EXPECT_NEAR(m_general(t, b, TailScheme::closed_form), ref, 1e-10);
                EXPECT_NEAR(m_general(t, b, TailScheme::geometric_panels), ref, 1e-10)
                    << "mu=" << mu << " beta=" << beta << " t=" << t;
            }
        }
    }
}

TEST(General, Examples) {
    EXPECT_NEAR(m_general(0.0, PowerTailDamping{2.0, 2.0}, TailScheme::geometric_panels), std::exp(-2.0), 1e-12);
    EXPECT_EQ(m_general(0.0, PowerTailDamping{0.0, 2.0}, TailScheme::closed_form), 1.0);
    EXPECT_EQ(m_general(5.0, ExponentialDamping{0.0, 1.0}, TailScheme::geometric_panels), 1.0);
    EXPECT_NEAR(m_general(0.0, ExponentialDamping{1.0, 1.0}, TailScheme::closed_form), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(m_general(0.0, ExponentialDamping{1.0, 1.0}, TailScheme::geometric_panels), std::exp(-1.0), 1e-12);
    EXPECT_NEAR(m_general(0.0, CompactDamping{3.0, 2.0}, TailScheme::geometric_panels), std::exp(-2.0), 1e-12);
    EXPECT_EQ(m_general(2.5, CompactDamping{3.0, 2.0}, TailScheme::closed_form), 1.0);
}

TEST(General, NonIntegrableTailRejected) {
    EXPECT_THROW((void)m_general(0.0, PowerTailDamping{1.0, 1.0}, TailScheme::closed_form), std::domain_error);
    EXPECT_THROW((void)m_general(0.0, PowerTailDamping{1.0, 0.8}, TailScheme::geometric_panels), std::domain_error);
    EXPECT_THROW((void)m_general(0.0, PowerTailDamping{1.0, 1.0}, TailScheme::geometric_panels), std::domain_error);
    EXPECT_THROW((void)Multiplier::general(PowerTailDamping{-1.0, 2.0}), ValidationError);
}

TEST(General, LogDerivativeIsDamping) {
    std::vector<double> grid;
    for (double t = 0.1; t <= 20.0; t += 0.1) grid.push_back(t);
    EXPECT_LT(check_log_derivative(Multiplier::general(ExponentialDamping{2.0, 0.7}), grid, 1e-4), 1e-7);
    EXPECT_LT(check_log_derivative(Multiplier::general(PowerTailDamping{1.0, 2.5}), grid, 1e-4), 1e-7);
}

TEST(Multiplier, AllKindsNondecreasing) {
    const std::vector<Multiplier> ms{Multiplier::scattering(1.5, 2.0), Multiplier::scale_invariant(0.7),
                                     Multiplier::general(PowerTailDamping{1.0, 3.0}),
                                     Multiplier::general(ExponentialDamping{1.0, 0.5}, TailScheme::geometric_panels),
                                     Multiplier::general(CompactDamping{2.0, 4.0})};
    for (const auto& m : ms) {
        double prev = m.value(0.0);
        EXPECT_GT(prev, 0.0);
        for (double t = 0.05; t < 30.0; t += 0.05) {
            const double v = m.value(t);
            EXPECT_GE(v, prev);
            EXPECT_GE(m.log_derivative(t), 0.0);
            prev = v;
        }
    }
}

TEST(Multiplier, DecayFactorMatchesRatio) {
    const auto m = Multiplier::scattering(1.0, 2.0);
    EXPECT_NEAR(m.decay_factor(0.5, 1.5), m.value(0.5) / m.value(1.5), 1e-15);
    const auto m1 = Multiplier::scale_invariant(2.0);
    EXPECT_NEAR(m1.decay_factor(1.0, 3.0), 0.25, 1e-15);
}

TEST(Multiplier, ForParamsSelectsKind) {
    EXPECT_TRUE(std::holds_alternative<ScaleInvariantKind>(Multiplier::for_params({.mu = 1, .beta = 1}).kind()));
    EXPECT_TRUE(std::holds_alternative<ScatteringKind>(Multiplier::for_params({.mu = 1, .beta = 2}).kind()));
}
