#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glassey/functionals.hpp"
#include "glassey/radial_solver.hpp"
#include "oracles.hpp"

using namespace glassey;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

RunResult demo_run(const ModelParams& params, const DataProfile& data, double dr, double t_final,
                   SolverOptions options = {}) {
    const auto grid = RadialGrid::covering(params.n, dr, t_final, params.R);
    return run_until_blowup(params, data, grid, t_final, options);
}

double pre_blowup_cut(const RunResult& run) {
    return run.report.blow_up_time ? 0.9 * *run.report.blow_up_time : run.report.final_time;
}
}  // namespace

TEST(DataConstants, MatchOracle) {
    const auto data = make_bump_data(1.0, 2.0, 0.5);
    for (int n = 1; n <= 4; ++n) {
        const double omega = n == 1 ? 2.0 : 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
        auto phi = [n](double r) { return n == 1 ? std::exp(r) + std::exp(-r) : oracle::phi1_bessel_std(r, n); };
        const double Cf = omega * oracle::adaptive_simpson([&](double r) { return data.f(r) * phi(r) * std::pow(r, n - 1); },
                                                           0.0, 1.0, 1e-15);
        const double Cg = omega * oracle::adaptive_simpson([&](double r) { return data.g(r) * phi(r) * std::pow(r, n - 1); },
                                                           0.0, 1.0, 1e-15);
        const auto c = data_constants(data, n);
        EXPECT_LT(rel(c.C_f0, Cf), 1e-10) << n;
        EXPECT_LT(rel(c.C_0g, Cg), 1e-10) << n;
        EXPECT_DOUBLE_EQ(c.C_fg(), c.C_f0 + c.C_0g);
    }
}

TEST(DataConstants, ZeroGRejected) {
    const DataProfile no_g{1.0, 1.0, 0.0};
    EXPECT_THROW((void)data_constants(no_g, 1), ValidationError);
}

TEST(F1, ZeroSolution) {
    const RadialGrid grid{1, 0.01, 300};
    const FunctionalContext ctx(grid, {.n = 1}, make_bump_data(1.0, 0.0, 1.0));
    RadialState zero;
    zero.u.assign(grid.size(), 0.0);
    zero.v.assign(grid.size(), 0.0);
    zero.front = grid.nodes - 1;
    EXPECT_EQ(compute_F1(zero, ctx), 0.0);
    EXPECT_EQ(ctx.J(zero), 0.0);
    EXPECT_EQ(ctx.N(zero), 0.0);
}

TEST(F1, InitialValueMatchesQuadratureOracle) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    const RadialGrid grid{1, 1e-3, 1200};
    const FunctionalContext ctx(grid, {.n = 1, .eps = 1.0}, data);
    const auto state = initial_state(grid, data, 1.0);
    const double oracle_value = 2.0 * oracle::adaptive_simpson(
                                          [&](double r) { return data.f(r) * (std::exp(r) + std::exp(-r)); }, 0.0, 1.0, 1e-15);
    EXPECT_LT(rel(compute_F1(state, ctx), oracle_value), 1e-6);
    EXPECT_LT(rel(compute_F1(state, ctx), ctx.constants().C_f0), 1e-6);
}

TEST(F1, ScalesLinearlyInEps) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    for (int n = 1; n <= 3; ++n) {
        const RadialGrid grid{n, 0.01, 200};
        const FunctionalContext a(grid, {.n = n, .mu = 1, .beta = 2, .eps = 0.1}, data);
        const FunctionalContext b(grid, {.n = n, .mu = 1, .beta = 2, .eps = 0.2}, data);
        const auto sa = initial_state(grid, data, 0.1);
        const auto sb = initial_state(grid, data, 0.2);
        const FunctionalTrace empty;
        EXPECT_EQ(b.F1(sb), 2.0 * a.F1(sa));
        EXPECT_EQ(compute_G(sb, empty, b), 2.0 * compute_G(sa, empty, a));
        EXPECT_EQ(b.initial_level(), 2.0 * a.initial_level());
    }
}

TEST(Functionals, InitialValuesOfGAndH) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    const ModelParams params{.n = 1, .p = 2, .mu = 1, .beta = 2, .eps = 0.1};
    const auto run = demo_run(params, data, 0.005, 2.0);
    const auto c = data_constants(data, 1);
    const double level = 0.5 * std::exp(-1.0) * 0.1 * c.C_0g;
    EXPECT_NEAR(run.trace.H[0], level, 1e-15);
    EXPECT_LT(rel(run.trace.G[0], level), 1e-4);
    EXPECT_GT(run.trace.G[0], 0.0);
}

TEST(Functionals, ScaleInvariantInitialLevel) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    const ModelParams params{.n = 1, .p = 1.5, .mu = 1, .beta = 1, .eps = 0.1};
    const auto run = demo_run(params, data, 0.01, 1.0);
    EXPECT_NEAR(run.trace.H[0], 0.5 * 0.1 * data_constants(data, 1).C_0g, 1e-15);
}

TEST(Functionals, SourceOffKeepsHConstant) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    SolverOptions options;
    options.source = false;
    const auto run = demo_run({.n = 1, .p = 2, .mu = 1, .beta = 2, .eps = 0.1}, data, 0.01, 5.0, options);
    for (double h : run.trace.H) EXPECT_EQ(h, run.trace.H[0]);
}

TEST(Functionals, RunInvariants) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    for (const ModelParams& params : {ModelParams{.n = 1, .p = 2, .mu = 1, .beta = 2, .eps = 0.1},
                                      ModelParams{.n = 1, .p = 1.5, .mu = 0.5, .beta = 1, .eps = 0.1},
                                      ModelParams{.n = 3, .p = 1.8, .mu = 0.5, .beta = 2, .eps = 0.5}}) {
        const auto run = demo_run(params, data, 0.005, 60.0);
        const auto& tr = run.trace;
        const double cut = pre_blowup_cut(run);
        const double tol = 1e-4 * params.eps * tr.C_fg;
        ASSERT_EQ(tr.F1.size(), tr.times.size());
        ASSERT_EQ(tr.G.size(), tr.times.size());
        ASSERT_EQ(tr.H.size(), tr.times.size());
        ASSERT_EQ(tr.flag_H_ode.size(), tr.times.size());
        for (std::size_t j = 1; j < tr.size(); ++j) EXPECT_GE(tr.H[j], tr.H[j - 1]);
        for (std::size_t j = 0; j < tr.size() && tr.times[j] <= cut; ++j) {
            EXPECT_GT(tr.F1[j], 0.0) << "t=" << tr.times[j];
            EXPECT_GE(tr.G[j], std::exp(-2.0 * tr.times[j]) * tr.G[0] - tol) << "t=" << tr.times[j];
        }
        EXPECT_GE(pass_rate(tr.times, tr.flag_lemma_F1, cut), 0.99);
        EXPECT_GE(pass_rate(tr.times, tr.flag_H_ode, cut), 0.99);
        EXPECT_GE(pass_rate(tr.times, tr.flag_mJ_ge_H, cut), 0.99);
    }
}

TEST(Functionals, HReintegrates) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    const auto run = demo_run({.n = 1, .p = 2, .mu = 1, .beta = 2, .eps = 0.1}, data, 0.005, 30.0);
    const auto& tr = run.trace;
    double rebuilt = tr.H[0];
    for (std::size_t j = 1; j < tr.size(); ++j) {
        const double dt = tr.times[j] - tr.times[j - 1];
        const double slope = (tr.H[j] - tr.H[j - 1]) / dt;
        const double integrand = 0.25 * (tr.m[j] * tr.N[j] + tr.m[j - 1] * tr.N[j - 1]);
        EXPECT_NEAR(slope, integrand, 1e-10 * std::max(integrand, tr.H[j]));
        rebuilt += slope * dt;
        EXPECT_NEAR(rebuilt, tr.H[j], 1e-10 * tr.H[j]);
    }
}

TEST(Functionals, ZeroDampingPipelinesIdentical) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    const auto a = demo_run({.n = 1, .p = 2, .mu = 0, .beta = 2, .eps = 0.2}, data, 0.01, 20.0);
    const auto b = demo_run({.n = 1, .p = 2, .mu = 0, .beta = 1, .eps = 0.2}, data, 0.01, 20.0);
    EXPECT_EQ(a.trace.times, b.trace.times);
    EXPECT_EQ(a.trace.F1, b.trace.F1);
    EXPECT_EQ(a.trace.G, b.trace.G);
    EXPECT_EQ(a.trace.H, b.trace.H);
    EXPECT_EQ(a.trace.flag_lemma_F1, b.trace.flag_lemma_F1);
    EXPECT_EQ(a.trace.flag_H_ode, b.trace.flag_H_ode);
    EXPECT_EQ(a.trace.flag_mJ_ge_H, b.trace.flag_mJ_ge_H);
}

TEST(Monitors, ZeroFLowerBoundIsZero) {
    const auto data = make_bump_data(1.0, 0.0, 1.0);
    const auto run = demo_run({.n = 1, .p = 2, .mu = 1, .beta = 2, .eps = 0.1}, data, 0.01, 5.0);
    EXPECT_EQ(run.trace.C_f0, 0.0);
    for (auto f : run.trace.flag_lemma_F1) EXPECT_TRUE(f);
}

TEST(Monitors, ScaleInvariantBoundDecays) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    const ModelParams params{.n = 1, .p = 2, .mu = 1, .beta = 1, .eps = 0.1};
    const RadialGrid grid{1, 0.01, 300};
    const FunctionalContext ctx(grid, params, data);
    const double Cf = ctx.constants().C_f0;
    const double slack = 1e-4 * params.eps * ctx.constants().C_fg();
    FunctionalTrace tr;
    for (double t : {0.0, 1.0, 3.0, 9.0}) tr.append(t, Cf * params.eps / (2.0 * (1.0 + t)) - 0.5 * slack, 0, 0, 1 + t, 0);
    for (auto f : monitor_lemma_F1(tr, ctx)) EXPECT_TRUE(f);
    for (auto& f1 : tr.F1) f1 -= slack;
    for (auto f : monitor_lemma_F1(tr, ctx)) EXPECT_FALSE(f);
}

TEST(Monitors, PassRateCountsUpToCut) {
    const std::vector<double> t{0, 1, 2, 3};
    const std::vector<std::uint8_t> flags{1, 0, 1, 0};
    EXPECT_DOUBLE_EQ(pass_rate(t, flags, 2.0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(pass_rate(t, flags, 0.0), 1.0);
}

TEST(ComputeG, RejectsSparseSamples) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    const RadialGrid grid{1, 0.01, 300};
    const FunctionalContext ctx(grid, {.n = 1}, data);
    FunctionalTrace tr;
    tr.sample_interval = 0.01;
    tr.append(0.0, 0, 0, 0, 1, 0);
    auto state = initial_state(grid, data, 0.1);
    state.t = 1.0;
    EXPECT_THROW((void)compute_G(state, tr, ctx), std::runtime_error);
    tr.append(0.5, 0, 0, 0, 1, 0);
    tr.append(1.0, 0, 0, 0, 1, 0);
    EXPECT_THROW((void)compute_G_series(tr, ctx), std::runtime_error);
}

TEST(ComputeG, IncrementalMatchesSeries) {
    const auto data = make_bump_data(1.0, 1.0, 1.0);
    const ModelParams params{.n = 1, .p = 2, .mu = 1, .beta = 2, .eps = 0.1};
    const auto grid = RadialGrid::covering(1, 0.01, 2.0, 1.0);
    SolverOptions options;
    options.store_states = true;
    const auto run = run_until_blowup(params, data, grid, 2.0, options);
    const FunctionalContext ctx(grid, params, data);
    const std::size_t j = run.trace.size() / 2;
    const auto state = std::find_if(run.states.begin(), run.states.end(),
                                    [&](const RadialState& s) { return s.t == run.trace.times[j]; });
    ASSERT_NE(state, run.states.end());
    FunctionalTrace before;
    before.sample_interval = run.trace.sample_interval;
    for (std::size_t i = 0; i < j; ++i)
        before.append(run.trace.times[i], run.trace.F1[i], run.trace.J[i], run.trace.N[i], run.trace.m[i], 0);
    EXPECT_NEAR(compute_G(*state, before, ctx), run.trace.G[j], 1e-12 * run.trace.H[0]);
}
