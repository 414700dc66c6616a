#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "glassey/config.hpp"
#include "glassey/report.hpp"

using namespace glassey;
namespace fs = std::filesystem;

namespace {

SweepResult synthetic_result() {
    SweepResult s;
    s.params_base = {.n = 1, .p = 2, .mu = 1, .beta = 2, .R = 1, .eps = 0.1};
    double eps = 0.4;
    for (int i = 0; i < 5; ++i, eps *= 0.5) {
        EpsRecord r;
        r.eps = eps;
        r.dr = 0.005;
        r.t_final = 12.5 / eps;
        r.T_numeric = 1.0 / eps + 0.1 * i + 1.0 / 3.0;
        r.T_refined = *r.T_numeric * (1.0 + 1e-3);
        r.refinement_shift = std::abs(*r.T_numeric - *r.T_refined) / *r.T_refined;
        r.T_threshold_1e4 = *r.T_numeric - 0.01;
        if (i < 4) r.T_bound_witness = 1e3 / eps;
        r.log1p_T_bound = i < 4 ? std::log1p(1e3 / eps) : std::numeric_limits<double>::infinity();
        r.reason = "amplitude_threshold";
        r.steps = 1000 + i;
        s.records.push_back(r);
    }
    s.fitted_slope = -1.0123456789012345;
    s.slope_stderr = 0.01;
    s.intercept = 0.7;
    s.r_squared = 0.9999;
    s.theorem_slope = -1.0;
    s.slope_threshold_1e4 = -1.02;
    s.points_fitted = 5;
    s.verdict = Verdict::pass;
    s.note = "synthetic";
    return s;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("glassey_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Json, SweepResultRoundTrips) {
    const auto s = synthetic_result();
    const auto text = dump_json(Json(s));
    const auto back = Json::parse(text).get<SweepResult>();
    EXPECT_EQ(back, s);
    EXPECT_EQ(dump_json(Json(back)), text);
}

TEST(Json, CriticalAndEmptyOptionalsRoundTrip) {
    auto s = synthetic_result();
    s.kind = SweepKind::critical;
    s.verdict = Verdict::inconclusive;
    s.slope_threshold_1e4.reset();
    s.records[2].T_numeric.reset();
    s.records[2].refinement_shift.reset();
    EXPECT_EQ(Json::parse(dump_json(Json(s))).get<SweepResult>(), s);
}

TEST(Json, UnknownEnumRejected) {
    auto j = Json(synthetic_result());
    j["verdict"] = "maybe";
    EXPECT_THROW((void)j.get<SweepResult>(), ValidationError);
    j = Json(synthetic_result());
    j["kind"] = "cubic";
    EXPECT_THROW((void)j.get<SweepResult>(), ValidationError);
}

TEST(Json, DoublesRoundTripExactly) {
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.0 / 3.0}) {
        EXPECT_EQ(std::strtod(format_shortest(x).c_str(), nullptr), x);
        EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
    }
}

TEST(Json, LifespanBoundRoundTrips) {
    LifespanBound b;
    b.regime = DecayRegime::subcritical;
    b.T_blowup = 12.25;
    b.log1p_T = std::log1p(12.25);
    b.exponent_in_eps = -1.0;
    EXPECT_EQ(Json(b).get<LifespanBound>().T_blowup, b.T_blowup);
    LifespanBound inf;
    inf.regime = DecayRegime::supercritical;
    inf.outside_theorem_scope = true;
    const auto back = Json::parse(Json(inf).dump()).get<LifespanBound>();
    EXPECT_TRUE(std::isinf(back.T_blowup));
    EXPECT_TRUE(back.outside_theorem_scope);
    EXPECT_FALSE(back.exponent_in_eps);
}

TEST(Csv, FiveRowsAndHeader) {
    const auto csv = sweep_csv(synthetic_result());
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "eps,dr,t_final,T_numeric,T_refined,refinement_shift,T_threshold_1e4,T_bound_witness,log1p_T_bound,reason,"
              "steps");
}

TEST(Svg, DeterministicAndWellFormed) {
    const auto s = synthetic_result();
    const auto a = scaling_svg(s);
    EXPECT_EQ(a, scaling_svg(s));
    EXPECT_EQ(a.rfind("<svg", 0), 0u);
    EXPECT_NE(a.find("</svg>"), std::string::npos);
    auto c = s;
    c.kind = SweepKind::critical;
    EXPECT_NE(scaling_svg(c), a);
}

TEST(Emit, WritesThreeFilesDeterministically) {
    TempDir dir;
    const auto s = synthetic_result();
    emit_report(s, dir.path / "a");
    emit_report(s, dir.path / "b");
    for (const char* f : {"result.json", "sweep.csv", "scaling.svg"}) {
        ASSERT_TRUE(fs::exists(dir.path / "a" / f)) << f;
        EXPECT_EQ(slurp(dir.path / "a" / f), slurp(dir.path / "b" / f)) << f;
    }
    EXPECT_EQ(Json::parse(slurp(dir.path / "a" / "result.json")).get<SweepResult>(), s);
}

TEST(Emit, EmptyResultWritesNothing) {
    TempDir dir;
    SweepResult empty;
    EXPECT_THROW(emit_report(empty, dir.path / "out"), ValidationError);
    EXPECT_FALSE(fs::exists(dir.path / "out"));
}

TEST(Emit, IoFailureNamesPath) {
    TempDir dir;
    const auto blocker = dir.path / "blocker";
    write_text_file(blocker, "x");
    try {
        emit_report(synthetic_result(), blocker / "sub");
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find((blocker / "sub").string()), std::string::npos) << e.what();
    }
    try {
        write_text_file(dir.path / "missing" / "file.txt", "x");
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos) << e.what();
    }
}

TEST(TraceCsv, HeaderAndRows) {
    FunctionalTrace tr;
    tr.append(0.0, 1, 2, 3, 1, 0.5);
    tr.append(0.5, 1, 2, 3, 1, 0.5);
    tr.G = {1, 2};
    tr.H = {1, 1};
    tr.flag_lemma_F1 = {1, 0};
    tr.flag_H_ode = {1, 1};
    tr.flag_mJ_ge_H = {0, 1};
    const auto csv = trace_csv(tr);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,F1,G,H,max_ut,flag_lemma_F1,flag_H_ode,flag_mJ_ge_H");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(csv.find("0.5,1,2,1,0.5,0,1,1"), std::string::npos);
}

TEST(StateCsv, Columns) {
    const RadialGrid grid{1, 0.5, 4};
    RadialState s;
    s.u = {1, 2, 3, 4, 0};
    s.v = {0, 0, 0, 0, 0};
    const auto csv = state_csv(grid, s);
    EXPECT_EQ(csv.substr(0, 6), "r,u,v\n");
    EXPECT_NE(csv.find("1.5,4,0"), std::string::npos);
}

TEST(Config, ParsesKeysCommentsAndLists) {
    const auto c = config_from_text(R"(# demo
n = 2
p=3   # trailing comment
mu = 1
beta = 2
eps_values = 1.4, 1.25,1.1
critical = true
jobs = 3
out = runs/x
)");
    EXPECT_EQ(c.params.n, 2);
    EXPECT_EQ(c.params.p, 3.0);
    EXPECT_EQ(c.eps_values, (std::vector<double>{1.4, 1.25, 1.1}));
    EXPECT_TRUE(c.critical);
    EXPECT_EQ(c.jobs, 3);
    EXPECT_EQ(c.out_dir, "runs/x");
    EXPECT_EQ(c.dr, RunConfig{}.dr);
}

TEST(Config, EchoRoundTrips) {
    RunConfig c;
    c.params = {.n = 3, .p = 1.7, .mu = 0.25, .beta = 1, .R = 2, .eps = 0.1};
    c.eps_values = {0.3, 0.2, 0.1};
    c.snapshot_times = {0.5, 1.0 / 3.0};
    c.source = false;
    c.dr = 1.0 / 300.0;
    c.out_dir = "some/dir";
    const auto echo = config_echo(c);
    const auto back = config_from_text(echo);
    EXPECT_EQ(config_echo(back), echo);
    EXPECT_EQ(back.params, c.params);
    EXPECT_EQ(back.dr, c.dr);
    EXPECT_EQ(back.snapshot_times, c.snapshot_times);
    EXPECT_EQ(config_echo(config_from_text(config_echo(RunConfig{}))), config_echo(RunConfig{}));
}

TEST(Config, ErrorsCarryLocation) {
    auto message = [](const std::string& text) {
        try {
            (void)config_from_text(text, "demo.cfg");
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("n = 1\nbogus = 2\n").find("bogus"), std::string::npos);
    EXPECT_NE(message("n = 1\nn = 2\n").find("demo.cfg:2"), std::string::npos);
    EXPECT_NE(message("n = 1\njust words\n").find("demo.cfg:2"), std::string::npos);
    EXPECT_NE(message("p = two\n").find("p"), std::string::npos);
    EXPECT_NE(message("source = maybe\n").find("source"), std::string::npos);
    EXPECT_NE(message("n = 1.5\n").find("integer"), std::string::npos);
    EXPECT_NE(message("p = inf\n").find("finite"), std::string::npos);
    EXPECT_THROW((void)read_text_file("/nonexistent/glassey.cfg"), ValidationError);
}

TEST(Config, Validation) {
    RunConfig c;
    EXPECT_NO_THROW(c.validate());
    c.params.n = 6;
    EXPECT_THROW(c.validate(), ValidationError);
    c = RunConfig{};
    c.amplitude_g = 0.0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = RunConfig{};
    c.data_radius = 2.0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = RunConfig{};
    c.jobs = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = RunConfig{};
    c.cfl = 1.2;
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Config, SweepPlanCarriesSettings) {
    RunConfig c;
    c.eps_values = {0.4, 0.2, 0.1, 0.05, 0.025};
    c.snapshot_times = {1.0};
    c.jobs = 4;
    c.t_budget = 123;
    const auto plan = c.sweep_plan();
    EXPECT_EQ(plan.eps_values, c.eps_values);
    EXPECT_EQ(plan.jobs, 4);
    EXPECT_EQ(plan.t_budget, 123);
    EXPECT_TRUE(plan.solver.snapshot_times.empty());
}
