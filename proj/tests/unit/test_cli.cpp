#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "stripgreen/cli/run.hpp"
#include "stripgreen/cli/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using namespace stripgreen::cli;

const fs::path kScenarios = STRIPGREEN_SCENARIO_DIR;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("stripgreen_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const std::string kLinearHeader =
    "scenario.kind = solve-linear\n"
    "operator.epsilon = 1.0\n"
    "operator.a = 1.0\n"
    "operator.b = 1.0\n"
    "operator.beta = 2.0\n";

int parse_code(const fs::path& file, const std::vector<std::string>& overrides = {}) {
    try {
        parse_scenario(file.string(), overrides);
    } catch (const ScenarioError& e) {
        return e.code();
    }
    return kExitPass;
}

std::string parse_message(const fs::path& file) {
    try {
        parse_scenario(file.string());
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return {};
}

TEST(ScenarioParse, DefaultsAndValues) {
    const auto dir = scratch("defaults");
    const auto f = write_file(dir, "s.ini", kLinearHeader + "# comment\n; also a comment\ndomain.T = 2.5  # trailing\n");
    const auto sc = parse_scenario(f.string());
    EXPECT_EQ(sc.kind, ScenarioKind::solve_linear);
    EXPECT_EQ(sc.op.beta, 2.0);
    EXPECT_EQ(sc.domain.T, 2.5);
    EXPECT_EQ(sc.nx, 21);
    EXPECT_EQ(sc.nt, 21);
    EXPECT_TRUE(sc.u0.is_zero());
    EXPECT_EQ(sc.entries.size(), 6u);
}

TEST(ScenarioParse, MissingFileIsIoError) { EXPECT_EQ(parse_code("/nonexistent/scenario.ini"), kExitIo); }

TEST(ScenarioParse, ValidationErrorsNameTheKey) {
    const auto dir = scratch("validation");
    EXPECT_EQ(parse_message(write_file(dir, "eps.ini", kLinearHeader + "domain.L = -1\n")), "domain.L: must be > 0");
    EXPECT_EQ(parse_message(write_file(dir, "unknown.ini", kLinearHeader + "operator.gamma = 1\n")),
              "operator.gamma: unknown key");
    EXPECT_EQ(parse_message(write_file(dir, "dup.ini", kLinearHeader + "operator.a = 2\n")), "operator.a: duplicate key");
    EXPECT_EQ(parse_message(write_file(dir, "num.ini", kLinearHeader + "grid.nx = ten\n")),
              "grid.nx: expected an integer, got 'ten'");
    EXPECT_EQ(parse_message(write_file(dir, "kind.ini", "scenario.kind = solve-linear\njunction.alpha = 1\n")),
              "scenario.kind: solve-linear requires an operator block");
    EXPECT_EQ(parse_message(write_file(dir, "both.ini", kLinearHeader + "junction.alpha = 1\n")),
              "scenario.kind: operator and junction blocks are mutually exclusive");
    EXPECT_EQ(parse_message(write_file(dir, "neg.ini", kLinearHeader + "grid.nt = 3\n")), "grid.nt: must be >= 5");
    EXPECT_EQ(parse_code(write_file(dir, "noeq.ini", kLinearHeader + "grid.nx 5\n")), kExitValidation);
    EXPECT_EQ(parse_code(write_file(dir, "nokind.ini", "operator.a = 1\n")), kExitValidation);
}

TEST(ScenarioParse, NegativeCoefficientRejectedOnKernelPath) {
    const auto dir = scratch("negative");
    const auto f = write_file(dir, "s.ini",
                              "scenario.kind = solve-linear\noperator.epsilon = 1\noperator.a = -1\n");
    EXPECT_EQ(parse_message(f), "operator.a: kernel path requires a >= 0");
}

TEST(ScenarioParse, OverridesApplyInOrder) {
    const auto dir = scratch("overrides");
    const auto f = write_file(dir, "s.ini", kLinearHeader + "grid.nx = 11\n");
    const auto sc = parse_scenario(f.string(), {"grid.nx=7", "grid.nx=9", "operator.a=0.5"});
    EXPECT_EQ(sc.nx, 9);
    EXPECT_EQ(sc.op.a, 0.5);
    EXPECT_EQ(parse_code(f, {"grid.size=3"}), kExitValidation);
    EXPECT_EQ(parse_code(f, {"operator.epsilon=0"}), kExitValidation);
}

TEST(ScenarioParse, Profiles) {
    const auto dir = scratch("profiles");
    write_file(dir, "sig.csv", "t,g\n0,0\n1,2\n");
    const auto f = write_file(dir, "s.ini",
                              kLinearHeader + "data.u0 = eigenmode:2\ndata.g1 = table:sig.csv\ndata.f = pulse:0.2,0.6,3\n");
    const auto sc = parse_scenario(f.string());
    const auto sp = sc.problem();
    EXPECT_NEAR(sp.u0(0.25), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(sp.g1(0.25), 0.5);
    EXPECT_DOUBLE_EQ(sp.g1(5.0), 2.0);
    EXPECT_DOUBLE_EQ(sp.source(0.7, 0.4), 3.0);
    EXPECT_EQ(sp.source(0.7, 0.7), 0.0);
    EXPECT_FALSE(sp.g2);
    ASSERT_EQ(sp.time_breaks.size(), 2u);

    EXPECT_EQ(parse_code(write_file(dir, "missing.ini", kLinearHeader + "data.g1 = table:nope.csv\n")), kExitIo);
    EXPECT_EQ(parse_code(write_file(dir, "bad.ini", kLinearHeader + "data.g1 = ramp:1\n")), kExitValidation);
    EXPECT_EQ(parse_code(write_file(dir, "badp.ini", kLinearHeader + "data.f = pulse:0.6,0.2,1\n")), kExitValidation);
    write_file(dir, "unsorted.csv", "0,0\n1,1\n0.5,2\n");
    EXPECT_EQ(parse_code(write_file(dir, "uns.ini", kLinearHeader + "data.g1 = table:unsorted.csv\n")), kExitValidation);
}

TEST(ScenarioParse, NonlinearTerm) {
    const auto dir = scratch("nonlinear");
    const std::string head = "scenario.kind = solve-nonlinear\noperator.epsilon = 1\n";
    const auto sc = parse_scenario(write_file(dir, "ok.ini", head + "nonlinear.term = cubic:0.25\n").string());
    EXPECT_EQ(sc.nonlinear_term, "cubic");
    EXPECT_EQ(sc.nonlinear_coef, 0.25);
    EXPECT_EQ(parse_code(write_file(dir, "bad.ini", head + "nonlinear.term = tanh:1\n")), kExitValidation);
    EXPECT_EQ(parse_code(write_file(dir, "lin.ini", kLinearHeader + "nonlinear.term = sin:1\n")), kExitValidation);
}

TEST(RunScenario, ZeroLinearWritesZeroField) {
    const auto out = scratch("run_zero");
    const auto sc = parse_scenario((kScenarios / "zero_linear.ini").string());
    std::ostringstream log;
    ASSERT_EQ(run_scenario(sc, out.string(), log), kExitPass) << log.str();
    std::istringstream field(read_file(out / "field.csv"));
    std::string line;
    std::getline(field, line);
    EXPECT_EQ(line, "x,t,u");
    int rows = 0;
    while (std::getline(field, line)) {
        ++rows;
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
    }
    EXPECT_EQ(rows, sc.nx * sc.nt);
    const auto summary = read_file(out / "summary.txt");
    EXPECT_NE(summary.find("status: PASS"), std::string::npos);
    EXPECT_NE(summary.find("operator.beta = 2.0"), std::string::npos);
    EXPECT_TRUE(fs::exists(out / "plot_field.py"));
}

TEST(RunScenario, RowsOrderedByTimeThenSpace) {
    const auto out = scratch("run_order");
    const auto sc = parse_scenario((kScenarios / "eigenmode_linear.ini").string(), {"grid.nx=5", "grid.nt=5"});
    std::ostringstream log;
    ASSERT_EQ(run_scenario(sc, out.string(), log), kExitPass) << log.str();
    std::istringstream field(read_file(out / "field.csv"));
    std::string line;
    std::getline(field, line);
    std::vector<std::pair<double, double>> xt;
    while (std::getline(field, line)) {
        std::istringstream ls(line);
        std::string x, t;
        std::getline(ls, x, ',');
        std::getline(ls, t, ',');
        xt.emplace_back(std::stod(x), std::stod(t));
    }
    ASSERT_EQ(xt.size(), 25u);
    for (std::size_t k = 1; k < xt.size(); ++k)
        EXPECT_TRUE(xt[k].second > xt[k - 1].second || (xt[k].second == xt[k - 1].second && xt[k].first > xt[k - 1].first));
}

TEST(RunScenario, Deterministic) {
    const auto a = scratch("run_det_a"), b = scratch("run_det_b");
    const auto sc = parse_scenario((kScenarios / "sine_nonlinear.ini").string(), {"grid.nx=6", "grid.nt=6"});
    std::ostringstream log;
    ASSERT_EQ(run_scenario(sc, a.string(), log), kExitPass) << log.str();
    ASSERT_EQ(run_scenario(sc, b.string(), log), kExitPass) << log.str();
    for (const char* f : {"field.csv", "report.csv", "summary.txt"}) EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
}

TEST(RunScenario, KernelValidateReport) {
    const auto out = scratch("run_kernel");
    const auto sc = parse_scenario((kScenarios / "kernel_validate.ini").string());
    std::ostringstream log;
    ASSERT_EQ(run_scenario(sc, out.string(), log), kExitPass) << log.str();
    const auto report = read_file(out / "report.csv");
    EXPECT_EQ(report.substr(0, report.find('\n')), "r,s,closed,numeric,rel_err,inconclusive");
    EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 10);
}

TEST(RunScenario, FailedValidationThresholdIsNumericalFailure) {
    const auto out = scratch("run_kernel_tight");
    const auto sc = parse_scenario((kScenarios / "kernel_validate.ini").string(), {"validate.tol=1e-20"});
    std::ostringstream log;
    EXPECT_EQ(run_scenario(sc, out.string(), log), kExitNumerical);
    EXPECT_NE(read_file(out / "summary.txt").find("status: FAIL (numerical)"), std::string::npos);
}

TEST(RunScenario, NonConvergenceIsNumericalFailure) {
    const auto out = scratch("run_nonconvergent");
    const auto dir = scratch("nonconvergent_in");
    const auto f = write_file(dir, "s.ini",
                              "scenario.kind = solve-nonlinear\noperator.epsilon = 1\noperator.a = 1\n"
                              "operator.b = 1\noperator.beta = 2\ngrid.nx = 6\ngrid.nt = 6\ndata.u0 = eigenmode:1\n"
                              "nonlinear.term = linear:60\nnumerics.max_iter = 2\nnumerics.adapt_window = false\n");
    std::ostringstream log;
    EXPECT_EQ(run_scenario(parse_scenario(f.string()), out.string(), log), kExitNumerical);
    EXPECT_NE(log.str().find("did not converge"), std::string::npos);
}

TEST(RunScenario, UnwritableOutputIsIoError) {
    const auto dir = scratch("unwritable");
    write_file(dir, "blocker", "x");
    const auto sc = parse_scenario((kScenarios / "zero_linear.ini").string());
    std::ostringstream log;
    EXPECT_EQ(run_scenario(sc, (dir / "blocker" / "out").string(), log), kExitIo);
}

TEST(RunScenario, JunctionRoutesByAdmissibility) {
    const auto out = scratch("run_junction");
    const auto sc = parse_scenario((kScenarios / "junction_solve.ini").string(), {"grid.nx=6", "grid.nt=6"});
    std::ostringstream log;
    ASSERT_EQ(run_scenario(sc, out.string(), log), kExitPass) << log.str();
    EXPECT_NE(read_file(out / "summary.txt").find("finite-difference integro solver"), std::string::npos);

    const auto out2 = scratch("run_junction_kernel");
    const auto sc2 = parse_scenario((kScenarios / "junction_solve.ini").string(),
                                    {"grid.nx=6", "grid.nt=6", "junction.epsilon=1", "junction.alpha=1",
                                     "junction.lambda=1"});
    ASSERT_EQ(run_scenario(sc2, out2.string(), log), kExitPass) << log.str();
    EXPECT_NE(read_file(out2 / "summary.txt").find("Green representation with Picard"), std::string::npos);
}

}  // namespace
