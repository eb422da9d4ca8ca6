#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "stripgreen/green_solver.hpp"
#include "stripgreen/oracles/eigenmode.hpp"
#include "stripgreen/oracles/fd_integro.hpp"

namespace {

using namespace stripgreen;

const OperatorParams kStandard{1.0, 1.0, 1.0, 2.0};

double sin_pi(double x) { return std::sin(M_PI * x); }

// Heat equation on [0, L] with u(0) = 1, u(L) = 0 and zero initial datum, by images.
double heat_step_images(double x, double t, double eps, double L) {
    const double s = 2.0 * std::sqrt(eps * t);
    double u = 0.0;
    for (int n = 0; n < 50; ++n) u += std::erfc((2 * n * L + x) / s) - std::erfc((2 * (n + 1) * L - x) / s);
    return u;
}

TEST(GreenSolver, ZeroDataGivesZero) {
    ProblemSpec sp;
    sp.params = kStandard;
    EXPECT_EQ(initial_term(0.4, 0.5, sp), 0.0);
    EXPECT_EQ(boundary_term(0.4, 0.5, sp), 0.0);
    EXPECT_EQ(volume_term(0.4, 0.5, sp), 0.0);
    const auto u = solve_linear_dirichlet(sp, 5, 5);
    for (double v : u.values()) EXPECT_EQ(v, 0.0);
}

TEST(GreenSolver, HeatEigenmode) {
    ProblemSpec sp;
    sp.params = {0.5, 0.3, 0.0, 1.0};
    sp.u0 = sin_pi;
    for (double t : {0.01, 0.3, 1.0})
        for (double x : {0.1, 0.5, 0.8}) {
            const double exact = std::exp(-(0.5 * M_PI * M_PI + 0.3) * t) * sin_pi(x);
            EXPECT_NEAR(initial_term(x, t, sp), exact, 1e-6);
        }
}

TEST(GreenSolver, MemoryEigenmodeMatchesModeEquation) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.u0 = sin_pi;
    const double mu = oracles::dirichlet_eigenvalue(1, 1.0);
    for (double t : {0.05, 0.4, 1.0})
        for (double x : {0.2, 0.5, 0.9})
            EXPECT_NEAR(initial_term(x, t, sp), oracles::eigenmode_ode_solution(mu, sp.params, t) * sin_pi(x), 1e-4);
}

TEST(GreenSolver, EigenmodeFieldOnGrid) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.u0 = sin_pi;
    const auto u = solve_linear_dirichlet(sp, 6, 5);
    const double mu = oracles::dirichlet_eigenvalue(1, 1.0);
    for (int n = 0; n < u.nt(); ++n)
        for (int i = 0; i < u.nx(); ++i)
            EXPECT_NEAR(u(i, n), oracles::eigenmode_ode_solution(mu, sp.params, u.t(n)) * sin_pi(u.x(i)), 1e-4);
    EXPECT_EQ(u.provenance(), "green:solve_linear_dirichlet");
}

TEST(GreenSolver, InitialDatumAttained) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.u0 = [](double x) { return x * (1.0 - x) * (1.0 + x); };
    for (double x : {0.1, 0.35, 0.6, 0.9}) EXPECT_NEAR(initial_term(x, 1e-4, sp), sp.u0(x), 0.02);
}

TEST(GreenSolver, BoundaryAttainmentNearWall) {
    ProblemSpec sp;
    sp.params = {1.0, 0.0, 0.0, 1.0};
    sp.g1 = [](double) { return 1.0; };
    const double x = 1e-3;
    for (double t : {0.1, 0.5, 1.0}) EXPECT_NEAR(boundary_term(x, t, sp), heat_step_images(x, t, 1.0, 1.0), 0.02);
}

TEST(GreenSolver, HeatStepInterior) {
    ProblemSpec sp;
    sp.params = {1.0, 0.0, 0.0, 1.0};
    sp.g1 = [](double) { return 1.0; };
    for (double x : {0.2, 0.5, 0.8}) EXPECT_NEAR(boundary_term(x, 0.3, sp), heat_step_images(x, 0.3, 1.0, 1.0), 1e-7);
}

TEST(GreenSolver, RightWallMirrorsLeftWall) {
    ProblemSpec left, right;
    left.params = right.params = kStandard;
    left.g1 = [](double t) { return std::sin(t); };
    right.g2 = left.g1;
    for (double x : {0.2, 0.6}) EXPECT_NEAR(boundary_term(x, 0.7, left), boundary_term(1.0 - x, 0.7, right), 1e-9);
}

TEST(GreenSolver, BoundaryDataMatchesFiniteDifference) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.g1 = [](double t) { return std::sin(t); };
    oracles::FdGrid g;
    g.nx = 201;
    g.nt = 5;
    const auto fd = oracles::fd_solve_integro(sp, g);
    for (int n = 1; n < 5; ++n)
        for (int i : {20, 100, 180}) EXPECT_NEAR(boundary_term(fd.x(i), fd.t(n), sp), fd(i, n), 2e-3);
}

TEST(GreenSolver, ManufacturedVolumeTerm) {
    // u* = t e^{-t} sin(pi x) has zero initial and boundary data
    ProblemSpec sp;
    sp.params = kStandard;
    const auto p = sp.params;
    sp.source = [p](double x, double t) {
        const double k = p.beta - 1.0;
        const double mem = std::exp(-p.beta * t) * (t / k * std::exp(k * t) - std::expm1(k * t) / (k * k));
        return sin_pi(x) * ((1.0 - t) * std::exp(-t) + (p.epsilon * M_PI * M_PI + p.a) * t * std::exp(-t) + p.b * mem);
    };
    for (double t : {0.3, 1.0})
        for (double x : {0.25, 0.5}) EXPECT_NEAR(volume_term(x, t, sp), t * std::exp(-t) * sin_pi(x), 1e-4);
}

TEST(GreenSolver, LocalisedSourceGivesPositiveResponse) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.source = [](double x, double t) {
        const double d = (x - 0.5) / 0.05;
        return t < 0.05 ? std::exp(-d * d) : 0.0;
    };
    sp.time_breaks = {0.05};
    oracles::FdGrid g;
    g.nx = 101;
    g.nt = 11;
    sp.domain.T = 0.1;
    const auto fd = oracles::fd_solve_integro(sp, g);
    const double green = volume_term(0.5, 0.1, sp);
    EXPECT_GT(green, 0.0);
    EXPECT_GT(fd(50, 10), 0.0);
    EXPECT_NEAR(green, fd(50, 10), 0.05 * green);
}

TEST(GreenSolver, InteriorOnly) {
    ProblemSpec sp;
    sp.params = kStandard;
    EXPECT_THROW(initial_term(0.0, 0.5, sp), DomainError);
    EXPECT_THROW(boundary_term(1.0, 0.5, sp), DomainError);
    EXPECT_THROW(volume_term(0.5, 0.0, sp), DomainError);
}

TEST(GreenSolver, KernelPathRejectsNegativeCoefficients) {
    ProblemSpec sp;
    sp.params = {1.0, -1.0, 1.0, 2.0};
    EXPECT_THROW(solve_linear_dirichlet(sp, 5, 5), DomainError);
}

TEST(GreenSolver, CornerMismatchFlagged) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.u0 = [](double) { return 1.0; };
    EXPECT_TRUE(sp.corner_mismatch());
    sp.u0 = sin_pi;
    EXPECT_FALSE(sp.corner_mismatch());
    sp.u0 = [](double) { return 1.0; };
    EXPECT_NE(solve_linear_dirichlet(sp, 5, 5).provenance().find("corner mismatch"), std::string::npos);
}

TEST(GreenSolver, FieldCsvFormat) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.u0 = sin_pi;
    const auto u = solve_linear_dirichlet(sp, 5, 5);
    std::ostringstream os;
    u.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "x,t,u");
    std::getline(is, line);
    EXPECT_EQ(line, "0,0,0");
    std::getline(is, line);
    EXPECT_EQ(line, "0.25,0," + fmt17(sin_pi(0.25)));
    int rows = 2;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 25);
}

TEST(Resolvent, WallLimitsReproduceBoundaryTransforms) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.u0 = sin_pi;
    sp.g1 = [](double t) { return std::exp(-t); };
    sp.g2 = [](double t) { return std::exp(-2.0 * t); };
    const oracles::LaplaceTail tail{1.0, 1.0, 0.0};
    for (cplx s : {cplx(1.0, 0.0), cplx(2.0, 1.0)}) {
        EXPECT_LT(std::abs(resolvent_solution_hat(0.0, s, sp, {}, tail) - 1.0 / (s + 1.0)), 1e-8);
        EXPECT_LT(std::abs(resolvent_solution_hat(1.0, s, sp, {}, tail) - 1.0 / (s + 2.0)), 1e-8);
    }
}

TEST(Resolvent, EigenmodeTransform) {
    // L^{-1}: T_hat(s) = (s + beta) / ((s + beta)(s + c) + b), c = eps pi^2 + a
    ProblemSpec sp;
    sp.params = kStandard;
    sp.u0 = sin_pi;
    const double c = M_PI * M_PI + 1.0;
    for (cplx s : {cplx(0.5, 0.0), cplx(3.0, -2.0)}) {
        const cplx expected = (s + 2.0) / ((s + 2.0) * (s + c) + 1.0) * sin_pi(0.3);
        EXPECT_LT(std::abs(resolvent_solution_hat(0.3, s, sp) - expected), 1e-8);
    }
}

TEST(DecayStudy, ZeroPulseHasUndefinedRate) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.g1 = [](double) { return 0.0; };
    const auto rep = decay_study(sp, 2.0, {}, 8, 5);
    for (double v : rep.sup_values) EXPECT_EQ(v, 0.0);
    EXPECT_FALSE(rep.rate_defined);
    EXPECT_TRUE(std::isnan(rep.rate));
}

TEST(DecayStudy, HeatPulseDecaysAtLeastAtRateA) {
    ProblemSpec sp;
    sp.params = {0.1, 0.5, 0.0, 1.0};
    sp.g1 = [](double t) { return t < 0.5 ? std::pow(std::sin(2.0 * M_PI * t), 2) : 0.0; };
    sp.time_breaks = {0.5};
    const auto rep = decay_study(sp, 5.0, {}, 13, 9);
    ASSERT_TRUE(rep.rate_defined);
    EXPECT_GE(rep.rate, 0.5);
}

TEST(DecayStudy, FullParametersPositiveRateAgreesWithFiniteDifference) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.domain.T = 3.0;
    sp.g1 = [](double t) { return t < 0.5 ? std::pow(std::sin(2.0 * M_PI * t), 2) : 0.0; };
    sp.time_breaks = {0.5};
    const auto rep = decay_study(sp, 3.0, {}, 13, 9);
    ASSERT_TRUE(rep.rate_defined);
    EXPECT_GT(rep.rate, 0.0);

    // long-run local rate at the sample points x = 0.1 .. 0.9 against the FD oracle
    oracles::FdGrid g;
    g.nx = 51;
    g.nt = 31;
    const auto fd = oracles::fd_solve_integro(sp, g);
    auto sup_fd = [&](int n) {
        double m = 0.0;
        for (int i = 5; i < 50; i += 5) m = std::max(m, std::abs(fd(i, n)));
        return m;
    };
    auto sup_green = [&](double t) {
        double m = 0.0;
        for (int i = 1; i <= 9; ++i) m = std::max(m, std::abs(boundary_term(0.1 * i, t, sp)));
        return m;
    };
    const double fd_rate = -std::log(sup_fd(30) / sup_fd(20));
    const double green_rate = -std::log(sup_green(3.0) / sup_green(2.0));
    EXPECT_GT(fd_rate, 0.0);
    EXPECT_NEAR(green_rate, fd_rate, 0.01 * fd_rate);
}

TEST(DecayStudy, RejectsInitialData) {
    ProblemSpec sp;
    sp.params = kStandard;
    sp.u0 = sin_pi;
    EXPECT_THROW(decay_study(sp, 1.0), DomainError);
}

}  // namespace
