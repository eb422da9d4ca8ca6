#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "stripgreen/kernel.hpp"
#include "stripgreen/oracles/eigenmode.hpp"
#include "stripgreen/oracles/fd_esjj.hpp"
#include "stripgreen/oracles/fd_integro.hpp"
#include "stripgreen/oracles/laplace.hpp"

namespace {

using namespace stripgreen;
using namespace stripgreen::oracles;
using cplx = std::complex<double>;

const OperatorParams kStandard{1.0, 1.0, 1.0, 2.0};

double sin_pi(double x) { return std::sin(M_PI * x); }

// Semi-discrete Dirichlet eigenvalue of the 3-point Laplacian.
double discrete_eigenvalue(double hx) {
    const double s = std::sin(0.5 * M_PI * hx);
    return 4.0 * s * s / (hx * hx);
}

// T'' + B T' + C T = 0, T(0) = 1, T'(0) = v0 via complex characteristic roots.
struct ModeOde {
    double B, C, v0;
    cplx r1() const { return 0.5 * (-B + std::sqrt(cplx(B * B - 4.0 * C))); }
    cplx r2() const { return 0.5 * (-B - std::sqrt(cplx(B * B - 4.0 * C))); }
    cplx c1() const { return (v0 - r2()) / (r1() - r2()); }
    double derivative(int k, double t) const {
        const cplx a = c1(), b = 1.0 - c1();
        return (a * std::pow(r1(), k) * std::exp(r1() * t) + b * std::pow(r2(), k) * std::exp(r2() * t)).real();
    }
};

TEST(EigenmodeOde, InitialValue) { EXPECT_EQ(eigenmode_ode_solution(9.0, kStandard, 0.0), 1.0); }

TEST(EigenmodeOde, NoMemoryIsExponential) {
    const OperatorParams p{0.5, 0.3, 0.0, 2.0};
    for (double t : {0.1, 1.0, 3.0}) EXPECT_NEAR(eigenmode_ode_solution(4.0, p, t), std::exp(-(2.0 + 0.3) * t), 1e-14);
}

TEST(EigenmodeOde, DoubleRoot) {
    // beta = 3, c = 1, b = 1: roots -2, -2
    const OperatorParams p{1.0, 0.0, 1.0, 3.0};
    for (double t : {0.2, 1.5}) EXPECT_NEAR(eigenmode_ode_solution(1.0, p, t), std::exp(-2.0 * t) * (1.0 + t), 1e-14);
}

TEST(EigenmodeOde, SatisfiesModeEquation) {
    std::mt19937 rng(5u);
    std::uniform_real_distribution<double> u(0.1, 3.0), tt(0.0, 4.0);
    int checked = 0;
    while (checked < 100) {
        const OperatorParams p{u(rng), u(rng), u(rng), u(rng)};
        const double mu = u(rng), t = tt(rng);
        const double c = p.epsilon * mu + p.a;
        const ModeOde ode{p.beta + c, p.b + p.beta * c, -c};
        if (std::abs(ode.B * ode.B - 4.0 * ode.C) < 1e-3) continue;
        const double scale = 1.0 + std::abs(ode.derivative(2, t)) + ode.B * std::abs(ode.derivative(1, t));
        const double residual = ode.derivative(2, t) + ode.B * ode.derivative(1, t) + ode.C * ode.derivative(0, t);
        EXPECT_LT(std::abs(residual), 1e-12 * scale);
        EXPECT_NEAR(eigenmode_ode_solution(mu, p, t), ode.derivative(0, t), 1e-12 * scale);
        ++checked;
    }
}

TEST(FdIntegro, ZeroDataGivesZeroField) {
    ProblemSpec sp;
    sp.params = kStandard;
    FdGrid g;
    g.nx = 11;
    g.nt = 6;
    const auto u = fd_solve_integro(sp, g);
    for (double v : u.values()) EXPECT_EQ(v, 0.0);
}

TEST(FdIntegro, SemiDiscreteEigenmodeIsExact) {
    for (double b : {0.0, 1.0}) {
        ProblemSpec sp;
        sp.params = {1.0, 1.0, b, 2.0};
        sp.u0 = sin_pi;
        FdGrid g;
        g.nx = 21;
        g.nt = 11;
        const auto u = fd_solve_integro(sp, g);
        const double mu = discrete_eigenvalue(0.05);
        for (int n = 0; n < g.nt; ++n)
            for (int i : {3, 10, 17})
                EXPECT_NEAR(u(i, n), eigenmode_ode_solution(mu, sp.params, u.t(n)) * sin_pi(u.x(i)), 1e-10);
    }
}

TEST(FdIntegro, HeatEigenmodeWithinSpatialError) {
    ProblemSpec sp;
    sp.params = {0.5, 0.2, 0.0, 1.0};
    sp.u0 = sin_pi;
    FdGrid g;
    g.nx = 101;
    g.nt = 6;
    const auto u = fd_solve_integro(sp, g);
    for (int n = 0; n < g.nt; ++n)
        EXPECT_NEAR(u(50, n), std::exp(-(0.5 * M_PI * M_PI + 0.2) * u.t(n)), 1e-4);
}

TEST(FdIntegro, ManufacturedSpatialOrder) {
    ProblemSpec sp;
    sp.params = kStandard;
    const auto p = sp.params;
    sp.u0 = sin_pi;
    sp.source = [p](double x, double t) {
        const double mem = (std::exp(-t) - std::exp(-p.beta * t)) / (p.beta - 1.0);
        return sin_pi(x) * (std::exp(-t) * (-1.0 + p.epsilon * M_PI * M_PI + p.a) + p.b * mem);
    };
    std::vector<double> err;
    for (int nx : {11, 21, 41}) {
        FdGrid g;
        g.nx = nx;
        g.nt = 5;
        const auto u = fd_solve_integro(sp, g);
        double worst = 0.0;
        for (int n = 0; n < g.nt; ++n)
            for (int i = 0; i < nx; ++i) worst = std::max(worst, std::abs(u(i, n) - std::exp(-u.t(n)) * sin_pi(u.x(i))));
        err.push_back(worst);
    }
    for (int k = 1; k < 3; ++k) {
        const double order = std::log2(err[k - 1] / err[k]);
        EXPECT_GE(order, 1.8);
        EXPECT_LE(order, 2.2);
    }
}

TEST(FdIntegro, MemoryStateMatchesSecondMemory) {
    // a u-independent second memory with rate beta reproduces the b-term when b = 0 is restored through it
    ProblemSpec with_b;
    with_b.params = kStandard;
    with_b.u0 = sin_pi;
    ProblemSpec via_extra = with_b;
    via_extra.params.b = 0.0;
    FdExtras ex;
    ex.memory_f1 = [](double, double, double u) { return u; };
    ex.memory_rate = kStandard.beta;
    FdGrid g;
    g.nx = 21;
    g.nt = 6;
    const auto a = fd_solve_integro(with_b, g);
    const auto b = fd_solve_integro(via_extra, g, ex);
    EXPECT_LT(sup_distance(a, b), 1e-13);
}

TEST(FdIntegro, StabilityAndGridValidation) {
    ProblemSpec sp;
    sp.params = kStandard;
    FdGrid g;
    g.nx = 101;
    g.nt = 5;
    g.substeps = 1;
    EXPECT_THROW(fd_solve_integro(sp, g), ConfigError);
    g.substeps = 0;
    g.nx = 4;
    EXPECT_THROW(fd_solve_integro(sp, g), ConfigError);
    g.nx = 11;
    g.stability_c = 0.0;
    EXPECT_THROW(fd_solve_integro(sp, g), ConfigError);
}

TEST(FdEsjj, QuiescentJunctionStaysAtRest) {
    JunctionProblem jp;
    jp.junction = {0.3, 0.8, 0.3, 0.0};
    FdGrid g;
    g.nx = 21;
    g.nt = 6;
    const auto phi = fd_solve_esjj(jp, {}, g);
    for (double v : phi.values()) EXPECT_EQ(v, 0.0);
}

TEST(FdEsjj, LinearisedEigenmodeMatchesModeEquation) {
    // eps phi_xxt + phi_xx - phi_tt - alpha phi_t = phi on sin(pi x):
    // T'' + (alpha + eps pi^2) T' + (1 + pi^2) T = 0, T(0) = 1, T'(0) = 0
    JunctionProblem jp;
    jp.junction = {0.3, 0.8, 0.0, 0.0};
    jp.phi0 = sin_pi;
    FdGrid g;
    g.nx = 201;
    g.nt = 11;
    EsjjFdOptions opt;
    opt.linearize_sine = true;
    const auto phi = fd_solve_esjj(jp, [](double) { return 0.0; }, g, opt);
    const ModeOde ode{0.8 + 0.3 * M_PI * M_PI, 1.0 + M_PI * M_PI, 0.0};
    for (int n = 0; n < g.nt; ++n) EXPECT_NEAR(phi(100, n), ode.derivative(0, phi.t(n)), 1e-4) << n;
}

TEST(FdEsjj, SelfConvergenceOrder) {
    JunctionProblem jp;
    jp.junction = {0.3, 0.8, 0.5, 0.1};
    jp.phi0 = [](double x) { return 0.5 * sin_pi(x); };
    jp.h1 = [](double t) { return 0.2 * t * t; };
    std::vector<SpaceTimeField> sols;
    for (int nx : {21, 41, 81}) {
        FdGrid g;
        g.nx = nx;
        g.nt = 6;
        sols.push_back(fd_solve_esjj(jp, [](double x) { return 0.0 * x; }, g));
    }
    auto diff = [&](int k) {
        const int stride = 1 << k;
        double m = 0.0;
        for (int n = 0; n < 6; ++n)
            for (int i = 0; i < 21; ++i) m = std::max(m, std::abs(sols[k](i * stride, n) - sols[k + 1](2 * i * stride, n)));
        return m;
    };
    const double order = std::log2(diff(0) / diff(1));
    EXPECT_GE(order, 1.8);
    EXPECT_LE(order, 2.2);
}

TEST(NumericalLaplace, Constant) {
    const auto r = numerical_laplace([](double) { return 1.0; }, 2.0, {0.0, 1.0, 0.0});
    EXPECT_FALSE(r.inconclusive);
    EXPECT_NEAR(r.value.real(), 0.5, 1e-8);
    EXPECT_NEAR(r.value.imag(), 0.0, 1e-12);
}

TEST(NumericalLaplace, Exponential) {
    const cplx s(1.5, 2.0);
    const auto r = numerical_laplace([](double t) { return std::exp(-0.7 * t); }, s, {0.7, 1.0, 0.0});
    EXPECT_LT(std::abs(r.value - 1.0 / (s + 0.7)), 1e-9);
}

TEST(NumericalLaplace, ShortHorizonIsInconclusive) {
    LaplaceOptions opt;
    opt.t_max = 1.0;
    const auto r = numerical_laplace([](double) { return 1.0; }, 1.0, {0.0, 1.0, 0.0}, opt);
    EXPECT_TRUE(r.inconclusive);
    EXPECT_GT(r.tail_bound, 0.1);
}

TEST(NumericalLaplace, OutsideHalfPlaneThrows) {
    EXPECT_THROW(numerical_laplace([](double) { return 1.0; }, -1.0, {0.5, 1.0, 0.0}), DomainError);
}

TEST(ContourInversion, Dictionary) {
    const double a = 0.8;
    for (double t : {0.5, 1.0, 2.0}) {
        EXPECT_NEAR(laplace_invert_contour([](cplx s) { return 1.0 / s; }, t).value, 1.0, 1e-8);
        EXPECT_NEAR(laplace_invert_contour([a](cplx s) { return 1.0 / (s + a); }, t).value, std::exp(-a * t), 1e-8);
        EXPECT_NEAR(laplace_invert_contour([a](cplx s) { return 1.0 / ((s + a) * (s + a)); }, t).value,
                    t * std::exp(-a * t), 1e-8);
    }
}

TEST(ContourInversion, MutuallyInverseWithNumericalTransform) {
    const double a = 0.8;
    struct Pair {
        std::function<double(double)> original;
        std::function<cplx(cplx)> transform;
        LaplaceTail tail;
    };
    const std::vector<Pair> dictionary{
        {[](double) { return 1.0; }, [](cplx s) { return 1.0 / s; }, {0.0, 1.0, 0.0}},
        {[a](double t) { return std::exp(-a * t); }, [a](cplx s) { return 1.0 / (s + a); }, {a, 1.0, 0.0}},
        {[a](double t) { return t * std::exp(-a * t); }, [a](cplx s) { return 1.0 / ((s + a) * (s + a)); }, {a, 1.0, 1.0}},
    };
    for (const auto& d : dictionary) {
        for (double s : {1.0, 2.5}) EXPECT_LT(std::abs(numerical_laplace(d.original, s, d.tail).value - d.transform(s)), 1e-7);
        for (double t : {0.5, 1.5}) EXPECT_NEAR(laplace_invert_contour(d.transform, t).value, d.original(t), 1e-7);
    }
}

TEST(ContourInversion, KernelTransformRecoversKernel) {
    const auto inv = laplace_invert_contour([](cplx s) { return kernel_laplace_continued(1.0, s, kStandard); }, 1.0);
    EXPECT_NEAR(inv.value, kernel_K(1.0, 1.0, kStandard), 1e-6);
}

TEST(ContourInversion, RejectsNonPositiveTime) {
    EXPECT_THROW(laplace_invert_contour([](cplx s) { return 1.0 / s; }, 0.0), DomainError);
}

TEST(ContourInversion, NodeDoublingDisagreementThrows) {
    // a discontinuous original (unit step at t = 1) defeats the contour rule at t = 1
    EXPECT_THROW(laplace_invert_contour([](cplx s) { return std::exp(-s) / s; }, 1.0, 8, 1e-12), AccuracyError);
}

}  // namespace
