#pragma once

// End-to-end acceptance checks shared by the acceptance test binary and the
// `selftest` command. Each check returns a pass flag, a one-line detail and
// its wall time; runtime budgets are part of the pass condition.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "stripgreen/esjj.hpp"
#include "stripgreen/green_solver.hpp"
#include "stripgreen/junction.hpp"
#include "stripgreen/kernel.hpp"
#include "stripgreen/nonlinear.hpp"
#include "stripgreen/oracles/eigenmode.hpp"
#include "stripgreen/oracles/fd_esjj.hpp"
#include "stripgreen/oracles/fd_integro.hpp"
#include "stripgreen/theta.hpp"

namespace stripgreen::selftest {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0;
};

namespace detail {

inline std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

template <class Body>
CriterionResult timed(int id, std::string title, double budget, Body&& body) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    r.budget = budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.passed = body(r.detail);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > budget) {
        r.passed = false;
        r.detail += format(" [over budget: %.1f s > %.0f s]", r.seconds, budget);
    }
    return r;
}

inline constexpr double kPi = std::numbers::pi;

}  // namespace detail

/// Standard operator parameter set.
inline OperatorParams standard_params() { return {1.0, 1.0, 1.0, 2.0}; }

// 1. Numerical transform of the kernel against the closed transform.
inline CriterionResult kernel_transform_consistency() {
    return detail::timed(1, "kernel transform consistency", 120.0, [](std::string& d) {
        const std::vector<double> rs{0.5, 1.0, 2.0}, ss{1.0, 2.0, 5.0};
        const auto p = standard_params();
        const auto rep = validate_kernel_laplace(rs, ss, p);
        QuadratureConfig printed;
        printed.form = KernelForm::printed;
        QuadratureConfig sqrt_y;
        sqrt_y.form = KernelForm::sqrt_y;
        OperatorParams p4 = p;
        p4.b = 4.0;
        const double e_printed_b4 = validate_kernel_laplace(rs, ss, p4, printed).max_rel_err();
        const double e_sqrt_y = validate_kernel_laplace(rs, ss, p, sqrt_y).max_rel_err();
        const double e_consistent_b4 = validate_kernel_laplace(rs, ss, p4).max_rel_err();
        d = detail::format(
            "max rel err %.2e (b=1), %.2e (b=4); printed-coefficient form at b=4: %.2e; sqrt(y) weight form: %.2e",
            rep.max_rel_err(), e_consistent_b4, e_printed_b4, e_sqrt_y);
        return rep.max_rel_err() < 1e-4 && !rep.any_inconclusive() && e_consistent_b4 < 1e-4;
    });
}

// 2. Image series of the transformed strip kernel against the hyperbolic closed form.
inline CriterionResult strip_kernel_closed_form() {
    return detail::timed(2, "strip kernel closed form", 1.0, [](std::string& d) {
        const StripDomain dom{1.0, 1.0};
        const auto p = standard_params();
        double worst = 0.0;
        for (double y : {0.1, 0.5, 1.7})
            for (cplx sg : {cplx(0.3, 0.0), cplx(1.0, 0.5), cplx(4.0, -2.0)}) {
                const cplx closed = theta_hat(y, sg, dom, p);
                const cplx series = theta_hat_series(y, sg, dom, p);
                worst = std::max(worst, std::abs(series - closed) / std::abs(closed));
            }
        d = detail::format("max rel diff %.2e over 9 (y, sigma) pairs", worst);
        return worst < 1e-10;
    });
}

// 3. Green solution of a Dirichlet eigenmode against the scalar mode equation.
inline CriterionResult eigenmode_exactness() {
    return detail::timed(3, "eigenmode exactness", 60.0, [](std::string& d) {
        bool ok = true;
        std::string parts;
        for (double b : {0.0, 1.0}) {
            ProblemSpec sp;
            sp.params = {1.0, 1.0, b, 2.0};
            sp.u0 = [](double x) { return std::sin(detail::kPi * x); };
            const double mu = oracles::dirichlet_eigenvalue(1, sp.domain.L);
            double worst = 0.0;
            for (int n = 1; n <= 100; ++n) {
                const double t = sp.domain.T * n / 100.0;
                const double amp = oracles::eigenmode_ode_solution(mu, sp.params, t);
                for (double x : {0.1, 0.3, 0.5, 0.7, 0.9})
                    worst = std::max(worst, std::abs(solve_linear_at(x, t, sp) - amp * std::sin(detail::kPi * x)));
            }
            ok = ok && worst <= 1e-4;
            parts += detail::format("%sb=%g: sup err %.2e", parts.empty() ? "" : "; ", b, worst);
        }
        d = parts + " (101 time samples incl. t=0)";
        return ok;
    });
}

// 4. Boundary and initial data are attained by the Green representation.
inline CriterionResult dirichlet_attainment() {
    return detail::timed(4, "Dirichlet attainment", 120.0, [](std::string& d) {
        ProblemSpec sp;
        sp.params = standard_params();
        sp.domain = {1.0, 3.0};
        sp.g1 = [](double t) { return std::sin(t); };
        const double x_near = sp.domain.L / 1000.0;
        double wall = 0.0;
        for (int k = 0; k <= 25; ++k) {
            const double t = 0.5 + 2.5 * k / 25.0;
            wall = std::max(wall, std::abs(boundary_term(x_near, t, sp) - std::sin(t)));
        }
        ProblemSpec si;
        si.params = standard_params();
        si.u0 = [](double x) { return std::sin(detail::kPi * x) + 0.3 * std::sin(2.0 * detail::kPi * x); };
        double initial = 0.0;
        for (int i = 1; i <= 19; ++i) {
            const double x = i / 20.0;
            initial = std::max(initial, std::abs(initial_term(x, 1e-4, si) - si.u0(x)));
        }
        d = detail::format("max |u(L/1000,t) - g1(t)| = %.2e on [0.5,3]; max |u(x,1e-4) - u0(x)| = %.2e", wall, initial);
        return wall <= 0.02 && initial <= 0.02;
    });
}

/// Generic linear problem used for the Green-vs-FD comparison.
inline ProblemSpec generic_linear_problem() {
    ProblemSpec sp;
    sp.params = standard_params();
    sp.u0 = [](double x) { return std::sin(detail::kPi * x); };
    sp.g1 = [](double t) { return std::sin(t); };
    sp.source = [](double x, double t) { return std::exp(-t) * (1.0 - x); };
    return sp;
}

// 5. Green representation against the finite-difference oracle under refinement.
inline CriterionResult green_vs_fd() {
    return detail::timed(5, "Green vs finite-difference agreement", 300.0, [](std::string& d) {
        const ProblemSpec sp = generic_linear_problem();
        const std::vector<double> xs{0.1, 0.3, 0.5, 0.7, 0.9};
        std::vector<double> green;
        for (int n = 1; n <= 4; ++n)
            for (double x : xs) green.push_back(solve_linear_at(x, 0.25 * n, sp));
        auto distance = [&](int nx) {
            oracles::FdGrid g;
            g.nx = nx;
            g.nt = 5;
            const auto u = oracles::fd_solve_integro(sp, g);
            double m = 0.0;
            std::size_t k = 0;
            for (int n = 1; n <= 4; ++n)
                for (double x : xs) {
                    const int i = static_cast<int>(std::lround(x * (nx - 1)));
                    m = std::max(m, std::abs(u(i, n) - green[k++]));
                }
            return m;
        };
        const double d201 = distance(201);
        const double d401 = distance(401);
        const double ratio = d201 / d401;
        d = detail::format("sup distance %.2e (201 nodes), %.2e (401 nodes), ratio %.2f", d201, d401, ratio);
        return d201 <= 5e-3 && ratio >= 3.0 && ratio <= 5.0;
    });
}

/// Junction test problem: eps=0.3, alpha=0.8, lambda=0.3, gamma=0.05 on [0,1]x[0,1],
/// phi0 = e^{lambda x/2} (0.5 sin(pi x) + x^4 (1-x)^4 q(x)), with q from
/// tests/oracles/corner_compat.py so that the gauge problem is compatible at
/// the corners through u_ttt.
inline JunctionProblem junction_test_problem() {
    JunctionProblem jp;
    jp.junction = {0.3, 0.8, 0.3, 0.05};
    const double lam = jp.junction.lambda;
    jp.phi0 = [lam](double x) {
        const double q = -0.023148148148148148148 +
                         x * (-0.030067961876086405330 + x * (0.040169896322814872508 - 0.0068775820491603608646 * x));
        const double w = x * (1.0 - x);
        return std::exp(0.5 * lam * x) * (0.5 * std::sin(detail::kPi * x) + w * w * w * w * q);
    };
    return jp;
}

// 6. Junction equation residual of the transformed integro-differential solution.
inline CriterionResult junction_equivalence() {
    return detail::timed(6, "junction equivalence", 600.0, [](std::string& d) {
        const auto rep = equivalence_study(junction_test_problem());
        bool ok = true;
        double dist = 0.0;
        std::string orders;
        for (const auto& r : rep.rows) {
            dist = std::max(dist, r.esjj_distance);
            if (std::isfinite(r.observed_order)) {
                ok = ok && r.observed_order >= 1.8 && r.observed_order <= 2.2;
                orders += detail::format("%s%.3f", orders.empty() ? "" : ", ", r.observed_order);
            }
        }
        d = detail::format("residuals %.2e, %.2e, %.2e; observed orders %s; max distance to junction solver %.2e",
                           rep.rows[0].residual, rep.rows[1].residual, rep.rows[2].residual, orders.c_str(), dist);
        return ok && dist <= 5e-3;
    });
}

// 7. The exponential memory source satisfies F_t + F/eps + f1 = 0.
inline CriterionResult memory_source_identity() {
    return detail::timed(7, "memory source identity", 1.0, [](std::string& d) {
        const double eps = 0.3;
        std::mt19937 rng(20240611u);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        std::array<double, 8> c{};
        for (auto& v : c) v = coef(rng);
        const std::vector<std::pair<std::string, HistoryFn>> profiles{
            {"constant", [](double, double) { return 0.7; }},
            {"exp", [](double, double t) { return std::exp(-t); }},
            {"random smooth",
             [c](double, double t) {
                 double s = 0.0;
                 for (int k = 0; k < 4; ++k) s += c[2 * k] * std::sin((k + 1) * t + c[2 * k + 1]);
                 return s;
             }},
        };
        const std::vector<double> times{0.3, 0.7, 1.0, 1.5};
        double worst = 0.0;
        for (const auto& [name, f] : profiles) worst = std::max(worst, source_identity_residual(f, eps, 0.5, times));
        d = detail::format("max |F_t + F/eps + f1| = %.2e over 3 profiles", worst);
        return worst <= 1e-6;
    });
}

/// Distance in units of the last place of max(|x|, |y|, |scale|).
inline double ulp_distance(double x, double y, double scale) {
    const double m = std::max({std::abs(x), std::abs(y), std::abs(scale)});
    const double ulp = std::nextafter(m, std::numeric_limits<double>::infinity()) - m;
    return std::abs(x - y) / ulp;
}

// 8. Parameter map identities over random junction parameters.
inline CriterionResult parameter_map_identities() {
    return detail::timed(8, "parameter map identities", 1.0, [](std::string& d) {
        std::mt19937_64 rng(7u);
        std::uniform_real_distribution<double> eps_d(0.01, 10.0), alpha_d(0.0, 5.0), lam_d(-3.0, 3.0), gam_d(-1.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const JunctionParams j{eps_d(rng), alpha_d(rng), lam_d(rng), gam_d(rng)};
            const auto p = map_params(j).params;
            const double lhs1 = p.a + 1.0 / j.epsilon;
            const double rhs1 = j.alpha + j.epsilon * j.lambda * j.lambda / 4.0;
            const double lhs2 = p.b + p.a / j.epsilon;
            const double rhs2 = j.lambda * j.lambda / 4.0;
            worst = std::max({worst, ulp_distance(lhs1, rhs1, 1.0 / j.epsilon),
                              ulp_distance(lhs2, rhs2, p.a / j.epsilon), ulp_distance(p.beta * j.epsilon, 1.0, 1.0)});
        }
        d = detail::format("max deviation %.1f ulp over 1000 draws", worst);
        return worst <= 4.0;
    });
}

/// Manufactured semilinear problem: F(x,t,u) = f0(x,t) + sin(u) with exact solution e^{-t} sin(pi x).
struct ManufacturedSemilinear {
    ProblemSpec spec;
    StateFn source;
    std::function<double(double, double)> exact;
};

inline ManufacturedSemilinear manufactured_semilinear() {
    ManufacturedSemilinear m;
    m.spec.params = standard_params();
    const auto p = m.spec.params;
    m.spec.u0 = [](double x) { return std::sin(detail::kPi * x); };
    m.exact = [](double x, double t) { return std::exp(-t) * std::sin(detail::kPi * x); };
    m.source = [p, exact = m.exact](double x, double t, double u) {
        // L u* with memory \int_0^t e^{-beta(t-tau)} e^{-tau} dtau = (e^{-t} - e^{-beta t}) / (beta - 1)
        const double memory = (std::exp(-t) - std::exp(-p.beta * t)) / (p.beta - 1.0);
        const double lu = std::sin(detail::kPi * x) *
                          (std::exp(-t) * (-1.0 + p.epsilon * detail::kPi * detail::kPi + p.a) + p.b * memory);
        return lu - std::sin(exact(x, t)) + std::sin(u);
    };
    return m;
}

// 9. Picard convergence on the manufactured problem; failure on an over-long window.
inline CriterionResult picard_convergence() {
    return detail::timed(9, "Picard convergence", 180.0, [](std::string& d) {
        const auto m = manufactured_semilinear();
        const auto res = picard_solve(m.spec, m.source, 21, 21);
        double err = 0.0;
        for (int n = 0; n < res.field.nt(); ++n)
            for (int i = 0; i < res.field.nx(); ++i)
                err = std::max(err, std::abs(res.field(i, n) - m.exact(res.field.x(i), res.field.t(n))));
        const double ratio = res.report.max_contraction_ratio(1e-12);
        bool raised = false;
        double last = 0.0;
        try {
            PicardConfig pc;
            pc.adapt_window = false;
            pc.max_iter = 8;
            picard_solve(m.spec, StateFn([](double, double, double u) { return 60.0 * u; }), 11, 11, pc);
        } catch (const ConvergenceError& e) {
            raised = true;
            last = e.last_increment();
        }
        d = detail::format("%zu iterations, max increment ratio %.3f, sup error %.2e; over-long window %s (last increment %.2e)",
                           res.report.steps.size(), ratio, err, raised ? "raised ConvergenceError" : "did NOT raise", last);
        return res.report.converged && ratio <= 0.9 && err <= 1e-3 && raised;
    });
}

/// Compact sin^2 boundary pulse of unit height on [0, 0.5].
inline double unit_pulse(double t) {
    if (t <= 0.0 || t >= 0.5) return 0.0;
    const double s = std::sin(detail::kPi * t / 0.5);
    return s * s;
}

// 10. Decay of the response to a compact boundary pulse.
inline CriterionResult decay_study_rates() {
    return detail::timed(10, "decay study", 180.0, [](std::string& d) {
        auto run = [](const OperatorParams& p, double horizon) {
            ProblemSpec sp;
            sp.params = p;
            sp.domain = {1.0, horizon};
            sp.g1 = unit_pulse;
            sp.time_breaks = {0.5};
            return decay_study(sp, horizon);
        };
        const auto heat = run({0.1, 0.5, 0.0, 1.0}, 5.0);
        const auto full1 = run(standard_params(), 3.0);
        const auto full2 = run(standard_params(), 3.0);
        const bool same3 = detail::format("%.3g", full1.rate) == detail::format("%.3g", full2.rate);
        d = detail::format("rate %.4f (b=0, a=0.5); rate %.4f / %.4f on rerun (full parameters)", heat.rate, full1.rate,
                           full2.rate);
        return heat.rate_defined && heat.rate >= 0.5 && full1.rate_defined && full1.rate > 0.0 && same3;
    });
}

inline std::vector<std::function<CriterionResult()>> all_criteria() {
    return {kernel_transform_consistency, strip_kernel_closed_form, eigenmode_exactness, dirichlet_attainment,
            green_vs_fd,                  junction_equivalence,     memory_source_identity, parameter_map_identities,
            picard_convergence,           decay_study_rates};
}

/// Runs every criterion, printing one line each; returns true when all pass.
inline bool run_all(std::ostream& os) {
    bool all = true;
    for (const auto& c : all_criteria()) {
        const auto r = c();
        all = all && r.passed;
        os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.title << ": " << r.detail
           << detail::format(" (%.2f s)", r.seconds) << '\n'
           << std::flush;
    }
    return all;
}

}  // namespace stripgreen::selftest
