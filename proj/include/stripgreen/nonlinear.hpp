#pragma once

// Semilinear problems L u = f(x,t) + F[u] solved by windowed Picard iteration on
// the Green representation
//
//   u^{k+1} = G[u0, g1, g2, f] + V[F(u^k)],
//
// where V is the product-integration volume operator on the output grid. Past
// windows are frozen; the current window is iterated until the sup-norm
// increment falls below tol.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "stripgreen/errors.hpp"
#include "stripgreen/field.hpp"
#include "stripgreen/green_solver.hpp"
#include "stripgreen/grid_volume.hpp"
#include "stripgreen/junction.hpp"
#include "stripgreen/problem.hpp"
#include "stripgreen/quadrature.hpp"

namespace stripgreen {

// ---------------------------------------------------------------------------
// Exponential memory source F(x,t) = -\int_0^t e^{-(t-tau)/eps} f1(x,tau) dtau
// ---------------------------------------------------------------------------

using HistoryFn = std::function<double(double, double)>;  // (x, tau)

/// F(x, t) by adaptive quadrature.
inline double esjj_source(const HistoryFn& f1_history, double epsilon, double t, double x,
                          const quad::Options& opt = {1e-14, 1e-12, 2000}) {
    if (!(epsilon > 0.0)) throw DomainError("esjj_source: epsilon must be > 0");
    if (!(t >= 0.0)) throw DomainError("esjj_source: t must be >= 0");
    if (t == 0.0 || !f1_history) return 0.0;
    auto r = quad::integrate<double>([&](double tau) { return std::exp(-(t - tau) / epsilon) * f1_history(x, tau); },
                                     0.0, t, opt);
    if (!r.converged) throw AccuracyError("esjj_source: quadrature did not converge", r.error);
    if (!std::isfinite(r.value)) throw DataError("esjj_source: non-finite history value");
    return -r.value;
}

/// F(x, n dt) for n = 0..steps by the exponential update
///   F(t + dt) = e^{-dt/eps} F(t) - \int_t^{t+dt} e^{-(t+dt-tau)/eps} f1 dtau,
/// each step integral by adaptive quadrature.
inline std::vector<double> esjj_source_uniform(const HistoryFn& f1_history, double epsilon, double x, double dt,
                                               int steps, const quad::Options& opt = {1e-15, 1e-12, 200}) {
    if (!(epsilon > 0.0)) throw DomainError("esjj_source_uniform: epsilon must be > 0");
    if (!(dt > 0.0) || steps < 0) throw DomainError("esjj_source_uniform: dt must be > 0 and steps >= 0");
    std::vector<double> F(static_cast<std::size_t>(steps) + 1, 0.0);
    const double decay = std::exp(-dt / epsilon);
    for (int n = 0; n < steps; ++n) {
        const double t0 = n * dt, t1 = (n + 1) * dt;
        double step = 0.0;
        if (f1_history) {
            auto r = quad::integrate<double>(
                [&](double tau) { return std::exp(-(t1 - tau) / epsilon) * f1_history(x, tau); }, t0, t1, opt);
            if (!r.converged) throw AccuracyError("esjj_source_uniform: step quadrature did not converge", r.error);
            step = r.value;
        }
        F[n + 1] = decay * F[n] - step;
    }
    return F;
}

// ---------------------------------------------------------------------------
// Grid sources
// ---------------------------------------------------------------------------

/// Fills rows 0..n_hi of F from the iterate u (rows 0..n_hi valid).
using GridSource = std::function<void(const SpaceTimeField& u, int n_hi, SpaceTimeField& F)>;
using StateFn = std::function<double(double, double, double)>;  // (x, t, u)

/// F(x, t, u) evaluated nodewise.
inline GridSource pointwise_source(StateFn f) {
    return [f = std::move(f)](const SpaceTimeField& u, int n_hi, SpaceTimeField& F) {
        for (int n = 0; n <= n_hi; ++n)
            for (int i = 0; i < u.nx(); ++i) F(i, n) = f(u.x(i), u.t(n), u(i, n));
    };
}

/// F = -\int_0^t e^{-(t-tau)/eps} m(x, tau, u(x,tau)) dtau with m linear in tau
/// between grid rows (exact exponential update of the interpolant).
inline GridSource memory_source(StateFn m, double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("memory_source: epsilon must be > 0");
    return [m = std::move(m), epsilon](const SpaceTimeField& u, int n_hi, SpaceTimeField& F) {
        const double dt = u.ht();
        const double k = 1.0 / epsilon;
        const double one_minus_e = -std::expm1(-k * dt);
        const double c1 = 1.0 / k - one_minus_e / (k * k * dt);  // weight of the newer sample
        const double c0 = one_minus_e / k - c1;
        const double decay = 1.0 - one_minus_e;
        std::vector<double> prev(u.nx());
        for (int i = 0; i < u.nx(); ++i) {
            prev[i] = m(u.x(i), 0.0, u(i, 0));
            F(i, 0) = 0.0;
        }
        for (int n = 1; n <= n_hi; ++n)
            for (int i = 0; i < u.nx(); ++i) {
                const double cur = m(u.x(i), u.t(n), u(i, n));
                F(i, n) = decay * F(i, n - 1) - (c0 * prev[i] + c1 * cur);
                prev[i] = cur;
            }
    };
}

/// Memory source of the junction problem in the gauge variable: m = f1(u, x).
inline GridSource esjj_memory_source(const JunctionParams& j) {
    j.validate();
    return memory_source([j](double x, double, double u) { return f1_eval(u, x, j); }, j.epsilon);
}

// ---------------------------------------------------------------------------
// Picard iteration
// ---------------------------------------------------------------------------

struct PicardConfig {
    double tol = 1e-8;
    int max_iter = 50;
    double window = 0.0;            // time-window length; 0 means the whole horizon
    bool adapt_window = true;       // shrink the window until Lip * mass < contraction_target
    double contraction_target = 0.9;

    void validate(double T) const {
        if (!(tol > 0.0)) throw ConfigError("PicardConfig: tol must be > 0");
        if (max_iter < 1) throw ConfigError("PicardConfig: max_iter must be >= 1");
        if (window < 0.0 || window > T * (1.0 + 1e-12)) throw ConfigError("PicardConfig: window must lie in (0, T]");
        if (!(contraction_target > 0.0 && contraction_target < 1.0))
            throw ConfigError("PicardConfig: contraction_target must lie in (0, 1)");
    }
};

struct PicardStep {
    int iteration;  // global counter
    int window;
    double sup_increment;
};

struct ConvergenceReport {
    std::vector<PicardStep> steps;
    int window_steps = 0;        // grid intervals per window
    int windows = 0;
    double lipschitz_estimate = 0.0;
    double window_mass = 0.0;    // sup Green mass over one window
    bool converged = false;

    /// Largest ratio of consecutive increments within a window, over pairs whose
    /// earlier increment exceeds floor.
    double max_contraction_ratio(double floor) const {
        double r = 0.0;
        for (std::size_t k = 1; k < steps.size(); ++k)
            if (steps[k].window == steps[k - 1].window && steps[k - 1].sup_increment > floor)
                r = std::max(r, steps[k].sup_increment / steps[k - 1].sup_increment);
        return r;
    }

    double last_increment() const { return steps.empty() ? 0.0 : steps.back().sup_increment; }

    void write_csv(std::ostream& os) const {
        os << "iteration,sup_increment\n";
        for (const auto& s : steps) os << s.iteration << ',' << fmt17(s.sup_increment) << '\n';
    }

    void write_csv(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path + " for writing");
        write_csv(os);
    }
};

struct PicardResult {
    SpaceTimeField field;
    ConvergenceReport report;
    double residual = 0.0;  // sup |u - G - V[F(u)]| after convergence
};

namespace detail {

inline void check_finite_rows(const SpaceTimeField& F, int n_hi) {
    for (int n = 0; n <= n_hi; ++n)
        for (int i = 0; i < F.nx(); ++i)
            if (!std::isfinite(F(i, n)))
                throw DataError("picard_solve: non-finite source at x=" + fmt17(F.x(i)) + ", t=" + fmt17(F.t(n)));
}

}  // namespace detail

/// Linear part G[u0, g1, g2, f] on the grid; boundary rows carry g1, g2 and row 0 carries u0.
inline SpaceTimeField linear_part(const ProblemSpec& sp, int nx, int nt, const GreenConfig& cfg = {}) {
    SpaceTimeField g(nx, nt, sp.domain, "green:linear_part");
    for (int i = 0; i < nx; ++i) g(i, 0) = sp.u0_at(g.x(i));
    for (int n = 1; n < nt; ++n) {
        g(0, n) = sp.g1_at(g.t(n));
        g(nx - 1, n) = sp.g2_at(g.t(n));
        for (int i = 1; i < nx - 1; ++i) g(i, n) = solve_linear_at(g.x(i), g.t(n), sp, cfg);
    }
    return g;
}

/// Picard solution of L u = f + F[u] with a prebuilt volume operator.
inline PicardResult picard_solve(const ProblemSpec& sp, const GridSource& source, const SpaceTimeField& linear,
                                 const GridVolumeOperator& op, const PicardConfig& pcfg) {
    pcfg.validate(sp.domain.T);
    const int nx = op.nx(), nt = op.nt();
    if (linear.nx() != nx || linear.nt() != nt) throw ConfigError("picard_solve: linear part and operator grids differ");
    const double ht = sp.domain.T / (nt - 1);

    SpaceTimeField F(nx, nt, sp.domain);
    SpaceTimeField u(nx, nt, sp.domain, "green:picard");

    auto update_rows = [&](int n_lo, int n_hi, SpaceTimeField& target) {
        double inc = 0.0;
        for (int n = n_lo; n <= n_hi; ++n)
            for (int i = 1; i < nx - 1; ++i) {
                const double v = linear(i, n) + op.apply_at(F, i, n);
                inc = std::max(inc, std::abs(v - target(i, n)));
                target(i, n) = v;
            }
        return inc;
    };

    // u^0: linear solution with F evaluated at u = 0
    SpaceTimeField zero(nx, nt, sp.domain);
    if (source) source(zero, nt - 1, F);
    detail::check_finite_rows(F, nt - 1);
    SpaceTimeField f_zero = F;
    u = linear;
    update_rows(1, nt - 1, u);

    ConvergenceReport rep;
    // secant Lipschitz estimate between u = 0 and u^0
    if (source) {
        source(u, nt - 1, F);
        detail::check_finite_rows(F, nt - 1);
        double du = 0.0, dF = 0.0;
        for (std::size_t k = 0; k < u.values().size(); ++k) {
            du = std::max(du, std::abs(u.values()[k]));
            dF = std::max(dF, std::abs(F.values()[k] - f_zero.values()[k]));
        }
        rep.lipschitz_estimate = du > 0.0 ? dF / du : 0.0;
    }

    int max_steps = nt - 1;
    if (pcfg.window > 0.0) max_steps = std::clamp(static_cast<int>(std::floor(pcfg.window / ht + 1e-9)), 1, nt - 1);
    int w = max_steps;
    if (pcfg.adapt_window)
        while (w > 1 && rep.lipschitz_estimate * op.window_mass(w) >= pcfg.contraction_target) --w;
    rep.window_steps = w;
    rep.window_mass = op.window_mass(w);

    int counter = 0;
    for (int n0 = 0, win = 0; n0 < nt - 1; n0 += w, ++win) {
        const int n1 = std::min(n0 + w, nt - 1);
        rep.windows = win + 1;
        for (int it = 1;; ++it) {
            if (source) {
                source(u, n1, F);
                detail::check_finite_rows(F, n1);
            }
            const double inc = update_rows(n0 + 1, n1, u);
            rep.steps.push_back({++counter, win, inc});
            if (inc < pcfg.tol) break;
            if (it >= pcfg.max_iter) {
                rep.converged = false;
                throw ConvergenceError("picard_solve: window " + std::to_string(win) + " did not converge", it, inc);
            }
        }
    }
    rep.converged = true;

    PicardResult res{u, rep, 0.0};
    if (source) source(u, nt - 1, F);
    SpaceTimeField check = u;
    res.residual = update_rows(1, nt - 1, check);
    return res;
}

/// Convenience overload: builds the volume operator and the linear part.
inline PicardResult picard_solve(const ProblemSpec& sp, const GridSource& source, int nx, int nt,
                                 const PicardConfig& pcfg = {}, const GreenConfig& cfg = {},
                                 const GridVolumeConfig& vcfg = {}) {
    sp.validate();
    pcfg.validate(sp.domain.T);
    const GridVolumeOperator op(sp, nx, nt, cfg, vcfg);
    const SpaceTimeField lin = linear_part(sp, nx, nt, cfg);
    return picard_solve(sp, source, lin, op, pcfg);
}

inline PicardResult picard_solve(const ProblemSpec& sp, const StateFn& F, int nx, int nt,
                                 const PicardConfig& pcfg = {}, const GreenConfig& cfg = {},
                                 const GridVolumeConfig& vcfg = {}) {
    return picard_solve(sp, F ? pointwise_source(F) : GridSource{}, nx, nt, pcfg, cfg, vcfg);
}

}  // namespace stripgreen
