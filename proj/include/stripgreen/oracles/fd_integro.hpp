#pragma once

// Method-of-lines reference solver for
//   u_t - eps u_xx + a u + b \int_0^t e^{-beta (t-tau)} u dtau = f(x,t) + N(x,t,u) - w,
// with the memory term localised through v_t = u - beta v, v(0) = 0, and an
// optional second exponential memory w_t = m(x,t,u) - kappa w, w(0) = 0
// (the source F = -\int_0^t e^{-kappa (t-tau)} m dtau). Second-order central
// differences in x, classical RK4 in time, Dirichlet data imposed at every stage.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "stripgreen/errors.hpp"
#include "stripgreen/field.hpp"
#include "stripgreen/problem.hpp"

namespace stripgreen::oracles {

struct FdGrid {
    int nx = 101;
    int nt = 101;             // output time levels
    int substeps = 0;         // RK4 steps per output interval; 0 picks the smallest stable count
    double stability_c = 0.2; // dt <= c hx^2 / eps

    void validate() const {
        if (nx < 5 || nt < 5) throw ConfigError("FdGrid: nx and nt must be >= 5");
        if (substeps < 0) throw ConfigError("FdGrid: substeps must be >= 0");
        if (!(stability_c > 0.0)) throw ConfigError("FdGrid: stability_c must be > 0");
    }

    /// RK4 steps per output interval for diffusivity eps on [0,L] x [0,T].
    int steps_per_output(double eps, const StripDomain& d) const {
        const double hx = d.L / (nx - 1);
        const double ht = d.T / (nt - 1);
        const double dt_max = stability_c * hx * hx / eps;
        if (substeps > 0) {
            if (ht / substeps > dt_max * (1.0 + 1e-12))
                throw ConfigError("FdGrid: time step " + fmt17(ht / substeps) + " exceeds stability limit " + fmt17(dt_max));
            return substeps;
        }
        return static_cast<int>(std::ceil(ht / dt_max * (1.0 - 1e-12)));
    }
};

using StateFn = std::function<double(double, double, double)>;  // (x, t, u)

struct FdExtras {
    StateFn nonlinear;     // N(x, t, u), added to the source
    StateFn memory_f1;     // m(x, t, u) of the second memory; F = -w
    double memory_rate = 0.0;
};

namespace detail {

struct IntegroState {
    std::vector<double> u, v, w;
};

inline void axpy_state(IntegroState& out, const IntegroState& base, double h, const IntegroState& k) {
    for (std::size_t i = 0; i < base.u.size(); ++i) {
        out.u[i] = base.u[i] + h * k.u[i];
        out.v[i] = base.v[i] + h * k.v[i];
        if (!base.w.empty()) out.w[i] = base.w[i] + h * k.w[i];
    }
}

}  // namespace detail

inline SpaceTimeField fd_solve_integro(const ProblemSpec& sp, const FdGrid& grid, const FdExtras& extras = {}) {
    sp.validate();
    grid.validate();
    const auto& p = sp.params;
    const int nx = grid.nx;
    const double L = sp.domain.L;
    const double hx = L / (nx - 1);
    const int m = grid.steps_per_output(p.epsilon, sp.domain);
    const double dt = sp.domain.T / (grid.nt - 1) / m;
    const bool with_w = static_cast<bool>(extras.memory_f1);

    std::vector<double> xs(nx);
    for (int i = 0; i < nx; ++i) xs[i] = (i == nx - 1) ? L : i * hx;

    auto make = [&] {
        detail::IntegroState s;
        s.u.assign(nx, 0.0);
        s.v.assign(nx, 0.0);
        if (with_w) s.w.assign(nx, 0.0);
        return s;
    };

    const double inv_h2 = p.epsilon / (hx * hx);
    auto rhs = [&](double t, detail::IntegroState& s, detail::IntegroState& k) {
        s.u[0] = sp.g1_at(t);
        s.u[nx - 1] = sp.g2_at(t);
        k.u[0] = k.u[nx - 1] = 0.0;
        for (int i = 0; i < nx; ++i) k.v[i] = s.u[i] - p.beta * s.v[i];
        if (with_w) {
            for (int i = 0; i < nx; ++i) k.w[i] = extras.memory_f1(xs[i], t, s.u[i]) - extras.memory_rate * s.w[i];
        }
        for (int i = 1; i < nx - 1; ++i) {
            double r = inv_h2 * (s.u[i - 1] - 2.0 * s.u[i] + s.u[i + 1]) - p.a * s.u[i] - p.b * s.v[i];
            if (sp.source) r += sp.source(xs[i], t);
            if (extras.nonlinear) r += extras.nonlinear(xs[i], t, s.u[i]);
            if (with_w) r -= s.w[i];
            k.u[i] = r;
        }
    };

    SpaceTimeField out(nx, grid.nt, sp.domain, "oracle:fd_solve_integro");
    auto state = make();
    for (int i = 0; i < nx; ++i) state.u[i] = sp.u0_at(xs[i]);
    // keep the t = 0 row equal to u0 even at corners
    for (int i = 0; i < nx; ++i) out(i, 0) = state.u[i];

    auto k1 = make(), k2 = make(), k3 = make(), k4 = make(), tmp = make();
    double t = 0.0;
    for (int n = 1; n < grid.nt; ++n) {
        for (int step = 0; step < m; ++step) {
            rhs(t, state, k1);
            detail::axpy_state(tmp, state, 0.5 * dt, k1);
            rhs(t + 0.5 * dt, tmp, k2);
            detail::axpy_state(tmp, state, 0.5 * dt, k2);
            rhs(t + 0.5 * dt, tmp, k3);
            detail::axpy_state(tmp, state, dt, k3);
            rhs(t + dt, tmp, k4);
            for (int i = 0; i < nx; ++i) {
                state.u[i] += dt / 6.0 * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
                state.v[i] += dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
                if (with_w) state.w[i] += dt / 6.0 * (k1.w[i] + 2.0 * k2.w[i] + 2.0 * k3.w[i] + k4.w[i]);
            }
            t = (static_cast<double>(n - 1) + static_cast<double>(step + 1) / m) * (sp.domain.T / (grid.nt - 1));
        }
        state.u[0] = sp.g1_at(t);
        state.u[nx - 1] = sp.g2_at(t);
        for (int i = 0; i < nx; ++i) out(i, n) = state.u[i];
        for (double v : state.u)
            if (!std::isfinite(v)) throw DataError("fd_solve_integro: non-finite state at t=" + fmt17(t));
    }
    return out;
}

}  // namespace stripgreen::oracles
