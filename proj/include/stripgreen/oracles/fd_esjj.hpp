#pragma once

// Method-of-lines reference solver for the junction equation in first-order form
//   phi_t = psi,
//   psi_t = eps psi_xx - eps lambda psi_x - alpha psi + phi_xx - lambda phi_x - sin(phi) + gamma,
// with Dirichlet data phi = h, psi = h_t at both ends. Second-order central
// differences in x, classical RK4 in time.

#include <cmath>
#include <functional>
#include <vector>

#include "stripgreen/errors.hpp"
#include "stripgreen/field.hpp"
#include "stripgreen/junction.hpp"
#include "stripgreen/oracles/fd_integro.hpp"

namespace stripgreen::oracles {

struct EsjjFdOptions {
    bool linearize_sine = false;  // replace sin(phi) by phi
};

inline SpaceTimeField fd_solve_esjj(const JunctionProblem& jp, const std::function<double(double)>& phi_t0,
                                    const FdGrid& grid, const EsjjFdOptions& opt = {}) {
    jp.validate();
    grid.validate();
    const auto& j = jp.junction;
    const int nx = grid.nx;
    const double L = jp.domain.L;
    const double hx = L / (nx - 1);
    const int m = grid.steps_per_output(j.epsilon, jp.domain);
    const double dt = jp.domain.T / (grid.nt - 1) / m;
    const double dh = 1e-4 * jp.domain.T;

    auto h1_t = [&](double t) {
        if (jp.h1_t) return jp.h1_t(t);
        return jp.h1 ? stripgreen::detail::d1_central4(jp.h1, t, dh) : 0.0;
    };
    auto h2_t = [&](double t) {
        if (jp.h2_t) return jp.h2_t(t);
        return jp.h2 ? stripgreen::detail::d1_central4(jp.h2, t, dh) : 0.0;
    };

    std::vector<double> xs(nx);
    for (int i = 0; i < nx; ++i) xs[i] = (i == nx - 1) ? L : i * hx;

    struct State {
        std::vector<double> phi, psi;
    };
    auto make = [&] { return State{std::vector<double>(nx, 0.0), std::vector<double>(nx, 0.0)}; };

    const double inv_h2 = 1.0 / (hx * hx);
    const double inv_2h = 0.5 / hx;
    auto rhs = [&](double t, State& s, State& k) {
        s.phi[0] = jp.h1_at(t);
        s.phi[nx - 1] = jp.h2_at(t);
        s.psi[0] = h1_t(t);
        s.psi[nx - 1] = h2_t(t);
        k.phi[0] = k.phi[nx - 1] = k.psi[0] = k.psi[nx - 1] = 0.0;
        for (int i = 1; i < nx - 1; ++i) {
            const double phi_xx = (s.phi[i - 1] - 2.0 * s.phi[i] + s.phi[i + 1]) * inv_h2;
            const double phi_x = (s.phi[i + 1] - s.phi[i - 1]) * inv_2h;
            const double psi_xx = (s.psi[i - 1] - 2.0 * s.psi[i] + s.psi[i + 1]) * inv_h2;
            const double psi_x = (s.psi[i + 1] - s.psi[i - 1]) * inv_2h;
            const double nl = opt.linearize_sine ? s.phi[i] : std::sin(s.phi[i]);
            k.phi[i] = s.psi[i];
            k.psi[i] = j.epsilon * psi_xx - j.epsilon * j.lambda * psi_x - j.alpha * s.psi[i] + phi_xx -
                       j.lambda * phi_x - nl + j.gamma;
        }
    };

    SpaceTimeField out(nx, grid.nt, jp.domain, "oracle:fd_solve_esjj");
    auto state = make();
    for (int i = 0; i < nx; ++i) {
        state.phi[i] = jp.phi0_at(xs[i]);
        state.psi[i] = phi_t0 ? phi_t0(xs[i]) : 0.0;
        out(i, 0) = state.phi[i];
    }

    auto k1 = make(), k2 = make(), k3 = make(), k4 = make(), tmp = make();
    auto axpy = [&](State& o, const State& b, double h, const State& k) {
        for (int i = 0; i < nx; ++i) {
            o.phi[i] = b.phi[i] + h * k.phi[i];
            o.psi[i] = b.psi[i] + h * k.psi[i];
        }
    };
    double t = 0.0;
    for (int n = 1; n < grid.nt; ++n) {
        for (int step = 0; step < m; ++step) {
            rhs(t, state, k1);
            axpy(tmp, state, 0.5 * dt, k1);
            rhs(t + 0.5 * dt, tmp, k2);
            axpy(tmp, state, 0.5 * dt, k2);
            rhs(t + 0.5 * dt, tmp, k3);
            axpy(tmp, state, dt, k3);
            rhs(t + dt, tmp, k4);
            for (int i = 0; i < nx; ++i) {
                state.phi[i] += dt / 6.0 * (k1.phi[i] + 2.0 * k2.phi[i] + 2.0 * k3.phi[i] + k4.phi[i]);
                state.psi[i] += dt / 6.0 * (k1.psi[i] + 2.0 * k2.psi[i] + 2.0 * k3.psi[i] + k4.psi[i]);
            }
            t = (static_cast<double>(n - 1) + static_cast<double>(step + 1) / m) * (jp.domain.T / (grid.nt - 1));
        }
        state.phi[0] = jp.h1_at(t);
        state.phi[nx - 1] = jp.h2_at(t);
        for (int i = 0; i < nx; ++i) out(i, n) = state.phi[i];
        for (double v : state.phi)
            if (!std::isfinite(v)) throw DataError("fd_solve_esjj: non-finite state at t=" + fmt17(t));
    }
    return out;
}

}  // namespace stripgreen::oracles
