#pragma once

// Equivalence between the junction equation and the integro-differential
// problem. With phi = e^{lambda x/2} u and the mapped parameters, applying
// (d/dt + beta) to
//   u_t - eps u_xx + a u + b \int_0^t e^{-beta(t-tau)} u dtau = F,
//   F = -\int_0^t e^{-(t-tau)/eps} f1 dtau,
// gives
//   eps u_xxt - u_tt + u_xx - (alpha + eps lambda^2/4) u_t - lambda^2/4 u = f1,
// which is the junction equation for phi.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "stripgreen/errors.hpp"
#include "stripgreen/field.hpp"
#include "stripgreen/junction.hpp"
#include "stripgreen/nonlinear.hpp"
#include "stripgreen/oracles/fd_esjj.hpp"
#include "stripgreen/oracles/fd_integro.hpp"
#include "stripgreen/problem.hpp"
#include "stripgreen/quadrature.hpp"

namespace stripgreen {

// ---------------------------------------------------------------------------
// Gauge transform
// ---------------------------------------------------------------------------

/// phi(x, t) = e^{lambda x/2} u(x, t) nodewise.
inline SpaceTimeField gauge_forward(const SpaceTimeField& u, double lambda) {
    SpaceTimeField phi = u;
    for (int i = 0; i < u.nx(); ++i) {
        const double g = std::exp(0.5 * lambda * u.x(i));
        for (int n = 0; n < u.nt(); ++n) phi(i, n) = g * u(i, n);
    }
    phi.set_provenance(u.provenance() + "|gauge_forward");
    return phi;
}

/// u(x, t) = e^{-lambda x/2} phi(x, t) nodewise.
inline SpaceTimeField gauge_backward(const SpaceTimeField& phi, double lambda) {
    SpaceTimeField u = phi;
    for (int i = 0; i < phi.nx(); ++i) {
        const double g = std::exp(0.5 * lambda * phi.x(i));
        for (int n = 0; n < phi.nt(); ++n) u(i, n) = phi(i, n) / g;
    }
    u.set_provenance(phi.provenance() + "|gauge_backward");
    return u;
}

// ---------------------------------------------------------------------------
// Initial velocity
// ---------------------------------------------------------------------------

/// x -> eps u0''(x) - a u0(x), the value of u_t at t = 0 (the memory term and
/// the junction source vanish there).
struct InitialVelocity {
    std::function<double(double)> u0;
    std::function<double(double)> u0_xx;  // empty: 4th-order central differences
    OperatorParams params;
    double h = 1e-3;

    bool finite_difference() const { return !u0_xx; }
    std::string warning() const {
        return finite_difference() ? "consistent_initial_velocity: u0'' approximated by 4th-order central differences"
                                   : std::string{};
    }

    double operator()(double x) const {
        if (!u0) return 0.0;
        const double d2 = u0_xx ? u0_xx(x) : detail::d2_central4(u0, x, h);
        return params.epsilon * d2 - params.a * u0(x);
    }
};

inline InitialVelocity consistent_initial_velocity(std::function<double(double)> u0, const OperatorParams& p,
                                                   std::function<double(double)> u0_xx = {}, double h = 1e-3) {
    p.validate_basic();
    if (!(h > 0.0)) throw DomainError("consistent_initial_velocity: h must be > 0");
    return InitialVelocity{std::move(u0), std::move(u0_xx), p, h};
}

// ---------------------------------------------------------------------------
// Residuals
// ---------------------------------------------------------------------------

/// Sup over interior nodes of
///   eps phi_xxt + phi_xx - phi_tt - eps lambda phi_xt - lambda phi_x - alpha phi_t - sin(phi) + gamma
/// with second-order central stencils.
inline double residual_esjj(const SpaceTimeField& phi, const JunctionParams& j) {
    j.validate();
    if (phi.nx() < 5 || phi.nt() < 5) throw DomainError("residual_esjj: grid too coarse (need nx, nt >= 5)");
    const double hx = phi.hx(), ht = phi.ht();
    auto dxx = [&](int i, int n) { return (phi(i - 1, n) - 2.0 * phi(i, n) + phi(i + 1, n)) / (hx * hx); };
    auto dx = [&](int i, int n) { return (phi(i + 1, n) - phi(i - 1, n)) / (2.0 * hx); };
    double worst = 0.0;
    for (int n = 1; n < phi.nt() - 1; ++n)
        for (int i = 1; i < phi.nx() - 1; ++i) {
            const double p_xx = dxx(i, n);
            const double p_xxt = (dxx(i, n + 1) - dxx(i, n - 1)) / (2.0 * ht);
            const double p_tt = (phi(i, n + 1) - 2.0 * phi(i, n) + phi(i, n - 1)) / (ht * ht);
            const double p_xt = (dx(i, n + 1) - dx(i, n - 1)) / (2.0 * ht);
            const double p_x = dx(i, n);
            const double p_t = (phi(i, n + 1) - phi(i, n - 1)) / (2.0 * ht);
            const double r = j.epsilon * p_xxt + p_xx - p_tt - j.epsilon * j.lambda * p_xt - j.lambda * p_x -
                             j.alpha * p_t - (std::sin(phi(i, n)) - j.gamma);
            worst = std::max(worst, std::abs(r));
        }
    return worst;
}

struct IdentityProbe {
    std::string name;
    std::function<double(double, double)> u;  // (x, t)
};

struct IdentityRow {
    std::string name;
    double discrepancy;
};

struct IdentityReport {
    std::vector<IdentityRow> rows;
    double max_discrepancy() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.discrepancy);
        return m;
    }
};

/// Checks (d/dt + beta) L u = -E[u] for each probe at sample points, with
/// E[u] = eps u_xxt - u_tt + u_xx - (alpha + eps lambda^2/4) u_t - lambda^2/4 u.
/// L u uses quadrature for the memory term; derivatives use 5-point stencils of step h.
inline IdentityReport verify_operator_identity(const OperatorParams& p, const JunctionParams& j,
                                               const std::vector<IdentityProbe>& probes, double h = 1e-3,
                                               const StripDomain& d = {}) {
    const auto m = map_params(j).params;
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)}); };
    if (!close(m.epsilon, p.epsilon) || !close(m.a, p.a) || !close(m.b, p.b) || !close(m.beta, p.beta))
        throw ConfigError("verify_operator_identity: operator parameters are not the image of the junction parameters");

    using F1 = std::function<double(double)>;
    auto d1 = [h](const F1& f, double s) { return detail::d1_central4(f, s, h); };
    auto d2 = [h](const F1& f, double s) { return detail::d2_central4(f, s, h); };

    IdentityReport rep;
    for (const auto& pr : probes) {
        auto u = pr.u;
        auto memory = [&](double x, double t) {
            if (t <= 0.0) return 0.0;
            auto r = quad::integrate<double>([&](double tau) { return std::exp(-p.beta * (t - tau)) * u(x, tau); }, 0.0,
                                             t, {1e-15, 1e-13, 2000});
            return r.value;
        };
        auto Lu = [&](double x, double t) {
            const double ut = d1([&](double s) { return u(x, s); }, t);
            const double uxx = d2([&](double y) { return u(y, t); }, x);
            return ut - p.epsilon * uxx + p.a * u(x, t) + p.b * memory(x, t);
        };
        double worst = 0.0;
        for (int ix = 1; ix <= 4; ++ix)
            for (int it = 1; it <= 4; ++it) {
                const double x = d.L * ix / 5.0;
                const double t = d.T * it / 5.0;
                const double lhs = d1([&](double s) { return Lu(x, s); }, t) + p.beta * Lu(x, t);
                const double u_t = d1([&](double s) { return u(x, s); }, t);
                const double u_tt = d2([&](double s) { return u(x, s); }, t);
                const double u_xx = d2([&](double y) { return u(y, t); }, x);
                const double u_xxt = d1([&](double s) { return d2([&](double y) { return u(y, s); }, x); }, t);
                const double e = j.epsilon * u_xxt - u_tt + u_xx - (j.alpha + j.epsilon * j.lambda * j.lambda / 4.0) * u_t -
                                 j.lambda * j.lambda / 4.0 * u(x, t);
                worst = std::max(worst, std::abs(lhs + e));
            }
        rep.rows.push_back({pr.name, worst});
    }
    return rep;
}

/// max |F_t + F/eps + f1| and |F(0)| over the sample times, F from esjj_source,
/// F_t by 5-point central differences of step h.
inline double source_identity_residual(const HistoryFn& f1_history, double epsilon, double x,
                                       const std::vector<double>& times, double h = 1e-3) {
    double worst = std::abs(esjj_source(f1_history, epsilon, 0.0, x));
    for (double t : times) {
        if (t - 2.0 * h < 0.0) throw DomainError("source_identity_residual: sample time too close to 0");
        auto F = [&](double s) { return esjj_source(f1_history, epsilon, s, x); };
        const double Ft = detail::d1_central4(F, t, h);
        worst = std::max(worst, std::abs(Ft + F(t) / epsilon + f1_history(x, t)));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// End-to-end equivalence study
// ---------------------------------------------------------------------------

/// Integro-differential problem for u = e^{-lambda x/2} phi.
inline ProblemSpec gauge_problem(const JunctionProblem& jp) {
    jp.validate();
    ProblemSpec sp;
    sp.domain = jp.domain;
    sp.params = map_params(jp.junction).params;
    const double lam = jp.junction.lambda;
    const double L = jp.domain.L;
    if (jp.phi0) sp.u0 = [phi0 = jp.phi0, lam](double x) { return std::exp(-0.5 * lam * x) * phi0(x); };
    if (jp.h1) sp.g1 = jp.h1;
    if (jp.h2) sp.g2 = [h2 = jp.h2, s = std::exp(-0.5 * lam * L)](double t) { return s * h2(t); };
    return sp;
}

/// Consistent phi_t(x, 0) = e^{lambda x/2} (eps u0'' - a u0) for the gauge problem.
inline std::function<double(double)> consistent_phi_velocity(const JunctionProblem& jp) {
    const ProblemSpec sp = gauge_problem(jp);
    const double lam = jp.junction.lambda;
    InitialVelocity v = consistent_initial_velocity(sp.u0, sp.params);
    return [v, lam](double x) { return std::exp(0.5 * lam * x) * v(x); };
}

struct EquivalenceConfig {
    std::vector<int> levels{101, 201, 401};  // nx per level; nt = nt_factor (nx - 1) + 1
    int nt_factor = 1;
    double stability_c = 0.2;
    bool compare_esjj = true;
};

struct EquivalenceRow {
    int nx = 0;
    int nt = 0;
    double residual = 0.0;
    double observed_order = std::numeric_limits<double>::quiet_NaN();
    double esjj_distance = std::numeric_limits<double>::quiet_NaN();
};

struct EquivalenceReport {
    std::vector<EquivalenceRow> rows;

    void write_csv(std::ostream& os) const {
        os << "grid,residual,observed_order,esjj_distance\n";
        for (const auto& r : rows)
            os << r.nx << 'x' << r.nt << ',' << fmt17(r.residual) << ',' << fmt17(r.observed_order) << ','
               << fmt17(r.esjj_distance) << '\n';
    }

    void write_csv(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path + " for writing");
        write_csv(os);
    }
};

/// Solves the gauge problem by the finite-difference integro solver at each
/// level, maps it to phi and evaluates the junction residual; optionally
/// compares with the direct junction solver on the same grid.
inline EquivalenceReport equivalence_study(const JunctionProblem& jp, const EquivalenceConfig& cfg = {},
                                           SpaceTimeField* finest_phi = nullptr) {
    const ProblemSpec sp = gauge_problem(jp);
    const auto& j = jp.junction;
    oracles::FdExtras extras;
    extras.memory_f1 = [j](double x, double, double u) { return f1_eval(u, x, j); };
    extras.memory_rate = 1.0 / j.epsilon;
    const auto phi_t0 = consistent_phi_velocity(jp);

    EquivalenceReport rep;
    for (std::size_t k = 0; k < cfg.levels.size(); ++k) {
        oracles::FdGrid grid;
        grid.nx = cfg.levels[k];
        grid.nt = cfg.nt_factor * (grid.nx - 1) + 1;
        grid.stability_c = cfg.stability_c;
        const SpaceTimeField u = oracles::fd_solve_integro(sp, grid, extras);
        const SpaceTimeField phi = gauge_forward(u, j.lambda);
        EquivalenceRow row;
        row.nx = grid.nx;
        row.nt = grid.nt;
        row.residual = residual_esjj(phi, j);
        if (k > 0) {
            const auto& prev = rep.rows.back();
            const double ratio = static_cast<double>(grid.nx - 1) / (prev.nx - 1);
            row.observed_order = std::log(prev.residual / row.residual) / std::log(ratio);
        }
        if (cfg.compare_esjj) row.esjj_distance = sup_distance(phi, oracles::fd_solve_esjj(jp, phi_t0, grid));
        rep.rows.push_back(row);
        if (finest_phi && k + 1 == cfg.levels.size()) *finest_phi = phi;
    }
    return rep;
}

}  // namespace stripgreen
