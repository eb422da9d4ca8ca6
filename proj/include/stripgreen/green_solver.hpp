#pragma once

// Explicit solution of the linear Dirichlet problem on the strip,
//
//   u(x,t) = \int_0^L G(x,xi,t) u0(xi) dxi
//          - 2 eps \int_0^t theta_x(x, t-tau) g1(tau) dtau
//          - 2 eps \int_0^t theta_x(L-x, t-tau) g2(tau) dtau
//          + \int_0^t \int_0^L G(x,xi,t-tau) f(xi,tau) dxi dtau,
//
// with G(x,xi,t) = theta(|x-xi|, t) - theta(x+xi, t) and theta_x the derivative
// of theta in its first argument. G tends to delta(x - xi) as t -> 0+.
// The Laplace-domain counterpart assembles the same terms from theta_hat.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "stripgreen/errors.hpp"
#include "stripgreen/field.hpp"
#include "stripgreen/oracles/laplace.hpp"
#include "stripgreen/problem.hpp"
#include "stripgreen/quadrature.hpp"
#include "stripgreen/theta.hpp"

namespace stripgreen {

struct GreenConfig {
    SeriesConfig series;
    QuadratureConfig kernel;  // memory integral inside theta
    double tol = 1e-8;        // relative tolerance of the xi / tau integrals
    double abs_tol = 1e-13;
    int max_intervals = 1000;

    quad::Options options() const { return {abs_tol, tol, max_intervals}; }
    quad::Options inner_options() const { return {0.1 * abs_tol, 0.1 * tol, max_intervals}; }
};

namespace detail {

/// G(x, xi, t) = theta(|x - xi|, t) - theta(x + xi, t).
inline double dirichlet_green(double x, double xi, double t, const ProblemSpec& sp, const GreenConfig& cfg) {
    return theta(std::abs(x - xi), t, sp.domain, sp.params, cfg.series, cfg.kernel) -
           theta(x + xi, t, sp.domain, sp.params, cfg.series, cfg.kernel);
}

// Break points in xi for a Green kernel of width sqrt(eps t) centred at x, plus its
// reflected images hugging the walls.
inline std::vector<double> xi_breaks(double x, double t, const ProblemSpec& sp) {
    const double L = sp.domain.L;
    const double w = std::sqrt(sp.params.epsilon * t);
    std::vector<double> br{x};
    for (double k : {1.0, 3.0, 8.0}) {
        for (double c : {x - k * w, x + k * w, k * w, L - k * w})
            if (c > 0.0 && c < L) br.push_back(c);
    }
    return br;
}

inline void check_interior(double x, double t, const ProblemSpec& sp, const char* what) {
    if (!(x > 0.0 && x < sp.domain.L)) throw DomainError(std::string(what) + ": x must lie in (0, L)");
    if (!(t > 0.0)) throw DomainError(std::string(what) + ": t must be > 0");
}

// \int_0^L G(x, xi, t) h(xi) dxi
template <class H>
double green_xi_integral(double x, double t, const ProblemSpec& sp, const GreenConfig& cfg, const quad::Options& opt,
                         H&& h, const char* what) {
    const auto br = xi_breaks(x, t, sp);
    auto integrand = [&](double xi) {
        const double hv = h(xi);
        return hv == 0.0 ? 0.0 : dirichlet_green(x, xi, t, sp, cfg) * hv;
    };
    auto r = quad::integrate<double>(integrand, 0.0, sp.domain.L, opt, br);
    if (!r.converged) throw AccuracyError(std::string(what) + ": xi quadrature did not converge", r.error);
    return r.value;
}

// \int_0^t theta_x(y, t - tau) g(tau) dtau with tau = t - w^2.
inline double boundary_convolution(double y, double t, const TimeFn& g, const ProblemSpec& sp, const GreenConfig& cfg) {
    if (!g) return 0.0;
    const double top = std::sqrt(t);
    std::vector<double> br;
    const double w0 = y / (2.0 * std::sqrt(sp.params.epsilon));
    for (double k : {0.25, 0.5, 1.0, 2.0, 4.0})
        if (k * w0 < top) br.push_back(k * w0);
    for (double tb : sp.time_breaks)
        if (tb > 0.0 && tb < t) br.push_back(std::sqrt(t - tb));
    auto integrand = [&](double w) {
        if (w <= 0.0) return 0.0;
        const double gv = g(t - w * w);
        if (gv == 0.0) return 0.0;
        return 2.0 * w * theta_dx(y, w * w, sp.domain, sp.params, cfg.series, cfg.kernel) * gv;
    };
    auto r = quad::integrate<double>(integrand, 0.0, top, cfg.options(), br);
    if (!r.converged) throw AccuracyError("boundary_term: tau quadrature did not converge", r.error);
    return r.value;
}

}  // namespace detail

/// \int_0^L G(x, xi, t) u0(xi) dxi.
inline double initial_term(double x, double t, const ProblemSpec& sp, const GreenConfig& cfg = {}) {
    detail::check_interior(x, t, sp, "initial_term");
    if (!sp.u0) return 0.0;
    return detail::green_xi_integral(x, t, sp, cfg, cfg.options(), sp.u0, "initial_term");
}

/// Boundary contributions of g1 (at x = 0) and g2 (at x = L).
inline double boundary_term(double x, double t, const ProblemSpec& sp, const GreenConfig& cfg = {}) {
    detail::check_interior(x, t, sp, "boundary_term");
    const double eps = sp.params.epsilon;
    const double left = detail::boundary_convolution(x, t, sp.g1, sp, cfg);
    const double right = detail::boundary_convolution(sp.domain.L - x, t, sp.g2, sp, cfg);
    return -2.0 * eps * left - 2.0 * eps * right;
}

/// \int_0^t \int_0^L G(x, xi, t - tau) f(xi, tau) dxi dtau; tau outer, xi inner.
inline double volume_term(double x, double t, const ProblemSpec& sp, const GreenConfig& cfg = {}) {
    detail::check_interior(x, t, sp, "volume_term");
    if (!sp.source) return 0.0;
    auto outer = [&](double lag) {
        if (lag <= 0.0) return sp.f_at(x, t);
        const double tau = t - lag;
        return detail::green_xi_integral(x, lag, sp, cfg, cfg.inner_options(),
                                         [&](double xi) { return sp.source(xi, tau); }, "volume_term");
    };
    std::vector<double> br;
    for (double tb : sp.time_breaks)
        if (tb > 0.0 && tb < t) br.push_back(t - tb);
    auto r = quad::integrate<double>(outer, 0.0, t, cfg.options(), br);
    if (!r.converged) throw AccuracyError("volume_term: tau quadrature did not converge", r.error);
    return r.value;
}

/// Green representation at one interior point.
inline double solve_linear_at(double x, double t, const ProblemSpec& sp, const GreenConfig& cfg = {}) {
    return initial_term(x, t, sp, cfg) + boundary_term(x, t, sp, cfg) + volume_term(x, t, sp, cfg);
}

/// Field on an nx-by-nt grid: interior nodes from the Green representation,
/// boundary columns from g1, g2 and the t = 0 row from u0.
inline SpaceTimeField solve_linear_dirichlet(const ProblemSpec& sp, int nx, int nt, const GreenConfig& cfg = {}) {
    sp.validate();
    sp.params.validate_kernel();
    SpaceTimeField u(nx, nt, sp.domain, "green:solve_linear_dirichlet");
    if (sp.corner_mismatch()) u.set_provenance(u.provenance() + " (corner mismatch)");
    for (int i = 0; i < nx; ++i) u(i, 0) = sp.u0_at(u.x(i));
    for (int n = 1; n < nt; ++n) {
        const double t = u.t(n);
        u(0, n) = sp.g1_at(t);
        u(nx - 1, n) = sp.g2_at(t);
        for (int i = 1; i < nx - 1; ++i) {
            try {
                u(i, n) = solve_linear_at(u.x(i), t, sp, cfg);
            } catch (const AccuracyError& e) {
                throw AccuracyError(std::string(e.what()) + " at x=" + fmt17(u.x(i)) + ", t=" + fmt17(t), e.achieved());
            }
        }
    }
    return u;
}

/// Laplace-domain solution at (x, s):
///   \int_0^L [theta_hat(|x-xi|) - theta_hat(x+xi)] (u0 + f_hat(xi, s)) dxi
///   - 2 eps g1_hat theta_hat'(x) - 2 eps g2_hat theta_hat'(L - x).
/// Data transforms are computed numerically under the envelope `data_tail`.
inline cplx resolvent_solution_hat(double x, cplx s, const ProblemSpec& sp, const GreenConfig& cfg = {},
                                   const oracles::LaplaceTail& data_tail = {}) {
    sp.validate();
    if (!(x >= 0.0 && x <= sp.domain.L)) throw DomainError("resolvent_solution_hat: x must lie in [0, L]");
    const cplx sg = sigma(s, sp.params);
    const double eps = sp.params.epsilon;
    const double L = sp.domain.L;

    oracles::LaplaceOptions lo;
    lo.tol = 0.1 * cfg.tol;
    auto transform = [&](const std::function<double(double)>& g) -> cplx {
        auto r = oracles::numerical_laplace(g, s, data_tail, lo);
        if (r.inconclusive) throw AccuracyError("resolvent_solution_hat: data transform inconclusive", r.tail_bound);
        return r.value;
    };

    auto kernel_hat = [&](double xi) {
        return theta_hat(std::abs(x - xi), sg, sp.domain, sp.params) - theta_hat(x + xi, sg, sp.domain, sp.params);
    };
    auto density = [&](double xi) -> cplx {
        cplx v = sp.u0_at(xi);
        if (sp.source) v += transform([&](double t) { return sp.source(xi, t); });
        return v;
    };
    const std::vector<double> br{x};
    auto vol = quad::integrate<cplx>([&](double xi) { return kernel_hat(xi) * density(xi); }, 0.0, L, cfg.options(), br);
    if (!vol.converged) throw AccuracyError("resolvent_solution_hat: xi quadrature did not converge", vol.error);

    cplx out = vol.value;
    if (sp.g1) out -= 2.0 * eps * transform(sp.g1) * theta_hat_dy(x, sg, sp.domain, sp.params);
    if (sp.g2) out -= 2.0 * eps * transform(sp.g2) * theta_hat_dy(L - x, sg, sp.domain, sp.params);
    return out;
}

struct DecayReport {
    std::vector<double> times;
    std::vector<double> sup_values;
    double rate = std::numeric_limits<double>::quiet_NaN();
    bool rate_defined = false;
    int fit_points = 0;
};

/// Least-squares exponential rate of (t, v) samples: -slope of log v against t.
/// Non-positive values are skipped; fewer than two usable samples leave the rate undefined.
inline void fit_decay_rate(DecayReport& rep, double t_from) {
    double st = 0, sl = 0, stt = 0, stl = 0;
    int n = 0;
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        if (rep.times[k] < t_from || !(rep.sup_values[k] > 0.0)) continue;
        const double t = rep.times[k], l = std::log(rep.sup_values[k]);
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
        ++n;
    }
    rep.fit_points = n;
    const double den = n * stt - st * st;
    if (n < 2 || den <= 0.0) {
        rep.rate_defined = false;
        rep.rate = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    rep.rate = -(n * stl - st * sl) / den;
    rep.rate_defined = true;
}

/// sup over interior sample points of |boundary_term(., t)| at log-spaced times in
/// [horizon/100, horizon]; rate fitted over the last decade [horizon/10, horizon].
/// Intended for g1 a compact pulse and u0 = g2 = f = 0.
inline DecayReport decay_study(const ProblemSpec& sp, double horizon, const GreenConfig& cfg = {}, int samples = 25,
                               int x_points = 19) {
    sp.validate();
    if (!(horizon > 0.0)) throw DomainError("decay_study: horizon must be > 0");
    if (sp.u0 || sp.source) throw DomainError("decay_study: expects zero initial datum and source");
    DecayReport rep;
    const double t_first = horizon / 100.0;
    for (int k = 0; k < samples; ++k) {
        const double t = t_first * std::pow(100.0, static_cast<double>(k) / (samples - 1));
        double sup = 0.0;
        for (int i = 1; i <= x_points; ++i) {
            const double x = sp.domain.L * i / (x_points + 1);
            sup = std::max(sup, std::abs(boundary_term(x, t, sp, cfg)));
        }
        rep.times.push_back(t);
        rep.sup_values.push_back(sup);
    }
    fit_decay_rate(rep, horizon / 10.0 * (1.0 - 1e-12));
    return rep;
}

}  // namespace stripgreen
