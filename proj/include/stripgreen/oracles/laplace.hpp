#pragma once

// Numerical Laplace transform (truncated adaptive quadrature with an explicit
// exponential tail bound) and fixed-Talbot contour inversion. Both are used as
// independent references for closed-form transforms.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "stripgreen/errors.hpp"
#include "stripgreen/quadrature.hpp"

namespace stripgreen::oracles {

using cplx = std::complex<double>;

/// Envelope |f(t)| <= constant * (1 + t)^power * exp(-rate * t), for t >= 1.
struct LaplaceTail {
    double rate = 0.0;
    double constant = 1.0;
    double power = 0.0;
};

struct LaplaceOptions {
    double tol = 1e-10;      // relative target for the truncated integral
    double abs_tol = 1e-14;
    double t_max = 0.0;      // 0 selects the horizon from the tail rule
    int max_intervals = 2000;
};

struct LaplaceResult {
    cplx value;
    double quadrature_error = 0.0;
    double tail_bound = 0.0;
    double t_max = 0.0;
    bool inconclusive = false;
};

/// Bound on \int_T^inf |e^{-st} f(t)| dt under the envelope.
inline double laplace_tail_bound(const LaplaceTail& tail, double re_s, double horizon) {
    const double c = re_s + tail.rate;
    const double denom = c - tail.power / (1.0 + horizon);
    if (c <= 0.0 || denom <= 0.0) return HUGE_VAL;
    return tail.constant * std::pow(1.0 + horizon, tail.power) * std::exp(-c * horizon) / denom;
}

/// \int_0^{T_max} e^{-st} f(t) dt with T_max from the tail rule (tail <= 0.1 tol * scale).
/// The substitution t = u^2 absorbs integrable t^{-1/2} behaviour at the origin.
inline LaplaceResult numerical_laplace(const std::function<double(double)>& f, cplx s,
                                       const LaplaceTail& tail, const LaplaceOptions& opt = {}) {
    LaplaceResult out;
    const double re = s.real();
    if (re + tail.rate <= 0.0) throw DomainError("numerical_laplace: s outside the convergence half-plane");

    auto integrand = [&](double u) -> cplx {
        const double t = u * u;
        return 2.0 * u * std::exp(-s * t) * f(t);
    };

    double horizon = opt.t_max;
    if (horizon <= 0.0) {
        // Coarse value to scale the relative tail target, then extend until the tail is negligible.
        const double c = re + tail.rate;
        horizon = std::max(1.0, 10.0 / c);
        const auto probe = quad::integrate<cplx>(integrand, 0.0, std::sqrt(horizon),
                                                 {opt.abs_tol, 1e-4, opt.max_intervals});
        const double target = 0.1 * std::max(opt.abs_tol, opt.tol * std::abs(probe.value));
        while (laplace_tail_bound(tail, re, horizon) > target && horizon < 1e4) horizon *= 1.25;
    }
    out.t_max = horizon;
    auto r = quad::integrate<cplx>(integrand, 0.0, std::sqrt(horizon),
                                   {opt.abs_tol, opt.tol, opt.max_intervals});
    out.value = r.value;
    out.quadrature_error = r.error;
    out.tail_bound = laplace_tail_bound(tail, re, horizon);
    const double scale = std::max(opt.abs_tol, opt.tol * std::abs(r.value));
    out.inconclusive = !r.converged || out.tail_bound > scale;
    return out;
}

struct InversionResult {
    double value = 0.0;
    double error_estimate = 0.0;  // |f_N - f_2N|
};

namespace detail {

// Fixed Talbot contour with Weideman's cotangent parameters; midpoint rule in theta.
inline double talbot_sum(const std::function<cplx(cplx)>& transform, double t, int n) {
    const double scale = n / t;
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double theta = -std::numbers::pi + (k + 0.5) * (2.0 * std::numbers::pi / n);
        const double a = 0.6407 * theta;
        const double cot = std::cos(a) / std::sin(a);
        const double sn = std::sin(a);
        const cplx s = scale * cplx(0.5017 * theta * cot - 0.6122, 0.2645 * theta);
        const cplx ds = scale * cplx(0.5017 * cot - 0.5017 * a / (sn * sn), 0.2645);
        acc += std::exp(s * t) * transform(s) * ds;
    }
    return (acc / cplx(0.0, static_cast<double>(n))).real();
}

}  // namespace detail

/// Inverse Laplace transform of a real-valued original at time t > 0.
/// Throws AccuracyError when the node_count and 2*node_count results differ by more than tol.
inline InversionResult laplace_invert_contour(const std::function<cplx(cplx)>& transform, double t,
                                              int node_count = 32, double tol = 1e-6) {
    if (!(t > 0.0)) throw DomainError("laplace_invert_contour: t must be positive");
    InversionResult out;
    const double coarse = detail::talbot_sum(transform, t, node_count);
    out.value = detail::talbot_sum(transform, t, 2 * node_count);
    out.error_estimate = std::abs(out.value - coarse);
    if (out.error_estimate > tol * std::max(1.0, std::abs(out.value)))
        throw AccuracyError("laplace_invert_contour: node doubling disagreement", out.error_estimate);
    return out;
}

}  // namespace stripgreen::oracles
