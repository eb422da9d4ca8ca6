#pragma once

// Method-of-images function on the strip 0 <= x <= L:
//
//   theta(x, t) = sum_{n in Z} K(x + 2nL, t)
//
// and its Laplace-domain counterpart
//
//   theta_hat(y, sigma) = cosh(sigma (L - y)/sqrt(eps)) / (2 sqrt(eps) sigma sinh(sigma L/sqrt(eps))).
//
// theta() folds the image sum inside the memory integral of K (one quadrature
// over y per call, Gaussian image sums in the integrand). theta_image_sum()
// is the literal term-by-term sum of kernel_K, kept as a reference.

#include <cmath>
#include <complex>
#include <string>

#include "stripgreen/errors.hpp"
#include "stripgreen/kernel.hpp"

namespace stripgreen {

struct StripDomain {
    double L = 1.0;
    double T = 1.0;

    void validate() const {
        if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("StripDomain: L must be > 0");
        if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("StripDomain: T must be > 0");
    }
};

/// Truncation policy for the image sum: stop after settle_count consecutive
/// image pairs whose contribution is below tol.
struct SeriesConfig {
    double tol = 1e-14;
    int max_terms = 2000;
    int settle_count = 3;

    void validate() const {
        if (!(tol > 0.0)) throw DomainError("SeriesConfig: tol must be > 0");
        if (max_terms < 1) throw DomainError("SeriesConfig: max_terms must be >= 1");
        if (settle_count < 2) throw DomainError("SeriesConfig: settle_count must be >= 2");
    }
};

namespace detail {

/// Representative of x modulo 2L in [-L, L]; an index shift of the bilateral sum.
inline double reduce_periodic(double x, double L) { return x - 2.0 * L * std::round(x / (2.0 * L)); }

// sum_n e^{-(x+2nL)^2/(4 eps y)} (derivative = false) or
// sum_n -(x+2nL)/(2 eps y) e^{-(x+2nL)^2/(4 eps y)} (derivative = true), x already reduced.
inline double gaussian_images(double x, double y, double L, double eps, bool derivative, const SeriesConfig& cfg) {
    const double inv = 1.0 / (4.0 * eps * y);
    const double scale = 1.0 / std::sqrt(4.0 * std::numbers::pi * eps * y);
    auto term = [&](double z) {
        const double g = std::exp(-z * z * inv);
        return derivative ? -z / (2.0 * eps * y) * g : g;
    };
    double sum = term(x);
    int quiet = 0;
    for (int k = 1; k <= cfg.max_terms; ++k) {
        const double up = term(x + 2.0 * k * L);
        const double down = term(x - 2.0 * k * L);
        sum += up + down;
        const double mag = scale * (std::abs(up) + std::abs(down));
        quiet = (mag < cfg.tol) ? quiet + 1 : 0;
        if (quiet >= cfg.settle_count) return sum;
    }
    throw AccuracyError("theta: image sum did not settle within max_terms", scale * std::abs(term(x + 2.0 * cfg.max_terms * L)));
}

inline double theta_folded(double x, double t, const StripDomain& d, const OperatorParams& p,
                           const SeriesConfig& cfg, const QuadratureConfig& q, bool derivative) {
    p.validate_kernel();
    cfg.validate();
    if (!(t > 0.0)) throw DomainError("theta: t must be > 0");
    const double x0 = reduce_periodic(x, d.L);
    const double pref = kernel_prefactor(p);
    const double lead = std::exp(-p.a * t) / std::sqrt(t) * gaussian_images(x0, t, d.L, p.epsilon, derivative, cfg);
    const double r_hint = std::abs(x0) / std::sqrt(p.epsilon);
    const double mem = memory_integral(
        [&](double y) { return gaussian_images(x0, y, d.L, p.epsilon, derivative, cfg); }, t, r_hint, p, q);
    return pref * (lead - memory_coefficient(p, q.form) * mem);
}

template <class Term>
double image_sum(double x, double L, const SeriesConfig& cfg, Term&& term) {
    cfg.validate();
    const double x0 = reduce_periodic(x, L);
    double sum = term(x0);
    int quiet = 0;
    for (int k = 1; k <= cfg.max_terms; ++k) {
        const double up = term(x0 + 2.0 * k * L);
        const double down = term(x0 - 2.0 * k * L);
        sum += up + down;
        quiet = (std::abs(up) + std::abs(down) < cfg.tol) ? quiet + 1 : 0;
        if (quiet >= cfg.settle_count) return sum;
    }
    throw AccuracyError("theta_image_sum: series did not settle within max_terms", std::abs(term(x0 + 2.0 * cfg.max_terms * L)));
}

}  // namespace detail

/// theta(x, t); even in x and 2L-periodic.
inline double theta(double x, double t, const StripDomain& d, const OperatorParams& p, const SeriesConfig& cfg = {},
                    const QuadratureConfig& q = {}) {
    return detail::theta_folded(x, t, d, p, cfg, q, false);
}

/// d theta / dx at (x, t); odd in x.
inline double theta_dx(double x, double t, const StripDomain& d, const OperatorParams& p, const SeriesConfig& cfg = {},
                       const QuadratureConfig& q = {}) {
    return detail::theta_folded(x, t, d, p, cfg, q, true);
}

/// Literal image sum of kernel_K.
inline double theta_image_sum(double x, double t, const StripDomain& d, const OperatorParams& p,
                              const SeriesConfig& cfg = {}, const QuadratureConfig& q = {}) {
    if (!(t > 0.0)) throw DomainError("theta: t must be > 0");
    return detail::image_sum(x, d.L, cfg, [&](double z) { return kernel_K(z, t, p, q); });
}

inline double theta_dx_image_sum(double x, double t, const StripDomain& d, const OperatorParams& p,
                                 const SeriesConfig& cfg = {}, const QuadratureConfig& q = {}) {
    if (!(t > 0.0)) throw DomainError("theta: t must be > 0");
    return detail::image_sum(x, d.L, cfg, [&](double z) { return kernel_K_dx(z, t, p, q); });
}

namespace detail {
inline constexpr double kHyperbolicSwitch = 30.0;
}

/// Closed hyperbolic form of theta_hat; valid for y in [0, 2L].
inline cplx theta_hat(double y, cplx sigma_val, const StripDomain& d, const OperatorParams& p) {
    if (!(sigma_val.real() > 0.0)) throw DomainError("theta_hat: Re(sigma) must be > 0");
    const double se = std::sqrt(p.epsilon);
    const cplx k = sigma_val / se;
    const cplx denom = 2.0 * se * sigma_val;
    if ((k * d.L).real() > detail::kHyperbolicSwitch) {
        const cplx num = std::exp(-k * y) + std::exp(-k * (2.0 * d.L - y));
        return num / (denom * (1.0 - std::exp(-2.0 * k * d.L)));
    }
    return std::cosh(k * (d.L - y)) / (denom * std::sinh(k * d.L));
}

/// theta_hat as the image sum of e^{-sigma |y + 2nL|/sqrt(eps)} / (2 sqrt(eps) sigma).
inline cplx theta_hat_series(double y, cplx sigma_val, const StripDomain& d, const OperatorParams& p,
                             const SeriesConfig& cfg = {}) {
    if (!(sigma_val.real() > 0.0)) throw DomainError("theta_hat_series: Re(sigma) must be > 0");
    cfg.validate();
    const double se = std::sqrt(p.epsilon);
    const cplx k = sigma_val / se;
    const cplx denom = 2.0 * se * sigma_val;
    cplx sum = std::exp(-k * std::abs(y)) / denom;
    int quiet = 0;
    for (int n = 1; n <= cfg.max_terms; ++n) {
        const cplx up = std::exp(-k * std::abs(y + 2.0 * n * d.L)) / denom;
        const cplx down = std::exp(-k * std::abs(y - 2.0 * n * d.L)) / denom;
        sum += up + down;
        quiet = (std::abs(up) + std::abs(down) < cfg.tol * std::abs(sum)) ? quiet + 1 : 0;
        if (quiet >= cfg.settle_count) return sum;
    }
    throw AccuracyError("theta_hat_series: series did not settle within max_terms", std::abs(sum));
}

/// d theta_hat / dy = -sinh(sigma (L - y)/sqrt(eps)) / (2 eps sinh(sigma L/sqrt(eps))).
inline cplx theta_hat_dy(double y, cplx sigma_val, const StripDomain& d, const OperatorParams& p) {
    if (!(sigma_val.real() > 0.0)) throw DomainError("theta_hat_dy: Re(sigma) must be > 0");
    const cplx k = sigma_val / std::sqrt(p.epsilon);
    if ((k * d.L).real() > detail::kHyperbolicSwitch) {
        const cplx num = std::exp(-k * y) - std::exp(-k * (2.0 * d.L - y));
        return -num / (2.0 * p.epsilon * (1.0 - std::exp(-2.0 * k * d.L)));
    }
    return -std::sinh(k * (d.L - y)) / (2.0 * p.epsilon * std::sinh(k * d.L));
}

}  // namespace stripgreen
