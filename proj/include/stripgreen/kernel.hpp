#pragma once

// Fundamental solution of
//     u_t - eps u_xx + a u + b \int_0^t e^{-beta (t - tau)} u(x, tau) dtau = F
// on the whole line:
//
//   K(r, t) = 1/(2 sqrt(pi eps)) [ e^{-r^2/4t - a t} / sqrt(t)
//             - c_b \int_0^t e^{-r^2/4y - a y} e^{-beta (t-y)} J1(2 sqrt(b y (t-y))) / sqrt(t-y) dy ],
//   r = |x| / sqrt(eps),
//
// whose Laplace transform in t is e^{-r sigma} / (2 sqrt(eps) sigma) with
// sigma^2 = s + a + b / (s + beta). The transform pins c_b = sqrt(b); the
// alternative memory forms are kept selectable so the transform check can
// discriminate between them.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "stripgreen/errors.hpp"
#include "stripgreen/oracles/laplace.hpp"
#include "stripgreen/quadrature.hpp"
#include "stripgreen/special_functions.hpp"

namespace stripgreen {

using cplx = std::complex<double>;

struct OperatorParams {
    double epsilon = 1.0;
    double a = 0.0;
    double b = 0.0;
    double beta = 1.0;

    /// epsilon > 0 and beta > 0; required by every path.
    void validate_basic() const {
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("OperatorParams: epsilon must be > 0");
        if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("OperatorParams: beta must be > 0");
        if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("OperatorParams: a, b must be finite");
    }

    /// Direct kernel evaluation additionally needs a >= 0 and b >= 0.
    bool kernel_admissible() const { return epsilon > 0.0 && beta > 0.0 && a >= 0.0 && b >= 0.0; }

    void validate_kernel() const {
        validate_basic();
        if (!kernel_admissible())
            throw DomainError("OperatorParams: kernel path requires a >= 0 and b >= 0 (use the finite-difference route)");
    }
};

/// Which memory integrand is used inside K.
enum class KernelForm {
    consistent,  // sqrt(b) * ... / sqrt(t - y): the form whose transform is e^{-r sigma}/(2 sqrt(eps) sigma)
    printed,     // b * ... / sqrt(t - y)
    sqrt_y,      // b * ... / sqrt(y)
};

inline const char* to_string(KernelForm f) {
    switch (f) {
        case KernelForm::consistent: return "consistent";
        case KernelForm::printed: return "printed";
        case KernelForm::sqrt_y: return "sqrt_y";
    }
    return "?";
}

struct QuadratureConfig {
    double tol = 1e-10;      // relative
    double abs_tol = 1e-15;
    int max_intervals = 400;
    KernelForm form = KernelForm::consistent;

    quad::Options options() const { return {abs_tol, tol, max_intervals}; }
};

/// Lower bound of the half-plane where the transform of K converges absolutely.
inline double laplace_abscissa(const OperatorParams& p) { return std::max(-p.a, -p.beta); }

/// Principal root of s + a + b/(s + beta); Re(result) >= 0.
inline cplx sigma(cplx s, const OperatorParams& p) {
    if (s == cplx(-p.beta, 0.0)) throw DomainError("sigma: pole at s = -beta");
    if (!(s.real() > laplace_abscissa(p))) throw DomainError("sigma: Re(s) must exceed max(-a, -beta)");
    return std::sqrt(s + p.a + p.b / (s + p.beta));
}

/// e^{-r sigma} / (2 sqrt(eps) sigma), r = |x|/sqrt(eps) >= 0.
inline cplx kernel_laplace_closed(double r, cplx s, const OperatorParams& p) {
    if (r < 0.0) throw DomainError("kernel_laplace_closed: r must be >= 0");
    const cplx sg = sigma(s, p);
    return std::exp(-r * sg) / (2.0 * std::sqrt(p.epsilon) * sg);
}

/// Analytic continuation of kernel_laplace_closed off the half-plane (principal
/// branch), for contour inversion. Only the pole at s = -beta is rejected.
inline cplx kernel_laplace_continued(double r, cplx s, const OperatorParams& p) {
    if (s == cplx(-p.beta, 0.0)) throw DomainError("kernel_laplace_continued: pole at s = -beta");
    const cplx sg = std::sqrt(s + p.a + p.b / (s + p.beta));
    return std::exp(-r * sg) / (2.0 * std::sqrt(p.epsilon) * sg);
}

namespace detail {

inline double memory_coefficient(const OperatorParams& p, KernelForm form) {
    return form == KernelForm::consistent ? std::sqrt(p.b) : p.b;
}

// \int_0^t g(y) e^{-a y - beta (t-y)} J1(2 sqrt(b y (t-y))) w(y) dy with
// w = 1/sqrt(t-y) (or 1/sqrt(y) for the sqrt_y form). The spatial factor g
// carries the Gaussian e^{-r^2/4y} (or an image sum of them) and vanishes at y = 0.
// y = v^2 on [0, t/2] and y = t - w^2 on [t/2, t], joined into one variable;
// r_hint is the scaled distance at which g switches on (breaks near v ~ r/2).
template <class Spatial>
double memory_integral(Spatial&& g, double t, double r_hint, const OperatorParams& p, const QuadratureConfig& q) {
    if (p.b == 0.0) return 0.0;
    const double m = std::sqrt(0.5 * t);
    const bool weight_at_zero = q.form == KernelForm::sqrt_y;
    auto core = [&](double y) {
        if (y <= 0.0) return 0.0;
        const double sp = g(y);
        if (sp == 0.0) return 0.0;
        const double e = std::exp(-p.a * y - p.beta * (t - y));
        return sp * e * bessel_j1(2.0 * std::sqrt(p.b * y * std::max(t - y, 0.0)));
    };
    auto integrand = [&](double u) {
        if (u <= m) {
            const double y = u * u;  // dy = 2u du
            if (u == 0.0) return 0.0;
            const double w = weight_at_zero ? 1.0 / u : 1.0 / std::sqrt(t - y);
            return 2.0 * u * w * core(y);
        }
        const double v = 2.0 * m - u;  // y = t - v^2, dy = 2v du
        const double y = t - v * v;
        if (v <= 0.0) return weight_at_zero ? 0.0 : 2.0 * core(y);
        const double w = weight_at_zero ? 1.0 / std::sqrt(y) : 1.0 / v;
        return 2.0 * v * w * core(y);
    };
    std::array<double, 5> breaks{m, 0.0, 0.0, 0.0, 0.0};
    std::size_t nb = 1;
    for (double f : {0.25, 0.5, 1.0, 2.0}) {
        const double c = f * r_hint;
        if (c > 0.0 && c < m) breaks[nb++] = c;
    }
    auto res = quad::integrate<double>(integrand, 0.0, 2.0 * m, q.options(),
                                       std::span<const double>(breaks.data(), nb));
    if (!res.converged) throw AccuracyError("kernel memory integral did not converge", res.error);
    return res.value;
}

inline double kernel_prefactor(const OperatorParams& p) {
    return 1.0 / (2.0 * std::sqrt(std::numbers::pi * p.epsilon));
}

}  // namespace detail

/// K(x, t) for signed x.
inline double kernel_K(double x, double t, const OperatorParams& p, const QuadratureConfig& q = {}) {
    p.validate_kernel();
    if (!(t > 0.0)) throw DomainError("kernel_K: t must be > 0");
    const double r2 = x * x / p.epsilon;
    const double pref = detail::kernel_prefactor(p);
    const double lead = std::exp(-r2 / (4.0 * t) - p.a * t) / std::sqrt(t);
    const double mem = detail::memory_integral([&](double y) { return std::exp(-r2 / (4.0 * y)); }, t,
                                               std::sqrt(r2), p, q);
    return pref * (lead - detail::memory_coefficient(p, q.form) * mem);
}

/// dK/dx, differentiated under the integral sign. Zero at x = 0 (K is even and smooth there).
inline double kernel_K_dx(double x, double t, const OperatorParams& p, const QuadratureConfig& q = {}) {
    p.validate_kernel();
    if (!(t > 0.0)) throw DomainError("kernel_K_dx: t must be > 0");
    if (x == 0.0) return 0.0;
    const double r2 = x * x / p.epsilon;
    const double pref = detail::kernel_prefactor(p);
    const double lead = -std::exp(-r2 / (4.0 * t) - p.a * t) / (2.0 * t * std::sqrt(t));
    const double mem = detail::memory_integral([&](double y) { return std::exp(-r2 / (4.0 * y)) / (2.0 * y); }, t,
                                               std::sqrt(r2), p, q);
    return (x / p.epsilon) * pref * (lead + detail::memory_coefficient(p, q.form) * mem);
}

struct ValidationRow {
    double r = 0.0;
    double s = 0.0;
    double closed = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
    bool inconclusive = false;
};

struct ValidationReport {
    std::vector<ValidationRow> rows;

    double max_rel_err() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.rel_err);
        return m;
    }
    bool any_inconclusive() const {
        return std::any_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.inconclusive; });
    }
};

/// Envelope of |K(r, t)| for t >= 1: (1 + 1.2 sqrt(b) (1+t)^{1/2}) e^{-min(a,beta) t} / (2 sqrt(pi eps)),
/// from |J1| <= 0.6, e^{-r^2/4y} <= 1 and \int_0^t (t-y)^{-1/2} dy = 2 sqrt(t).
inline oracles::LaplaceTail kernel_tail(const OperatorParams& p, KernelForm form = KernelForm::consistent) {
    const double coef = detail::memory_coefficient(p, form);
    return {std::min(p.a, p.beta), (1.0 + 1.2 * coef) / (2.0 * std::sqrt(std::numbers::pi * p.epsilon)), 0.5};
}

/// Numerical transform of K(r, .) against the closed form at every (r, s) pair.
inline ValidationReport validate_kernel_laplace(std::span<const double> r_set, std::span<const double> s_set,
                                                const OperatorParams& p, const QuadratureConfig& q = {},
                                                double tol = 1e-10) {
    p.validate_kernel();
    ValidationReport rep;
    for (double s : s_set) {
        if (s < laplace_abscissa(p) + 0.5)
            throw DomainError("validate_kernel_laplace: s must exceed the abscissa by at least 0.5");
    }
    for (double r : r_set) {
        const double x = r * std::sqrt(p.epsilon);
        auto f = [&](double t) { return t > 0.0 ? kernel_K(x, t, p, q) : 0.0; };
        for (double s : s_set) {
            oracles::LaplaceOptions lo;
            lo.tol = tol;
            const auto num = oracles::numerical_laplace(f, cplx(s, 0.0), kernel_tail(p, q.form), lo);
            const double closed = kernel_laplace_closed(r, cplx(s, 0.0), p).real();
            const double numeric = num.value.real();
            rep.rows.push_back({r, s, closed, numeric, std::abs(numeric - closed) / std::abs(closed), num.inconclusive});
        }
    }
    return rep;
}

}  // namespace stripgreen
