#pragma once

// Exponentially shaped Josephson junction:
//   eps phi_xxt + phi_xx - phi_tt - eps lambda phi_xt - lambda phi_x - alpha phi_t = sin(phi) - gamma
// and its parameter map onto the integro-differential operator after the
// gauge phi = e^{lambda x/2} u.

#include <cmath>
#include <functional>

#include "stripgreen/errors.hpp"
#include "stripgreen/kernel.hpp"
#include "stripgreen/theta.hpp"

namespace stripgreen {

struct JunctionParams {
    double epsilon = 1.0;  // surface damping
    double alpha = 0.0;    // dissipation
    double lambda = 0.0;   // tapering rate
    double gamma = 0.0;    // bias current

    void validate() const {
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("JunctionParams: epsilon must be > 0");
        if (!std::isfinite(alpha) || !std::isfinite(lambda) || !std::isfinite(gamma))
            throw DomainError("JunctionParams: alpha, lambda, gamma must be finite");
    }
};

struct MappedParams {
    OperatorParams params;
    bool kernel_admissible = false;  // a >= 0 and b >= 0: kernel path usable
};

/// a = alpha + eps lambda^2/4 - 1/eps,  b = lambda^2/4 - a/eps,  beta = 1/eps.
inline MappedParams map_params(const JunctionParams& j) {
    j.validate();
    MappedParams m;
    m.params.epsilon = j.epsilon;
    m.params.a = j.alpha + j.epsilon * j.lambda * j.lambda / 4.0 - 1.0 / j.epsilon;
    m.params.b = j.lambda * j.lambda / 4.0 - m.params.a / j.epsilon;
    m.params.beta = 1.0 / j.epsilon;
    m.kernel_admissible = m.params.kernel_admissible();
    return m;
}

/// f1 = e^{-lambda x/2} [sin(e^{lambda x/2} u) - gamma].
inline double f1_eval(double u_bar, double x, const JunctionParams& j) {
    const double g = std::exp(0.5 * j.lambda * x);
    return (std::sin(g * u_bar) - j.gamma) / g;
}

/// Junction problem for phi on [0, L] x [0, T] with Dirichlet data h1, h2.
/// Optional derivative callables are used when present; otherwise derivatives
/// are taken by 4th-order central differences.
struct JunctionProblem {
    StripDomain domain;
    JunctionParams junction;
    std::function<double(double)> phi0;
    std::function<double(double)> phi0_xx;
    std::function<double(double)> h1;
    std::function<double(double)> h2;
    std::function<double(double)> h1_t;
    std::function<double(double)> h2_t;

    double phi0_at(double x) const { return phi0 ? phi0(x) : 0.0; }
    double h1_at(double t) const { return h1 ? h1(t) : 0.0; }
    double h2_at(double t) const { return h2 ? h2(t) : 0.0; }

    void validate() const {
        domain.validate();
        junction.validate();
    }
};

namespace detail {

/// 4th-order central first derivative.
inline double d1_central4(const std::function<double(double)>& f, double x, double h) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

/// 4th-order central second derivative.
inline double d2_central4(const std::function<double(double)>& f, double x, double h) {
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
}

}  // namespace detail

}  // namespace stripgreen
