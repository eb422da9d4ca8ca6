#pragma once

#include <cmath>

#include "stripgreen/kernel.hpp"

namespace stripgreen::oracles {

/// Amplitude T(t) of the Dirichlet mode sin(sqrt(mu) x) under the
/// integro-differential operator with zero boundary data and source:
///   T'' + (beta + c) T' + (b + beta c) T = 0,  T(0) = 1,  T'(0) = -c,  c = eps mu + a.
/// Written as e^{pt} [C(t) + (-c - p) S(t)] with p = -(beta + c)/2, which covers
/// distinct real, double and complex roots without cancellation near the double root.
inline double eigenmode_ode_solution(double mu, const OperatorParams& p, double t) {
    const double c = p.epsilon * mu + p.a;
    const double half_trace = -0.5 * (p.beta + c);
    const double disc = (p.beta - c) * (p.beta - c) - 4.0 * p.b;  // (beta + c)^2 - 4 (b + beta c)
    const double delta = 0.5 * std::sqrt(std::abs(disc));
    double C, S;
    if (delta * t < 1e-8) {
        // series in delta^2 t^2; sign follows the discriminant
        const double d2 = (disc >= 0 ? 1.0 : -1.0) * delta * delta * t * t;
        C = 1.0 + d2 / 2.0;
        S = t * (1.0 + d2 / 6.0);
    } else if (disc > 0.0) {
        C = std::cosh(delta * t);
        S = std::sinh(delta * t) / delta;
    } else {
        C = std::cos(delta * t);
        S = std::sin(delta * t) / delta;
    }
    return std::exp(half_trace * t) * (C + (-c - half_trace) * S);
}

/// Spatial eigenvalue (k pi / L)^2 of the k-th Dirichlet mode.
inline double dirichlet_eigenvalue(int k, double L) {
    const double w = k * 3.14159265358979323846 / L;
    return w * w;
}

}  // namespace stripgreen::oracles
