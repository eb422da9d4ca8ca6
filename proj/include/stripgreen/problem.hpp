#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "stripgreen/kernel.hpp"
#include "stripgreen/theta.hpp"

namespace stripgreen {

using SpaceFn = std::function<double(double)>;
using TimeFn = std::function<double(double)>;
using SourceFn = std::function<double(double, double)>;

/// Linear Dirichlet problem on the strip:
///   L u = f(x, t),  u(x, 0) = u0(x),  u(0, t) = g1(t),  u(L, t) = g2(t).
/// Empty callables stand for identically zero data.
struct ProblemSpec {
    StripDomain domain;
    OperatorParams params;
    SpaceFn u0;
    TimeFn g1;
    TimeFn g2;
    SourceFn source;
    /// Times where g1, g2 or f have kinks or support ends; used as quadrature break hints.
    std::vector<double> time_breaks;

    double u0_at(double x) const { return u0 ? u0(x) : 0.0; }
    double g1_at(double t) const { return g1 ? g1(t) : 0.0; }
    double g2_at(double t) const { return g2 ? g2(t) : 0.0; }
    double f_at(double x, double t) const { return source ? source(x, t) : 0.0; }

    void validate() const {
        domain.validate();
        params.validate_basic();
    }

    /// True when u0 disagrees with the boundary data at a corner (allowed, but
    /// boundary/initial attainment cannot hold uniformly there).
    bool corner_mismatch(double tol = 1e-12) const {
        const double t0 = 1e-12 * domain.T;
        return std::abs(u0_at(0.0) - g1_at(t0)) > tol || std::abs(u0_at(domain.L) - g2_at(t0)) > tol;
    }
};

}  // namespace stripgreen
