#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature with a global error heap, plus
// fixed Gauss-Legendre rules. Integrands may return double, std::complex<double>
// or std::array<double, N>; the latter lets several moments share one set of
// (expensive) kernel evaluations.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "stripgreen/errors.hpp"

namespace stripgreen::quad {

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_intervals = 2000;
};

template <class V>
struct Result {
    V value{};
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

inline double norm(double v) { return std::abs(v); }
inline double norm(const std::complex<double>& v) { return std::abs(v); }
template <std::size_t N>
double norm(const std::array<double, N>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline void axpy(double& acc, double w, double v) { acc += w * v; }
inline void axpy(std::complex<double>& acc, double w, const std::complex<double>& v) { acc += w * v; }
template <std::size_t N>
void axpy(std::array<double, N>& acc, double w, const std::array<double, N>& v) {
    for (std::size_t i = 0; i < N; ++i) acc[i] += w * v[i];
}

template <class V>
V zero() {
    if constexpr (std::is_same_v<V, double> || std::is_same_v<V, std::complex<double>>) {
        return V(0.0);
    } else {
        V z{};
        return z;
    }
}

inline double diff(double x, double y) { return x - y; }
inline std::complex<double> diff(const std::complex<double>& x, const std::complex<double>& y) { return x - y; }
template <std::size_t N>
std::array<double, N> diff(const std::array<double, N>& x, const std::array<double, N>& y) {
    std::array<double, N> d;
    for (std::size_t i = 0; i < N; ++i) d[i] = x[i] - y[i];
    return d;
}

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Segment {
    double a, b;
    V value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// One 15-point Kronrod panel; error estimate follows the QUADPACK qk15 heuristic.
template <class V, class F>
Segment<V> kronrod15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<V, 15> fv;
    fv[7] = f(centre);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        fv[j] = f(centre - dx);
        fv[14 - j] = f(centre + dx);
    }

    V kron = zero<V>();
    V gauss = zero<V>();
    axpy(kron, kWgk[7], fv[7]);
    axpy(gauss, kWg[3], fv[7]);
    for (int j = 0; j < 7; ++j) {
        const double w = kWgk[j];
        axpy(kron, w, fv[j]);
        axpy(kron, w, fv[14 - j]);
        if (j % 2 == 1) {
            axpy(gauss, kWg[j / 2], fv[j]);
            axpy(gauss, kWg[j / 2], fv[14 - j]);
        }
    }

    V mean = zero<V>();
    axpy(mean, 0.5, kron);
    double resasc = kWgk[7] * norm(diff(fv[7], mean));
    double resabs = kWgk[7] * norm(fv[7]);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (norm(diff(fv[j], mean)) + norm(diff(fv[14 - j], mean)));
        resabs += kWgk[j] * (norm(fv[j]) + norm(fv[14 - j]));
    }
    resasc *= std::abs(half);
    resabs *= std::abs(half);

    V value = zero<V>();
    axpy(value, half, kron);
    V gscaled = zero<V>();
    axpy(gscaled, half, gauss);
    double err = norm(diff(value, gscaled));
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, value, err};
}

}  // namespace detail

/// Adaptive integral of f over [a, b]. Optional interior break points are
/// used as initial panel boundaries (kinks, narrow peaks). Never throws on
/// non-convergence; check Result::converged or use integrate_checked.
template <class V = double, class F>
Result<V> integrate(F&& f, double a, double b, const Options& opt = {},
                    std::span<const double> breaks = {}) {
    using detail::Segment;
    Result<V> out;
    out.value = detail::zero<V>();
    if (a == b) {
        out.converged = true;
        return out;
    }
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::vector<double> cuts{a};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Segment<V>> heap;
    V total = detail::zero<V>();
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto s = detail::kronrod15<V>(f, cuts[i], cuts[i + 1]);
        out.evaluations += 15;
        detail::axpy(total, 1.0, s.value);
        total_err += s.error;
        heap.push(std::move(s));
    }

    const double width_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * detail::norm(total)); };

    while (total_err > tolerance() && static_cast<int>(heap.size()) < opt.max_intervals) {
        Segment<V> worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a <= width_floor || mid <= worst.a || mid >= worst.b) break;
        heap.pop();
        auto left = detail::kronrod15<V>(f, worst.a, mid);
        auto right = detail::kronrod15<V>(f, mid, worst.b);
        out.evaluations += 30;
        detail::axpy(total, -1.0, worst.value);
        detail::axpy(total, 1.0, left.value);
        detail::axpy(total, 1.0, right.value);
        total_err += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
    }

    // Re-sum from the heap to shed accumulated cancellation in the running total.
    total = detail::zero<V>();
    total_err = 0.0;
    while (!heap.empty()) {
        detail::axpy(total, 1.0, heap.top().value);
        total_err += heap.top().error;
        heap.pop();
    }
    out.value = detail::zero<V>();
    detail::axpy(out.value, sign, total);
    out.error = total_err;
    out.converged = total_err <= tolerance();
    return out;
}

/// As integrate, but throws AccuracyError when the tolerance is not met.
template <class V = double, class F>
V integrate_checked(F&& f, double a, double b, const Options& opt, const char* what,
                    std::span<const double> breaks = {}) {
    auto r = integrate<V>(std::forward<F>(f), a, b, opt, breaks);
    if (!r.converged) throw AccuracyError(std::string(what) + ": quadrature did not converge", r.error);
    return r.value;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline Rule gauss_legendre(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

}  // namespace stripgreen::quad
