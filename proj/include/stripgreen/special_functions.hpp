#pragma once

// Real Bessel functions of the first kind, orders 0 and 1.
//
// Two regimes: the ascending power series (summed in long double with
// Kahan compensation) for |z| <= series_cutoff, and the Hankel asymptotic
// expansion beyond. At the default cutoff both regimes stay below 1e-12
// relative to the local amplitude max(|J_n(z)|, sqrt(2/(pi z))).

#include <cmath>
#include <numbers>

#include "stripgreen/errors.hpp"

namespace stripgreen {

struct BesselAccuracy {
    double target_rel_error = 1e-12;
    double series_cutoff = 17.0;
};

/// Arguments with |z| above this are evaluated best-effort only.
inline constexpr double kBesselContractLimit = 1e4;

namespace detail {

// sum_k (-1)^k (z/2)^(2k+n) / (k! (k+n)!) for n in {0, 1}
inline double bessel_series(int n, double z) {
    const long double h = 0.5L * static_cast<long double>(z);
    const long double h2 = h * h;
    long double term = (n == 0) ? 1.0L : h;
    long double sum = term;
    long double carry = 0.0L;
    for (int k = 1; k < 200; ++k) {
        term *= -h2 / (static_cast<long double>(k) * static_cast<long double>(k + n));
        const long double y = term - carry;
        const long double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        if (std::fabs(term) <= 1e-21L * std::fabs(sum) || term == 0.0L) break;
    }
    return static_cast<double>(sum);
}

// Hankel expansion, z > 0.
inline double bessel_asymptotic(int n, double z) {
    const long double mu = 4.0L * n * n;
    const long double eight_z = 8.0L * static_cast<long double>(z);
    long double p = 1.0L, q = 0.0L;
    long double term = 1.0L;
    long double prev = HUGE_VALL;
    for (int k = 1; k < 200; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        term *= (mu - odd * odd) / (static_cast<long double>(k) * eight_z);
        const long double mag = std::fabs(term);
        if (mag >= prev) break;  // asymptotic series starts diverging
        prev = mag;
        // k odd -> Q, k even -> P; signs alternate within each
        if (k % 2 == 1) {
            q += ((k / 2) % 2 == 0) ? term : -term;
        } else {
            p += ((k / 2) % 2 == 1) ? -term : term;
        }
        if (mag < 1e-20L) break;
    }
    // chi = z - (n/2 + 1/4) pi, expanded so that cos/sin see the unreduced z
    const double c = std::cos(z), s = std::sin(z);
    constexpr double r = std::numbers::sqrt2 / 2.0;
    double cos_chi, sin_chi;
    if (n == 0) {
        cos_chi = r * (c + s);
        sin_chi = r * (s - c);
    } else {
        cos_chi = r * (s - c);
        sin_chi = -r * (s + c);
    }
    const long double amp = std::sqrt(2.0L / (std::numbers::pi_v<long double> * z));
    return static_cast<double>(amp * (p * cos_chi - q * sin_chi));
}

inline double bessel_jn01(int n, double z, const BesselAccuracy& acc, const char* name) {
    if (!std::isfinite(z)) throw DomainError(std::string(name) + ": non-finite argument");
    const double az = std::abs(z);
    const double v = (az <= acc.series_cutoff) ? bessel_series(n, az) : bessel_asymptotic(n, az);
    return (n == 1 && z < 0.0) ? -v : v;
}

}  // namespace detail

/// J1(z). Exactly odd: bessel_j1(-z) == -bessel_j1(z).
inline double bessel_j1(double z, const BesselAccuracy& acc = {}) {
    return detail::bessel_jn01(1, z, acc, "bessel_j1");
}

/// J0(z). Exactly even.
inline double bessel_j0(double z, const BesselAccuracy& acc = {}) {
    return detail::bessel_jn01(0, z, acc, "bessel_j0");
}

/// True when |z| lies outside the range where the accuracy target is guaranteed.
inline bool bessel_reduced_accuracy(double z) { return std::abs(z) > kBesselContractLimit; }

}  // namespace stripgreen
