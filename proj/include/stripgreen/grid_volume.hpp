#pragma once

// Product-integration form of the volume term for sources known only at grid
// nodes (Picard iterates). The source is interpolated piecewise-cubically in xi
// and piecewise-linearly in tau; the Green kernel is integrated exactly against
// those basis functions, giving weights that depend only on the time lag:
//
//   V(x_i, t_n) = sum_{l=0}^{n-1} sum_j ( A^l_ij F_j,n-l + B^l_ij F_j,n-l-1 ).
//
// Kernel values are tabulated per lag sample on the translation lattice
// x_i -/+ xi, so each theta value is computed once and shared by all nodes.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "stripgreen/errors.hpp"
#include "stripgreen/field.hpp"
#include "stripgreen/green_solver.hpp"
#include "stripgreen/problem.hpp"
#include "stripgreen/quadrature.hpp"

namespace stripgreen {

struct GridVolumeConfig {
    int xi_points = 8;          // Gauss-Legendre points per (sub)panel in xi
    int lag_points = 8;         // Gauss-Legendre points per lag panel in s
    int first_lag_pieces = 4;   // composite pieces for the first lag (in w = sqrt(s))
    double cutoff = 40.0;       // skip panels with d^2/(4 eps s) above this
};

class GridVolumeOperator {
public:
    GridVolumeOperator(const ProblemSpec& sp, int nx, int nt, const GreenConfig& gcfg = {},
                       const GridVolumeConfig& vcfg = {})
        : nx_(nx), nt_(nt), domain_(sp.domain) {
        sp.validate();
        sp.params.validate_kernel();
        if (nx < 4) throw ConfigError("GridVolumeOperator: nx must be >= 4");
        if (nt < 2) throw ConfigError("GridVolumeOperator: nt must be >= 2");
        build(sp, gcfg, vcfg);
    }

    int nx() const { return nx_; }
    int nt() const { return nt_; }

    /// Weight of source node (j, n - lag) (side 0) or (j, n - lag - 1) (side 1) at interior node i.
    double weight(int i, int lag, int side, int j) const { return w_[index(i, lag, side, j)]; }

    /// V at interior node (i, n) from source samples F (same grid layout as SpaceTimeField).
    double apply_at(const SpaceTimeField& F, int i, int n) const {
        double acc = 0.0;
        for (int lag = 0; lag < n; ++lag) {
            const double* a = &w_[index(i, lag, 0, 0)];
            const double* b = &w_[index(i, lag, 1, 0)];
            for (int j = 0; j < nx_; ++j) acc += a[j] * F(j, n - lag) + b[j] * F(j, n - lag - 1);
        }
        return acc;
    }

    /// max_i sum over lags < steps of |weights|: bound on the Lipschitz gain of V over a window.
    double window_mass(int steps) const {
        double best = 0.0;
        for (int i = 1; i < nx_ - 1; ++i) {
            double m = 0.0;
            for (int lag = 0; lag < std::min(steps, nt_ - 1); ++lag)
                for (int side = 0; side < 2; ++side)
                    for (int j = 0; j < nx_; ++j) m += std::abs(weight(i, lag, side, j));
            best = std::max(best, m);
        }
        return best;
    }

private:
    std::size_t index(int i, int lag, int side, int j) const {
        return ((static_cast<std::size_t>(i - 1) * (nt_ - 1) + lag) * 2 + side) * nx_ + j;
    }

    void build(const ProblemSpec& sp, const GreenConfig& gcfg, const GridVolumeConfig& vcfg) {
        const double L = domain_.L;
        const double hx = L / (nx_ - 1);
        const double ht = domain_.T / (nt_ - 1);
        const double eps = sp.params.epsilon;
        w_.assign(static_cast<std::size_t>(nx_ - 2) * (nt_ - 1) * 2 * nx_, 0.0);

        const auto xi_rule = quad::gauss_legendre(vcfg.xi_points);
        const auto s_rule = quad::gauss_legendre(vcfg.lag_points);
        const int nq = vcfg.xi_points;

        std::vector<double> I(static_cast<std::size_t>(nx_ - 2) * nx_);
        // interior-node weights of the source at lag-sample s (into I)
        auto sample = [&](double s) {
            std::fill(I.begin(), I.end(), 0.0);
            const int r = std::max(1, static_cast<int>(std::ceil(2.0 * hx / std::sqrt(eps * s))));
            const double sub = hx / r;
            const double reach2 = vcfg.cutoff * 4.0 * eps * s;
            // theta table on z = m hx + sub (k + (1 + z_q)/2), m in [-nx, 2nx]
            const int m_lo = -nx_, m_count = 3 * nx_ + 1;
            std::vector<double> table(static_cast<std::size_t>(m_count) * r * nq, std::numeric_limits<double>::quiet_NaN());
            auto theta_at = [&](int m, int k, int q) {
                double& slot = table[(static_cast<std::size_t>(m - m_lo) * r + k) * nq + q];
                if (std::isnan(slot)) {
                    const double z = m * hx + sub * (k + 0.5 * (1.0 + xi_rule.nodes[q]));
                    slot = theta(z, s, sp.domain, sp.params, gcfg.series, gcfg.kernel);
                }
                return slot;
            };
            // cardinal cubic weights per (stencil position, k, q)
            std::vector<std::array<double, 4>> card(static_cast<std::size_t>(3) * r * nq);
            for (int pos = 0; pos < 3; ++pos)
                for (int k = 0; k < r; ++k)
                    for (int q = 0; q < nq; ++q) {
                        // local coordinate in units of hx measured from stencil start
                        const double u = pos + (k + 0.5 * (1.0 + xi_rule.nodes[q])) / r;
                        std::array<double, 4> c;
                        for (int a = 0; a < 4; ++a) {
                            double v = 1.0;
                            for (int b = 0; b < 4; ++b)
                                if (b != a) v *= (u - b) / static_cast<double>(a - b);
                            c[a] = v;
                        }
                        card[(static_cast<std::size_t>(pos) * r + k) * nq + q] = c;
                    }
            for (int i = 1; i < nx_ - 1; ++i) {
                const double x = i * hx;
                for (int p = 0; p < nx_ - 1; ++p) {
                    const double lo = p * hx, hi = (p + 1) * hx;
                    auto dist = [&](double c) { return c < lo ? lo - c : (c > hi ? c - hi : 0.0); };
                    const double d = std::min({dist(x), dist(-x), dist(2.0 * L - x)});
                    if (d * d > reach2) continue;
                    const int s0 = std::clamp(p - 1, 0, nx_ - 4);
                    const int pos = p - s0;
                    for (int k = 0; k < r; ++k)
                        for (int q = 0; q < nq; ++q) {
                            // x - xi = (i-p-1) hx + sub((r-1-k) + (1 - z_q)/2); Gauss nodes are symmetric
                            const double g = theta_at(i - p - 1, r - 1 - k, nq - 1 - q) - theta_at(i + p, k, q);
                            const double wq = 0.5 * sub * xi_rule.weights[q] * g;
                            const auto& c = card[(static_cast<std::size_t>(pos) * r + k) * nq + q];
                            double* row = &I[static_cast<std::size_t>(i - 1) * nx_ + s0];
                            for (int a = 0; a < 4; ++a) row[a] += wq * c[a];
                        }
                }
            }
        };

        auto accumulate = [&](int lag, double s, double ws) {
            sample(s);
            const double phi1 = (s - lag * ht) / ht;  // towards node n - lag - 1
            const double phi0 = 1.0 - phi1;
            for (int i = 1; i < nx_ - 1; ++i)
                for (int j = 0; j < nx_; ++j) {
                    const double v = ws * I[static_cast<std::size_t>(i - 1) * nx_ + j];
                    w_[index(i, lag, 0, j)] += phi0 * v;
                    w_[index(i, lag, 1, j)] += phi1 * v;
                }
        };

        // first lag: s = w^2 absorbs the sqrt(s) behaviour of the smoothed source at s -> 0
        const double wtop = std::sqrt(ht);
        const int pieces = std::max(1, vcfg.first_lag_pieces);
        for (int piece = 0; piece < pieces; ++piece) {
            const double a = wtop * piece / pieces, b = wtop * (piece + 1) / pieces;
            for (std::size_t q = 0; q < s_rule.nodes.size(); ++q) {
                const double w = 0.5 * (a + b) + 0.5 * (b - a) * s_rule.nodes[q];
                accumulate(0, w * w, 0.5 * (b - a) * s_rule.weights[q] * 2.0 * w);
            }
        }
        for (int lag = 1; lag < nt_ - 1; ++lag) {
            const double a = lag * ht, b = (lag + 1) * ht;
            for (std::size_t q = 0; q < s_rule.nodes.size(); ++q) {
                const double s = 0.5 * (a + b) + 0.5 * (b - a) * s_rule.nodes[q];
                accumulate(lag, s, 0.5 * (b - a) * s_rule.weights[q]);
            }
        }
    }

    int nx_, nt_;
    StripDomain domain_;
    std::vector<double> w_;
};

}  // namespace stripgreen
