#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "stripgreen/errors.hpp"
#include "stripgreen/theta.hpp"

namespace stripgreen {

/// Samples u(x_i, t_n) on a uniform grid over [0, L] x [0, T].
/// Storage is row-major in time: values[n * nx + i].
class SpaceTimeField {
public:
    SpaceTimeField() = default;
    SpaceTimeField(int nx, int nt, StripDomain domain, std::string provenance = {})
        : nx_(nx), nt_(nt), domain_(domain), provenance_(std::move(provenance)) {
        if (nx < 3) throw ConfigError("SpaceTimeField: nx must be >= 3");
        if (nt < 2) throw ConfigError("SpaceTimeField: nt must be >= 2");
        domain_.validate();
        values_.assign(static_cast<std::size_t>(nx) * nt, 0.0);
    }

    int nx() const { return nx_; }
    int nt() const { return nt_; }
    const StripDomain& domain() const { return domain_; }
    const std::string& provenance() const { return provenance_; }
    void set_provenance(std::string p) { provenance_ = std::move(p); }

    double hx() const { return domain_.L / (nx_ - 1); }
    double ht() const { return domain_.T / (nt_ - 1); }
    double x(int i) const { return i == nx_ - 1 ? domain_.L : i * hx(); }
    double t(int n) const { return n == nt_ - 1 ? domain_.T : n * ht(); }

    double& operator()(int i, int n) { return values_[static_cast<std::size_t>(n) * nx_ + i]; }
    double operator()(int i, int n) const { return values_[static_cast<std::size_t>(n) * nx_ + i]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool same_grid(const SpaceTimeField& o) const {
        return nx_ == o.nx_ && nt_ == o.nt_ && domain_.L == o.domain_.L && domain_.T == o.domain_.T;
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// CSV with header `x,t,u`, rows ordered by t then x, 17 significant digits.
    void write_csv(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path + " for writing");
        write_csv(os);
    }

    void write_csv(std::ostream& os) const {
        os << "x,t,u\n";
        char buf[96];
        for (int n = 0; n < nt_; ++n)
            for (int i = 0; i < nx_; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x(i), t(n), (*this)(i, n));
                os << buf;
            }
    }

private:
    int nx_ = 0;
    int nt_ = 0;
    StripDomain domain_{};
    std::string provenance_;
    std::vector<double> values_;
};

/// max |a - b| over nodes of two fields on the same grid.
inline double sup_distance(const SpaceTimeField& a, const SpaceTimeField& b) {
    if (!a.same_grid(b)) throw ConfigError("sup_distance: fields on different grids");
    double m = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    return m;
}

/// Format a double with 17 significant digits.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace stripgreen
