#pragma once

// Scenario dispatch: runs one scenario and writes field.csv and/or report.csv
// plus summary.txt into the output directory.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stripgreen/cli/scenario.hpp"
#include "stripgreen/esjj.hpp"
#include "stripgreen/field.hpp"
#include "stripgreen/green_solver.hpp"
#include "stripgreen/kernel.hpp"
#include "stripgreen/nonlinear.hpp"
#include "stripgreen/oracles/fd_integro.hpp"

namespace stripgreen::cli {

struct Check {
    std::string name;
    bool passed;
    std::string detail;
};

struct RunSummary {
    std::vector<std::string> lines;  // achieved quantities, "key: value"
    std::vector<Check> checks;
    std::vector<std::string> files;

    void note(const std::string& key, const std::string& value) { lines.push_back(key + ": " + value); }
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

namespace detail {

inline GreenConfig green_config(const Scenario& sc) {
    GreenConfig cfg;
    cfg.tol = sc.quad_tol;
    cfg.series.tol = sc.series_tol;
    cfg.kernel.form = sc.form;
    return cfg;
}

inline void write_plot_stub(const std::filesystem::path& dir) {
    std::ofstream os(dir / "plot_field.py");
    if (!os) throw ScenarioError(kExitIo, "cannot write " + (dir / "plot_field.py").string());
    os << "#!/usr/bin/env python3\n"
          "\"\"\"Plot field.csv (columns x,t,u) as a space-time colour map.\"\"\"\n"
          "import sys\n"
          "import numpy as np\n"
          "import matplotlib.pyplot as plt\n"
          "\n"
          "path = sys.argv[1] if len(sys.argv) > 1 else \"field.csv\"\n"
          "data = np.loadtxt(path, delimiter=\",\", skiprows=1)\n"
          "x = np.unique(data[:, 0])\n"
          "t = np.unique(data[:, 1])\n"
          "u = data[:, 2].reshape(len(t), len(x))\n"
          "plt.pcolormesh(x, t, u, shading=\"auto\")\n"
          "plt.xlabel(\"x\")\n"
          "plt.ylabel(\"t\")\n"
          "plt.colorbar(label=\"u\")\n"
          "plt.savefig(path.rsplit(\".\", 1)[0] + \".png\", dpi=120)\n";
}

inline void write_field(const SpaceTimeField& u, const std::filesystem::path& dir, RunSummary& s) {
    const auto path = dir / "field.csv";
    std::ofstream os(path);
    if (!os) throw ScenarioError(kExitIo, "cannot write " + path.string());
    u.write_csv(os);
    write_plot_stub(dir);
    s.files.push_back("field.csv");
    s.files.push_back("plot_field.py");
    s.note("field provenance", u.provenance());
    s.checks.push_back({"field finite", u.all_finite(), ""});
}

inline std::ofstream open_report(const std::filesystem::path& dir, RunSummary& s) {
    const auto path = dir / "report.csv";
    std::ofstream os(path);
    if (!os) throw ScenarioError(kExitIo, "cannot write " + path.string());
    s.files.push_back("report.csv");
    return os;
}

inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline StateFn nonlinear_term(const Scenario& sc) {
    const double k = sc.nonlinear_coef;
    if (sc.nonlinear_term == "sin") return [k](double, double, double u) { return k * std::sin(u); };
    if (sc.nonlinear_term == "linear") return [k](double, double, double u) { return k * u; };
    if (sc.nonlinear_term == "cubic") return [k](double, double, double u) { return -k * u * u * u; };
    return {};
}

inline void run_kernel_validate(const Scenario& sc, const std::filesystem::path& dir, RunSummary& s) {
    QuadratureConfig q;
    q.form = sc.form;
    const auto rep = validate_kernel_laplace(sc.validate_r, sc.validate_s, sc.op, q, sc.quad_tol);
    auto os = open_report(dir, s);
    os << "r,s,closed,numeric,rel_err,inconclusive\n";
    for (const auto& r : rep.rows)
        os << fmt17(r.r) << ',' << fmt17(r.s) << ',' << fmt17(r.closed) << ',' << fmt17(r.numeric) << ','
           << fmt17(r.rel_err) << ',' << (r.inconclusive ? 1 : 0) << '\n';
    s.note("kernel form", to_string(sc.form));
    s.note("max rel_err", sci(rep.max_rel_err()) + " (threshold " + sci(sc.validate_tol) + ")");
    s.checks.push_back({"max rel_err below validate.tol", rep.max_rel_err() < sc.validate_tol, sci(rep.max_rel_err())});
    s.checks.push_back({"no inconclusive transform", !rep.any_inconclusive(), ""});
}

inline void run_solve_linear(const Scenario& sc, const std::filesystem::path& dir, RunSummary& s) {
    const auto sp = sc.problem();
    const auto u = solve_linear_dirichlet(sp, sc.nx, sc.nt, green_config(sc));
    if (sp.corner_mismatch()) s.note("warning", "initial datum disagrees with boundary data at a corner");
    write_field(u, dir, s);
}

inline void run_solve_nonlinear(const Scenario& sc, const std::filesystem::path& dir, RunSummary& s) {
    ProblemSpec sp = sc.problem();
    // the linear source joins the product-integrated volume term
    const auto f = sp.source;
    sp.source = nullptr;
    const auto n = nonlinear_term(sc);
    StateFn total;
    if (f || n)
        total = [f, n](double x, double t, double u) { return (f ? f(x, t) : 0.0) + (n ? n(x, t, u) : 0.0); };
    PicardConfig pc;
    pc.tol = sc.picard_tol;
    pc.max_iter = sc.max_iter;
    pc.window = sc.picard_window;
    pc.adapt_window = sc.adapt_window;
    const auto res = picard_solve(sp, total, sc.nx, sc.nt, pc, green_config(sc));
    write_field(res.field, dir, s);
    auto os = open_report(dir, s);
    res.report.write_csv(os);
    s.note("picard iterations", std::to_string(res.report.steps.size()));
    s.note("picard windows", std::to_string(res.report.windows) + " of " + std::to_string(res.report.window_steps) + " steps");
    s.note("lipschitz estimate", sci(res.report.lipschitz_estimate));
    s.note("final increment", sci(res.report.last_increment()) + " (requested " + sci(sc.picard_tol) + ")");
    s.note("fixed-point residual", sci(res.residual));
    s.checks.push_back({"converged", res.report.converged, ""});
    s.checks.push_back({"fixed-point residual <= 2 tol", res.residual <= 2.0 * sc.picard_tol, sci(res.residual)});
}

inline void run_solve_esjj(const Scenario& sc, const std::filesystem::path& dir, RunSummary& s) {
    const auto jp = sc.junction_problem();
    const auto mapped = map_params(sc.junction);
    const auto sp = gauge_problem(jp);
    s.note("mapped operator", "eps=" + fmt17(mapped.params.epsilon) + " a=" + fmt17(mapped.params.a) +
                                  " b=" + fmt17(mapped.params.b) + " beta=" + fmt17(mapped.params.beta));
    SpaceTimeField u;
    if (mapped.kernel_admissible) {
        s.note("route", "Green representation with Picard iteration (kernel path admissible)");
        PicardConfig pc;
        pc.tol = sc.picard_tol;
        pc.max_iter = sc.max_iter;
        pc.window = sc.picard_window;
        pc.adapt_window = sc.adapt_window;
        const auto res = picard_solve(sp, esjj_memory_source(sc.junction), sc.nx, sc.nt, pc, green_config(sc));
        auto os = open_report(dir, s);
        res.report.write_csv(os);
        s.note("final increment", sci(res.report.last_increment()) + " (requested " + sci(sc.picard_tol) + ")");
        s.checks.push_back({"converged", res.report.converged, ""});
        u = res.field;
    } else {
        s.note("route", "finite-difference integro solver (mapped a or b negative)");
        oracles::FdGrid g;
        g.nx = sc.nx;
        g.nt = sc.nt;
        oracles::FdExtras ex;
        const auto j = sc.junction;
        ex.memory_f1 = [j](double x, double, double v) { return f1_eval(v, x, j); };
        ex.memory_rate = 1.0 / j.epsilon;
        u = oracles::fd_solve_integro(sp, g, ex);
    }
    const auto phi = gauge_forward(u, sc.junction.lambda);
    s.note("junction residual (2nd-order stencils)", sci(residual_esjj(phi, sc.junction)));
    write_field(phi, dir, s);
}

inline void run_equivalence(const Scenario& sc, const std::filesystem::path& dir, RunSummary& s) {
    EquivalenceConfig cfg;
    cfg.levels = sc.levels;
    cfg.nt_factor = sc.nt_factor;
    cfg.compare_esjj = sc.compare_esjj;
    SpaceTimeField finest;
    const auto rep = equivalence_study(sc.junction_problem(), cfg, &finest);
    auto os = open_report(dir, s);
    rep.write_csv(os);
    write_field(finest, dir, s);
    const auto& last = rep.rows.back();
    s.note("observed order", sci(last.observed_order));
    for (const auto& r : rep.rows)
        s.note("residual " + std::to_string(r.nx) + "x" + std::to_string(r.nt), sci(r.residual));
    s.checks.push_back({"observed order in [1.8, 2.2]", last.observed_order >= 1.8 && last.observed_order <= 2.2,
                        sci(last.observed_order)});
    if (sc.compare_esjj) {
        double dist = 0.0;
        for (const auto& r : rep.rows) dist = std::max(dist, r.esjj_distance);
        s.checks.push_back({"junction solver distance <= 5e-3", dist <= 5e-3, sci(dist)});
    }
}

inline void run_decay(const Scenario& sc, const std::filesystem::path& dir, RunSummary& s) {
    auto sp = sc.problem();
    const double horizon = sc.decay_horizon > 0.0 ? sc.decay_horizon : sc.domain.T;
    sp.domain.T = std::max(sp.domain.T, horizon);
    const auto rep = decay_study(sp, horizon, green_config(sc), sc.decay_samples);
    auto os = open_report(dir, s);
    os << "t,sup_u\n";
    for (std::size_t k = 0; k < rep.times.size(); ++k) os << fmt17(rep.times[k]) << ',' << fmt17(rep.sup_values[k]) << '\n';
    s.note("fitted decay rate", rep.rate_defined ? fmt17(rep.rate) : "undefined");
    s.note("fit points", std::to_string(rep.fit_points));
    s.checks.push_back({"positive decay rate", rep.rate_defined && rep.rate > 0.0, rep.rate_defined ? sci(rep.rate) : "undefined"});
}

inline void write_summary(const Scenario& sc, const std::filesystem::path& dir, const RunSummary& s,
                          const std::string& status, const std::string& error) {
    std::ofstream os(dir / "summary.txt");
    if (!os) throw ScenarioError(kExitIo, "cannot write " + (dir / "summary.txt").string());
    os << "scenario: " << sc.path << '\n' << "kind: " << to_string(sc.kind) << '\n' << "parameters:\n";
    for (const auto& [k, v] : sc.entries) os << "  " << k << " = " << v << '\n';
    os << "grid: " << sc.nx << " x " << sc.nt << '\n';
    os << "requested tolerances: quad_tol=" << sci(sc.quad_tol) << " series_tol=" << sci(sc.series_tol)
       << " picard_tol=" << sci(sc.picard_tol) << " max_iter=" << sc.max_iter << '\n';
    os << "achieved:\n";
    for (const auto& l : s.lines) os << "  " << l << '\n';
    os << "checks:\n";
    for (const auto& c : s.checks)
        os << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")")
           << '\n';
    if (!error.empty()) os << "error: " << error << '\n';
    os << "files:";
    for (const auto& f : s.files) os << ' ' << f;
    os << "\nstatus: " << status << '\n';
}

}  // namespace detail

/// Runs the scenario, writing outputs into out_dir. Returns the process exit code.
inline int run_scenario(const Scenario& sc, const std::string& out_dir, std::ostream& log) {
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        log << "error: cannot create output directory " << out_dir << '\n';
        return kExitIo;
    }
    RunSummary s;
    int code = kExitPass;
    std::string error;
    try {
        switch (sc.kind) {
            case ScenarioKind::kernel_validate: detail::run_kernel_validate(sc, dir, s); break;
            case ScenarioKind::solve_linear: detail::run_solve_linear(sc, dir, s); break;
            case ScenarioKind::solve_nonlinear: detail::run_solve_nonlinear(sc, dir, s); break;
            case ScenarioKind::solve_esjj: detail::run_solve_esjj(sc, dir, s); break;
            case ScenarioKind::equivalence_check: detail::run_equivalence(sc, dir, s); break;
            case ScenarioKind::decay_study: detail::run_decay(sc, dir, s); break;
        }
        if (!s.passed()) code = kExitNumerical;
    } catch (const ScenarioError& e) {
        code = e.code();
        error = e.what();
    } catch (const ConfigError& e) {
        code = kExitValidation;
        error = e.what();
    } catch (const std::exception& e) {
        // AccuracyError, ConvergenceError, DomainError, DataError from the solvers
        code = kExitNumerical;
        error = e.what();
    }
    const std::string status = code == kExitPass ? "PASS" : (code == kExitNumerical ? "FAIL (numerical)" : "FAIL");
    try {
        detail::write_summary(sc, dir, s, status, error);
    } catch (const ScenarioError& e) {
        log << "error: " << e.what() << '\n';
        return kExitIo;
    }
    if (!error.empty()) log << "error: " << error << '\n';
    log << to_string(sc.kind) << ": " << status << " (" << (dir / "summary.txt").string() << ")\n";
    return code;
}

}  // namespace stripgreen::cli
