#pragma once

// Scenario files: flat `section.key = value` lines, `#` or `;` comments.
// Unknown keys, duplicate keys and malformed values are rejected.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stripgreen/junction.hpp"
#include "stripgreen/kernel.hpp"
#include "stripgreen/problem.hpp"
#include "stripgreen/theta.hpp"

namespace stripgreen::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitValidation = 3;

/// Scenario failure carrying the process exit code.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

enum class ScenarioKind { kernel_validate, solve_linear, solve_nonlinear, solve_esjj, equivalence_check, decay_study };

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::kernel_validate: return "kernel-validate";
        case ScenarioKind::solve_linear: return "solve-linear";
        case ScenarioKind::solve_nonlinear: return "solve-nonlinear";
        case ScenarioKind::solve_esjj: return "solve-esjj";
        case ScenarioKind::equivalence_check: return "equivalence-check";
        case ScenarioKind::decay_study: return "decay-study";
    }
    return "?";
}

inline bool uses_junction(ScenarioKind k) {
    return k == ScenarioKind::solve_esjj || k == ScenarioKind::equivalence_check;
}

/// Named data profile: zero | eigenmode:k | pulse:a,b,amp | table:<csv file>.
struct Profile {
    enum class Type { zero, eigenmode, pulse, table } type = Type::zero;
    std::string text = "zero";
    int k = 1;
    double lo = 0.0, hi = 0.0, amp = 0.0;
    std::vector<std::pair<double, double>> table;

    bool is_zero() const { return type == Type::zero; }

    /// sin^2 bump of height amp on [lo, hi], zero outside.
    double pulse(double s) const {
        if (s <= lo || s >= hi) return 0.0;
        const double v = std::sin(std::numbers::pi * (s - lo) / (hi - lo));
        return amp * v * v;
    }

    /// Linear interpolation, clamped to the end values outside the table.
    double lookup(double s) const {
        if (s <= table.front().first) return table.front().second;
        if (s >= table.back().first) return table.back().second;
        auto it = std::upper_bound(table.begin(), table.end(), s,
                                   [](double v, const std::pair<double, double>& p) { return v < p.first; });
        const auto& [x1, y1] = *it;
        const auto& [x0, y0] = *(it - 1);
        return y0 + (y1 - y0) * (s - x0) / (x1 - x0);
    }

    /// Profile as a function of its abscissa; `period` is L for space data and T for time data.
    std::function<double(double)> as_function(double period) const {
        switch (type) {
            case Type::zero: return {};
            case Type::eigenmode: return [k = k, period](double s) { return std::sin(k * std::numbers::pi * s / period); };
            case Type::pulse: return [p = *this](double s) { return p.pulse(s); };
            case Type::table: return [p = *this](double s) { return p.lookup(s); };
        }
        return {};
    }
};

struct Scenario {
    std::string path;
    ScenarioKind kind = ScenarioKind::solve_linear;
    bool has_operator = false;
    bool has_junction = false;
    OperatorParams op;
    KernelForm form = KernelForm::consistent;
    JunctionParams junction;
    StripDomain domain;
    int nx = 21;
    int nt = 21;

    double quad_tol = 1e-8;
    double series_tol = 1e-14;
    double picard_tol = 1e-8;
    int max_iter = 50;
    double picard_window = 0.0;
    bool adapt_window = true;

    Profile u0, g1, g2, f;
    std::string nonlinear_term = "zero";  // zero | sin:k | linear:k | cubic:k
    double nonlinear_coef = 0.0;

    std::vector<double> validate_r{0.5, 1.0, 2.0};
    std::vector<double> validate_s{1.0, 2.0, 5.0};
    double validate_tol = 1e-4;

    std::vector<int> levels{101, 201};
    int nt_factor = 1;
    bool compare_esjj = true;

    double decay_horizon = 0.0;  // 0: domain.T
    int decay_samples = 25;

    /// Resolved key/value pairs in file order (overrides applied), for echoing.
    std::vector<std::pair<std::string, std::string>> entries;

    /// Time breaks contributed by pulse profiles.
    std::vector<double> time_breaks() const {
        std::vector<double> br;
        for (const Profile* p : {&g1, &g2, &f})
            if (p->type == Profile::Type::pulse) {
                br.push_back(p->lo);
                br.push_back(p->hi);
            }
        return br;
    }

    /// Linear problem assembled from the operator block and data profiles.
    ProblemSpec problem() const {
        ProblemSpec sp;
        sp.domain = domain;
        sp.params = op;
        sp.u0 = u0.as_function(domain.L);
        sp.g1 = g1.as_function(domain.T);
        sp.g2 = g2.as_function(domain.T);
        if (!f.is_zero()) {
            if (f.type == Profile::Type::pulse) {
                sp.source = [p = f](double, double t) { return p.pulse(t); };
            } else {
                sp.source = [g = f.as_function(domain.L)](double x, double) { return g(x); };
            }
        }
        sp.time_breaks = time_breaks();
        return sp;
    }

    /// Junction problem: u0 is phi0, g1/g2 are the phase boundary data.
    JunctionProblem junction_problem() const {
        JunctionProblem jp;
        jp.domain = domain;
        jp.junction = junction;
        jp.phi0 = u0.as_function(domain.L);
        jp.h1 = g1.as_function(domain.T);
        jp.h2 = g2.as_function(domain.T);
        return jp;
    }
};

namespace detail {

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "scenario.kind",
        "operator.epsilon", "operator.a", "operator.b", "operator.beta", "operator.kernel_form",
        "junction.epsilon", "junction.alpha", "junction.lambda", "junction.gamma",
        "domain.L", "domain.T",
        "grid.nx", "grid.nt",
        "numerics.quad_tol", "numerics.series_tol", "numerics.picard_tol", "numerics.max_iter",
        "numerics.picard_window", "numerics.adapt_window",
        "data.u0", "data.g1", "data.g2", "data.f",
        "nonlinear.term",
        "validate.r", "validate.s", "validate.tol",
        "equivalence.levels", "equivalence.nt_factor", "equivalence.compare_esjj",
        "decay.horizon", "decay.samples",
    };
    return keys;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

inline ScenarioError invalid(const std::string& key, const std::string& why) {
    return ScenarioError(kExitValidation, key + ": " + why);
}

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) throw invalid(key, "expected a finite number, got '" + v + "'");
    return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw invalid(key, "expected an integer, got '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw invalid(key, "expected true or false, got '" + v + "'");
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split(v, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw invalid(key, "expected a comma-separated list");
    return out;
}

inline std::vector<std::pair<double, double>> load_table(const std::string& key, const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw ScenarioError(kExitIo, key + ": cannot open table file " + file.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line, ',');
        if (cols.size() != 2) throw invalid(key, file.string() + ":" + std::to_string(lineno) + ": expected two columns");
        double a = 0.0, b = 0.0;
        try {
            a = parse_double(key, cols[0]);
            b = parse_double(key, cols[1]);
        } catch (const ScenarioError&) {
            if (rows.empty()) continue;  // header row
            throw;
        }
        rows.emplace_back(a, b);
    }
    if (rows.size() < 2) throw invalid(key, "table file needs at least two rows");
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].first > rows[i - 1].first)) throw invalid(key, "table abscissae must be strictly increasing");
    return rows;
}

inline Profile parse_profile(const std::string& key, const std::string& v, const std::filesystem::path& base) {
    Profile p;
    p.text = v;
    if (v == "zero") return p;
    const auto colon = v.find(':');
    if (colon == std::string::npos) throw invalid(key, "unknown profile '" + v + "'");
    const std::string name = v.substr(0, colon);
    const std::string args = v.substr(colon + 1);
    if (name == "eigenmode") {
        p.type = Profile::Type::eigenmode;
        p.k = parse_int(key, trim(args));
        if (p.k < 1) throw invalid(key, "eigenmode index must be >= 1");
    } else if (name == "pulse") {
        const auto a = parse_double_list(key, args);
        if (a.size() != 3) throw invalid(key, "pulse expects t0,t1,amp");
        p.type = Profile::Type::pulse;
        p.lo = a[0];
        p.hi = a[1];
        p.amp = a[2];
        if (!(p.hi > p.lo)) throw invalid(key, "pulse needs t1 > t0");
    } else if (name == "table") {
        p.type = Profile::Type::table;
        std::filesystem::path file = trim(args);
        if (file.is_relative()) file = base / file;
        p.table = load_table(key, file);
    } else {
        throw invalid(key, "unknown profile '" + name + "'");
    }
    return p;
}

inline ScenarioKind parse_kind(const std::string& v) {
    for (auto k : {ScenarioKind::kernel_validate, ScenarioKind::solve_linear, ScenarioKind::solve_nonlinear,
                   ScenarioKind::solve_esjj, ScenarioKind::equivalence_check, ScenarioKind::decay_study})
        if (v == to_string(k)) return k;
    throw invalid("scenario.kind", "unknown kind '" + v + "'");
}

inline std::pair<std::string, std::string> split_assignment(const std::string& line, const std::string& where) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError(kExitValidation, where + ": expected 'section.key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos) throw ScenarioError(kExitValidation, where + ": key '" + key + "' lacks a section");
    if (!known_keys().count(key)) throw invalid(key, "unknown key");
    if (value.empty()) throw invalid(key, "empty value");
    return {key, value};
}

}  // namespace detail

/// Builds a Scenario from ordered key/value pairs (later pairs override earlier ones).
inline Scenario build_scenario(const std::vector<std::pair<std::string, std::string>>& pairs,
                               const std::filesystem::path& base = ".") {
    using namespace detail;
    std::map<std::string, std::string> kv;
    Scenario sc;
    for (const auto& [k, v] : pairs) {
        if (!known_keys().count(k)) throw invalid(k, "unknown key");
        if (!kv.count(k)) sc.entries.emplace_back(k, v);
        else
            for (auto& e : sc.entries)
                if (e.first == k) e.second = v;
        kv[k] = v;
    }
    auto get = [&](const std::string& k) -> std::optional<std::string> {
        auto it = kv.find(k);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    auto num = [&](const std::string& k, double& target) {
        if (auto v = get(k)) target = parse_double(k, *v);
    };
    auto integer = [&](const std::string& k, int& target) {
        if (auto v = get(k)) target = parse_int(k, *v);
    };

    const auto kind = get("scenario.kind");
    if (!kind) throw invalid("scenario.kind", "missing");
    sc.kind = parse_kind(*kind);

    for (const auto& [k, v] : kv) {
        if (k.rfind("operator.", 0) == 0) sc.has_operator = true;
        if (k.rfind("junction.", 0) == 0) sc.has_junction = true;
    }
    if (sc.has_operator && sc.has_junction) throw invalid("scenario.kind", "operator and junction blocks are mutually exclusive");
    if (uses_junction(sc.kind) && !sc.has_junction)
        throw invalid("scenario.kind", std::string(to_string(sc.kind)) + " requires a junction block");
    if (!uses_junction(sc.kind) && !sc.has_operator)
        throw invalid("scenario.kind", std::string(to_string(sc.kind)) + " requires an operator block");

    num("operator.epsilon", sc.op.epsilon);
    num("operator.a", sc.op.a);
    num("operator.b", sc.op.b);
    num("operator.beta", sc.op.beta);
    if (auto v = get("operator.kernel_form")) {
        if (*v == "consistent") sc.form = KernelForm::consistent;
        else if (*v == "printed") sc.form = KernelForm::printed;
        else if (*v == "sqrt_y") sc.form = KernelForm::sqrt_y;
        else throw invalid("operator.kernel_form", "expected consistent, printed or sqrt_y");
    }
    num("junction.epsilon", sc.junction.epsilon);
    num("junction.alpha", sc.junction.alpha);
    num("junction.lambda", sc.junction.lambda);
    num("junction.gamma", sc.junction.gamma);
    num("domain.L", sc.domain.L);
    num("domain.T", sc.domain.T);
    integer("grid.nx", sc.nx);
    integer("grid.nt", sc.nt);
    num("numerics.quad_tol", sc.quad_tol);
    num("numerics.series_tol", sc.series_tol);
    num("numerics.picard_tol", sc.picard_tol);
    integer("numerics.max_iter", sc.max_iter);
    num("numerics.picard_window", sc.picard_window);
    if (auto v = get("numerics.adapt_window")) sc.adapt_window = parse_bool("numerics.adapt_window", *v);
    if (auto v = get("validate.r")) sc.validate_r = parse_double_list("validate.r", *v);
    if (auto v = get("validate.s")) sc.validate_s = parse_double_list("validate.s", *v);
    num("validate.tol", sc.validate_tol);
    if (auto v = get("equivalence.levels")) {
        sc.levels.clear();
        for (const auto& item : split(*v, ',')) sc.levels.push_back(parse_int("equivalence.levels", item));
    }
    integer("equivalence.nt_factor", sc.nt_factor);
    if (auto v = get("equivalence.compare_esjj")) sc.compare_esjj = parse_bool("equivalence.compare_esjj", *v);
    num("decay.horizon", sc.decay_horizon);
    integer("decay.samples", sc.decay_samples);

    for (auto [key, target] : {std::pair{"data.u0", &sc.u0}, std::pair{"data.g1", &sc.g1}, std::pair{"data.g2", &sc.g2},
                               std::pair{"data.f", &sc.f}})
        if (auto v = get(key)) *target = parse_profile(key, *v, base);

    if (auto v = get("nonlinear.term")) {
        sc.nonlinear_term = *v;
        if (*v != "zero") {
            const auto colon = v->find(':');
            const std::string name = colon == std::string::npos ? *v : v->substr(0, colon);
            if (colon == std::string::npos || (name != "sin" && name != "linear" && name != "cubic"))
                throw invalid("nonlinear.term", "expected zero, sin:k, linear:k or cubic:k");
            sc.nonlinear_term = name;
            sc.nonlinear_coef = parse_double("nonlinear.term", trim(v->substr(colon + 1)));
        }
    }

    // invariants, reported with the offending key
    if (!(sc.op.epsilon > 0.0)) throw invalid("operator.epsilon", "must be > 0");
    if (!(sc.op.beta > 0.0)) throw invalid("operator.beta", "must be > 0");
    if (sc.has_operator) {
        if (sc.op.a < 0.0) throw invalid("operator.a", "kernel path requires a >= 0");
        if (sc.op.b < 0.0) throw invalid("operator.b", "kernel path requires b >= 0");
    }
    if (!(sc.junction.epsilon > 0.0)) throw invalid("junction.epsilon", "must be > 0");
    if (!(sc.domain.L > 0.0)) throw invalid("domain.L", "must be > 0");
    if (!(sc.domain.T > 0.0)) throw invalid("domain.T", "must be > 0");
    if (sc.nx < 5) throw invalid("grid.nx", "must be >= 5");
    if (sc.nt < 5) throw invalid("grid.nt", "must be >= 5");
    if (!(sc.quad_tol > 0.0)) throw invalid("numerics.quad_tol", "must be > 0");
    if (!(sc.series_tol > 0.0)) throw invalid("numerics.series_tol", "must be > 0");
    if (!(sc.picard_tol > 0.0)) throw invalid("numerics.picard_tol", "must be > 0");
    if (sc.max_iter < 1) throw invalid("numerics.max_iter", "must be >= 1");
    if (sc.picard_window < 0.0 || sc.picard_window > sc.domain.T)
        throw invalid("numerics.picard_window", "must lie in [0, T] (0 = whole horizon)");
    if (!(sc.validate_tol > 0.0)) throw invalid("validate.tol", "must be > 0");
    for (double r : sc.validate_r)
        if (r < 0.0) throw invalid("validate.r", "values must be >= 0");
    for (double s : sc.validate_s)
        if (!(s > laplace_abscissa(sc.op) + 0.5)) throw invalid("validate.s", "values must exceed max(-a, -beta) + 0.5");
    if (sc.levels.size() < 2) throw invalid("equivalence.levels", "needs at least two grids");
    for (std::size_t i = 0; i < sc.levels.size(); ++i) {
        if (sc.levels[i] < 5) throw invalid("equivalence.levels", "grids must have >= 5 nodes");
        if (i > 0 && sc.levels[i] <= sc.levels[i - 1]) throw invalid("equivalence.levels", "grids must increase");
    }
    if (sc.nt_factor < 1) throw invalid("equivalence.nt_factor", "must be >= 1");
    if (sc.decay_horizon < 0.0) throw invalid("decay.horizon", "must be >= 0 (0 = domain.T)");
    if (sc.decay_samples < 3) throw invalid("decay.samples", "must be >= 3");
    if (sc.kind == ScenarioKind::decay_study && (!sc.u0.is_zero() || !sc.f.is_zero()))
        throw invalid("data.u0", "decay-study expects zero u0 and f (boundary pulses only)");
    if (!uses_junction(sc.kind) && sc.nonlinear_term != "zero" && sc.kind != ScenarioKind::solve_nonlinear)
        throw invalid("nonlinear.term", "only used by solve-nonlinear");
    return sc;
}

/// Reads `path`, applies `overrides` ("section.key=value") in order and validates.
inline Scenario parse_scenario(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream is(path);
    if (!is) throw ScenarioError(kExitIo, "cannot open scenario file " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto kv = detail::split_assignment(line, path + ":" + std::to_string(lineno));
        if (!seen.insert(kv.first).second) throw detail::invalid(kv.first, "duplicate key");
        pairs.push_back(std::move(kv));
    }
    for (const auto& o : overrides) pairs.push_back(detail::split_assignment(o, "--override " + o));
    const auto base = std::filesystem::path(path).parent_path();
    Scenario sc = build_scenario(pairs, base.empty() ? std::filesystem::path(".") : base);
    sc.path = path;
    return sc;
}

}  // namespace stripgreen::cli
