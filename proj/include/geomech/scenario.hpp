// JSON scenario files, CSV trajectories and invariant / Kepler-law reports
// behind the geomech command-line tool.
//
// Config schema (unknown keys are rejected):
//   system         string, one of list_systems()
//   params         object, name -> number or array of numbers
//   initial_state  array of phase_dim numbers
//   integrator     {method: rk4|verlet|rattle|midpoint, dt, t_end,
//                   record_stride?, solver_tol?, solver_max_iter?}
//   observables    array of observable names (CSV columns), optional
//   output         {csv_path?, stride?}, optional
//   checks         array of {invariant, tolerance, mode?: abs|rel}
//   kepler_laws    {areal, first_law, third_law, hodograph_fit, radius,
//                   power, eps_identity}, optional tolerances
//   seed           integer, reserved
#pragma once

#include "geomech/core.hpp"
#include "geomech/integrators.hpp"
#include "geomech/systems.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace geomech::cli {

using json = nlohmann::json;

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2 };

/// Schema violation, anchored at a field path and a source line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& source, int line, const std::string& field, const std::string& msg)
        : Error(source + ":" + std::to_string(line) + ": " + (field.empty() ? "" : "field '" + field + "': ") + msg),
          field_(field),
          line_(line) {}

    const std::string& field() const { return field_; }
    int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

struct CheckSpec {
    std::string invariant;
    double tolerance;
    std::string mode;  // "abs" or "rel"
};

struct KeplerLawTolerances {
    double areal = 1e-7;
    double first_law = 1e-6;
    double third_law = 1e-4;
    double hodograph_fit = 1e-7;
    double radius = 1e-6;
    double power = 1e-8;
    double eps_identity = 1e-12;
};

struct ScenarioConfig {
    std::string source;
    std::string system;
    ParamMap params;
    VecX initial_state;
    IntegratorConfig integrator;
    std::vector<std::string> observables;
    std::string csv_path;
    int output_stride = 1;
    std::vector<CheckSpec> checks;
    KeplerLawTolerances kepler_laws;
    std::int64_t seed = 0;
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Locates a field path like "integrator.dt" or "checks[1].tolerance" in the
/// raw text by searching each key after the previous one. Falls back to the
/// deepest key found.
inline int locate(const std::string& text, const std::string& path) {
    std::size_t pos = 0;
    int line = 1;
    std::string token;
    auto consume = [&](const std::string& key) {
        const std::string needle = "\"" + key + "\"";
        std::size_t at = text.find(needle, pos);
        while (at != std::string::npos) {
            std::size_t after = at + needle.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
            if (after < text.size() && text[after] == ':') break;
            at = text.find(needle, at + 1);
        }
        if (at == std::string::npos) return false;
        pos = at + needle.size();
        line = line_of_offset(text, at);
        return true;
    };
    for (std::size_t i = 0; i <= path.size(); ++i) {
        const char c = i < path.size() ? path[i] : '.';
        if (c == '.' || c == '[') {
            if (!token.empty() && !consume(token)) return line;
            token.clear();
            if (c == '[') {
                const std::size_t close = path.find(']', i);
                const int index = std::stoi(path.substr(i + 1, close - i - 1));
                // Skip to the index-th element start of the array after pos.
                std::size_t at = text.find('[', pos);
                if (at == std::string::npos) return line;
                int depth = 0, element = 0;
                std::size_t k = at + 1;
                for (; k < text.size() && element < index; ++k) {
                    const char ch = text[k];
                    if (ch == '[' || ch == '{') ++depth;
                    if (ch == ']' || ch == '}') {
                        if (depth == 0) break;
                        --depth;
                    }
                    if (ch == ',' && depth == 0) ++element;
                }
                while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
                pos = k;
                line = line_of_offset(text, k);
                i = close;
            }
        } else {
            token += c;
        }
    }
    return line;
}

class Reader {
public:
    Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
        throw ConfigError(source_, field.empty() ? 1 : locate(text_, field), field, msg);
    }

    void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) const {
        if (!obj.is_object()) fail(where, "must be an object");
        for (const auto& [k, v] : obj.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) fail(where.empty() ? k : where + "." + k, "unknown field");
        }
    }

    double number(const json& v, const std::string& field) const {
        if (!v.is_number()) fail(field, "must be a number");
        return v.get<double>();
    }

    int integer(const json& v, const std::string& field) const {
        if (!v.is_number_integer()) fail(field, "must be an integer");
        return v.get<int>();
    }

    std::string string(const json& v, const std::string& field) const {
        if (!v.is_string()) fail(field, "must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const json& v, const std::string& field) const {
        if (v.is_number()) return {v.get<double>()};
        if (!v.is_array()) fail(field, "must be a number or an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
        return out;
    }

private:
    const std::string& text_;
    std::string source_;
};

}  // namespace detail

/// Parses and validates a scenario, including the registry lookups that can
/// be checked before integrating (system, params, state length, constraint,
/// method support, observable and invariant names).
inline ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>") {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source, detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), "",
                          std::string("invalid JSON: ") + e.what());
    }
    const detail::Reader rd(text, source);
    rd.only_keys(root, "", {"system", "params", "initial_state", "integrator", "observables", "output", "checks",
                            "kepler_laws", "seed"});
    ScenarioConfig cfg;
    cfg.source = source;

    if (!root.contains("system")) rd.fail("system", "missing required field");
    cfg.system = rd.string(root["system"], "system");

    if (root.contains("params")) {
        const json& p = root["params"];
        if (!p.is_object()) rd.fail("params", "must be an object");
        for (const auto& [k, v] : p.items()) cfg.params[k] = rd.numbers(v, "params." + k);
    }

    std::optional<HamiltonianSystem> sys;
    bool known = false;
    for (const auto& info : list_systems()) known = known || info.name == cfg.system;
    if (!known) rd.fail("system", "unknown system '" + cfg.system + "' (see list-systems)");
    try {
        sys.emplace(build_system(cfg.system, cfg.params));
    } catch (const DomainError& e) {
        rd.fail("params", e.what());
    }

    if (!root.contains("initial_state")) rd.fail("initial_state", "missing required field");
    {
        const auto v = rd.numbers(root["initial_state"], "initial_state");
        if (static_cast<int>(v.size()) != sys->phase_dim) {
            rd.fail("initial_state", "expected " + std::to_string(sys->phase_dim) + " coordinates for " + cfg.system +
                                         ", got " + std::to_string(v.size()));
        }
        cfg.initial_state = Eigen::Map<const VecX>(v.data(), static_cast<Eigen::Index>(v.size()));
        if (!cfg.initial_state.allFinite()) rd.fail("initial_state", "coordinates must be finite");
        const double viol = sys->constraint_violation(cfg.initial_state);
        if (viol > 1e-9) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3g", viol);
            rd.fail("initial_state", std::string("violates the system constraint by ") + buf + " (limit 1e-9)");
        }
    }

    if (!root.contains("integrator")) rd.fail("integrator", "missing required field");
    {
        const json& it = root["integrator"];
        rd.only_keys(it, "integrator", {"method", "dt", "t_end", "record_stride", "solver_tol", "solver_max_iter"});
        for (const char* req : {"method", "dt", "t_end"})
            if (!it.contains(req)) rd.fail(std::string("integrator.") + req, "missing required field");
        const std::string m = rd.string(it["method"], "integrator.method");
        const auto method = parse_method(m);
        if (!method) rd.fail("integrator.method", "unknown method '" + m + "' (rk4, verlet, rattle, midpoint)");
        cfg.integrator.method = *method;
        cfg.integrator.dt = rd.number(it["dt"], "integrator.dt");
        cfg.integrator.t_end = rd.number(it["t_end"], "integrator.t_end");
        if (it.contains("record_stride")) cfg.integrator.record_stride = rd.integer(it["record_stride"], "integrator.record_stride");
        if (it.contains("solver_tol")) cfg.integrator.solver_tol = rd.number(it["solver_tol"], "integrator.solver_tol");
        if (it.contains("solver_max_iter")) {
            cfg.integrator.solver_max_iter = rd.integer(it["solver_max_iter"], "integrator.solver_max_iter");
        }
        try {
            cfg.integrator.validate();
        } catch (const DomainError& e) {
            const std::string w = e.what();
            std::string field = "integrator";
            for (const char* f : {"dt", "t_end", "record_stride", "solver_tol", "solver_max_iter"}) {
                if (w.find(std::string(f) + " ") != std::string::npos) {
                    field += std::string(".") + f;
                    break;
                }
            }
            rd.fail(field, w);
        }
        try {
            check_method_supported(sys->dynamics(), cfg.integrator.method);
        } catch (const DomainError& e) {
            rd.fail("integrator.method", e.what());
        }
    }

    if (root.contains("observables")) {
        const json& o = root["observables"];
        if (!o.is_array()) rd.fail("observables", "must be an array of names");
        for (std::size_t i = 0; i < o.size(); ++i) {
            const std::string f = "observables[" + std::to_string(i) + "]";
            const std::string name = rd.string(o[i], f);
            if (!sys->find_observable(name)) rd.fail(f, "unknown observable '" + name + "' for " + cfg.system);
            cfg.observables.push_back(name);
        }
    }

    if (root.contains("output")) {
        const json& o = root["output"];
        rd.only_keys(o, "output", {"csv_path", "stride"});
        if (o.contains("csv_path")) cfg.csv_path = rd.string(o["csv_path"], "output.csv_path");
        if (o.contains("stride")) {
            cfg.output_stride = rd.integer(o["stride"], "output.stride");
            if (cfg.output_stride < 1) rd.fail("output.stride", "must be >= 1");
        }
    }

    if (root.contains("checks")) {
        const json& c = root["checks"];
        if (!c.is_array()) rd.fail("checks", "must be an array");
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::string f = "checks[" + std::to_string(i) + "]";
            rd.only_keys(c[i], f, {"invariant", "tolerance", "mode"});
            if (!c[i].contains("invariant")) rd.fail(f + ".invariant", "missing required field");
            if (!c[i].contains("tolerance")) rd.fail(f + ".tolerance", "missing required field");
            CheckSpec spec{rd.string(c[i]["invariant"], f + ".invariant"), rd.number(c[i]["tolerance"], f + ".tolerance"),
                           "abs"};
            if (!sys->find_invariant(spec.invariant)) {
                rd.fail(f + ".invariant", "unknown invariant '" + spec.invariant + "' for " + cfg.system);
            }
            if (!(spec.tolerance >= 0.0)) rd.fail(f + ".tolerance", "must be non-negative");
            if (c[i].contains("mode")) {
                spec.mode = rd.string(c[i]["mode"], f + ".mode");
                if (spec.mode != "abs" && spec.mode != "rel") rd.fail(f + ".mode", "must be 'abs' or 'rel'");
            }
            cfg.checks.push_back(spec);
        }
    }

    if (root.contains("kepler_laws")) {
        const json& k = root["kepler_laws"];
        rd.only_keys(k, "kepler_laws", {"areal", "first_law", "third_law", "hodograph_fit", "radius", "power", "eps_identity"});
        auto get = [&](const char* key, double& dst) {
            if (k.contains(key)) dst = rd.number(k[key], std::string("kepler_laws.") + key);
        };
        get("areal", cfg.kepler_laws.areal);
        get("first_law", cfg.kepler_laws.first_law);
        get("third_law", cfg.kepler_laws.third_law);
        get("hodograph_fit", cfg.kepler_laws.hodograph_fit);
        get("radius", cfg.kepler_laws.radius);
        get("power", cfg.kepler_laws.power);
        get("eps_identity", cfg.kepler_laws.eps_identity);
    }

    if (root.contains("seed")) {
        if (!root["seed"].is_number_integer()) rd.fail("seed", "must be an integer");
        cfg.seed = root["seed"].get<std::int64_t>();
    }
    return cfg;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, 0, "", "cannot read config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ScenarioConfig load_config(const std::string& path) { return parse_config(read_file(path), path); }

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct RunResult {
    HamiltonianSystem system;
    Trajectory trajectory;
    std::optional<std::string> failure;  // set when integration stopped early
    double failure_time = 0.0;
};

inline RunResult run_scenario(const ScenarioConfig& cfg) {
    HamiltonianSystem sys = build_system(cfg.system, cfg.params);
    std::vector<Observable> obs;
    for (const auto& name : cfg.observables) obs.push_back(*sys.find_observable(name));
    try {
        Trajectory traj = integrate(sys.dynamics(), cfg.initial_state, cfg.integrator, obs);
        return {std::move(sys), std::move(traj), std::nullopt, 0.0};
    } catch (const IntegrationError& e) {
        return {std::move(sys), e.partial(), std::string(e.what()), e.time()};
    }
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Header t,<state>,<observables>; every value with 17 significant digits.
inline void write_csv(std::ostream& out, const HamiltonianSystem& sys, const Trajectory& traj, int stride = 1) {
    out << "t";
    for (const auto& n : sys.state_names) out << ',' << n;
    for (const auto& s : traj.observables()) out << ',' << s.name;
    out << '\n';
    for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(stride)) {
        out << format_double(traj.times()[i]);
        const VecX& z = traj.states()[i];
        for (Eigen::Index k = 0; k < z.size(); ++k) out << ',' << format_double(z[k]);
        for (const auto& s : traj.observables()) out << ',' << format_double(s.values[i]);
        out << '\n';
    }
}

inline json invariant_report(const ScenarioConfig& cfg, const RunResult& res, double runtime_seconds) {
    json report;
    report["system"] = cfg.system;
    report["checks"] = json::array();
    bool all = !res.failure.has_value();
    for (const auto& c : cfg.checks) {
        const Invariant* inv = res.system.find_invariant(c.invariant);
        const VecX v0 = inv->eval(res.trajectory.states().front());
        double drift = 0.0;
        for (const auto& z : res.trajectory.states()) drift = std::max(drift, (inv->eval(z) - v0).cwiseAbs().maxCoeff());
        const double scale = v0.cwiseAbs().maxCoeff();
        const double rel = scale > 0.0 ? drift / scale : drift;
        const bool pass = (c.mode == "rel" ? rel : drift) <= c.tolerance && std::isfinite(drift);
        all = all && pass;
        report["checks"].push_back({{"name", c.invariant},
                                    {"initial_values", std::vector<double>(v0.data(), v0.data() + v0.size())},
                                    {"max_abs_drift", drift},
                                    {"rel_drift", rel},
                                    {"tolerance", c.tolerance},
                                    {"mode", c.mode},
                                    {"pass", pass}});
    }
    if (res.failure) {
        report["integration_failure"] = *res.failure;
        report["integration_failure_time"] = res.failure_time;
    }
    report["samples"] = res.trajectory.size();
    report["pass"] = all;
    report["runtime_seconds"] = runtime_seconds;
    return report;
}

/// Kepler-law summary; "pass" is false when any residual exceeds its
/// tolerance.
inline json kepler_laws_report(const ScenarioConfig& cfg, const RunResult& res) {
    const double m = cfg.params.count("m") ? cfg.params.at("m")[0] : 1.0;
    const double k = cfg.params.count("k") ? cfg.params.at("k")[0] : 1.0;
    const KeplerDiagnostics d = kepler_diagnostics(res.trajectory, m, k, true);
    const ConicFit conic = fit_orbit_conic(res.trajectory);
    const auto areal = areal_velocity_series(res.trajectory, m);
    double areal_dev = 0.0;
    for (double a : areal) areal_dev = std::max(areal_dev, std::abs(a - d.Omega) / d.Omega);

    const double c = d.hodograph_center.norm();
    const double power = std::abs(2.0 * m * d.H - c * c + d.hodograph_radius * d.hodograph_radius);
    const double radius_mismatch = std::abs(d.hodograph_radius - m * m * k / d.Omega);
    const double eps_identity = std::abs(d.eps * d.eps - 1.0 - 2.0 * d.Omega * d.Omega * d.H / (m * m * m * k * k));
    const double third = third_law_residual(*d.period, *d.a_semi, k);
    const double eps_mismatch = std::abs(conic.eps - d.eps);
    const auto& tol = cfg.kepler_laws;

    json r;
    r["Omega"] = d.Omega;
    r["H"] = d.H;
    r["eps"] = d.eps;
    r["eps_vec"] = {d.eps_vec.x(), d.eps_vec.y(), d.eps_vec.z()};
    r["semi_latus"] = d.semi_latus;
    r["a_semi"] = *d.a_semi;
    r["a_semi_predicted"] = m * k / (2.0 * std::abs(d.H));
    r["T_measured"] = *d.period;
    r["T_predicted"] = 2.0 * std::numbers::pi * std::pow(*d.a_semi, 1.5) / std::sqrt(k);
    r["third_law_residual"] = third;
    r["eps_identity_residual"] = eps_identity;
    r["first_law"] = {{"semi_latus_fit", conic.semi_latus},
                      {"eps_fit", conic.eps},
                      {"max_rel_residual", conic.max_rel_residual},
                      {"eps_mismatch", eps_mismatch}};
    r["hodograph"] = {{"R", d.hodograph_radius},
                      {"R_predicted", m * m * k / d.Omega},
                      {"radius_mismatch", radius_mismatch},
                      {"c", c},
                      {"center", {d.hodograph_center.x(), d.hodograph_center.y(), d.hodograph_center.z()}},
                      {"fit_residual", d.hodograph_fit_residual},
                      {"power_residual", power}};
    r["areal"] = {{"max_rel_deviation", areal_dev}};
    r["perihelion_passages"] = d.perihelion_passages;
    r["out_of_plane"] = d.out_of_plane;

    json fails = json::array();
    auto gate = [&](const char* name, double value, double limit) {
        if (!(value <= limit)) fails.push_back({{"name", name}, {"value", value}, {"tolerance", limit}});
    };
    gate("areal", areal_dev, tol.areal);
    gate("first_law", conic.max_rel_residual, tol.first_law);
    gate("first_law_eps", eps_mismatch, tol.first_law);
    gate("third_law", third, tol.third_law);
    gate("hodograph_fit", d.hodograph_fit_residual, tol.hodograph_fit * d.hodograph_radius);
    gate("radius", radius_mismatch, tol.radius);
    gate("power", power, tol.power);
    gate("eps_identity", eps_identity, tol.eps_identity);
    r["failures"] = fails;
    r["pass"] = fails.empty();
    return r;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct Outputs {
    std::string out;     // CSV path override
    std::string report;  // report path
};

namespace detail {

inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty() || path == "-") {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << text;
}

inline void emit_csv(const ScenarioConfig& cfg, const RunResult& res, const std::string& override_path, bool required,
                     std::ostream& out) {
    const std::string path = override_path.empty() ? cfg.csv_path : override_path;
    if (path.empty() && !required) return;
    std::ostringstream ss;
    write_csv(ss, res.system, res.trajectory, cfg.output_stride);
    write_text(path, ss.str(), out);
}

inline int report_failure(const RunResult& res, std::ostream& err) {
    err << "error: integration stopped: " << *res.failure << "; output truncated after " << res.trajectory.size()
        << " samples (last t = " << format_double(res.trajectory.times().back()) << ")\n";
    return kFailure;
}

}  // namespace detail

inline int cmd_run(const std::string& config_path, const Outputs& o, std::ostream& out, std::ostream& err) {
    try {
        const ScenarioConfig cfg = load_config(config_path);
        const RunResult res = run_scenario(cfg);
        detail::emit_csv(cfg, res, o.out, true, out);
        if (res.failure) return detail::report_failure(res, err);
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

inline int cmd_check(const std::string& config_path, const Outputs& o, std::ostream& out, std::ostream& err) {
    try {
        const ScenarioConfig cfg = load_config(config_path);
        if (cfg.checks.empty()) {
            throw ConfigError(cfg.source, detail::locate(read_file(config_path), "checks"), "checks",
                              "check needs at least one declared check");
        }
        const auto start = std::chrono::steady_clock::now();
        const RunResult res = run_scenario(cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        detail::emit_csv(cfg, res, o.out, false, out);
        const json report = invariant_report(cfg, res, secs);
        detail::write_text(o.report, report.dump(2) + "\n", out);
        if (res.failure) detail::report_failure(res, err);
        for (const auto& c : report["checks"])
            if (!c["pass"].get<bool>()) err << "check failed: " << c["name"].get<std::string>() << '\n';
        return report["pass"].get<bool>() ? kOk : kFailure;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

inline int cmd_kepler_laws(const std::string& config_path, const Outputs& o, std::ostream& out, std::ostream& err) {
    try {
        const std::string text = read_file(config_path);
        const ScenarioConfig cfg = parse_config(text, config_path);
        if (cfg.system != "kepler") {
            throw ConfigError(cfg.source, detail::locate(text, "system"), "system", "kepler-laws needs the kepler system");
        }
        const double m = cfg.params.count("m") ? cfg.params.at("m")[0] : 1.0;
        const double k = cfg.params.count("k") ? cfg.params.at("k")[0] : 1.0;
        const VecX& z0 = cfg.initial_state;
        const double H0 = kepler_hamiltonian(z0.head<3>(), z0.tail<3>(), m, k);
        if (!(H0 < 0.0)) {
            throw ConfigError(cfg.source, detail::locate(text, "initial_state"), "initial_state",
                              "initial data is not elliptic (H = " + format_double(H0) +
                                  " >= 0); period and semi-major axis are undefined");
        }
        if (Vec3(z0.head<3>()).cross(Vec3(z0.tail<3>())).norm() == 0.0) {
            throw ConfigError(cfg.source, detail::locate(text, "initial_state"), "initial_state",
                              "x and p are collinear (Omega = 0)");
        }
        const RunResult res = run_scenario(cfg);
        detail::emit_csv(cfg, res, o.out, false, out);
        if (res.failure) return detail::report_failure(res, err);
        const json report = kepler_laws_report(cfg, res);
        detail::write_text(o.report, report.dump(2) + "\n", out);
        for (const auto& f : report["failures"])
            err << "law residual above tolerance: " << f["name"].get<std::string>() << '\n';
        return report["pass"].get<bool>() ? kOk : kFailure;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

inline int cmd_list_systems(std::ostream& out) {
    for (const auto& info : list_systems()) {
        const HamiltonianSystem sys = build_system(info.name);
        out << info.name << ": " << info.description << "\n  state:";
        for (const auto& s : sys.state_names) out << ' ' << s;
        out << "\n  observables:";
        for (const auto& s : sys.observables) out << ' ' << s.name;
        out << "\n  invariants:";
        for (const auto& s : sys.invariants) out << ' ' << s.name;
        out << '\n';
    }
    return kOk;
}

}  // namespace geomech::cli
