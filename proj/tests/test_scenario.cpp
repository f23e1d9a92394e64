#include "geomech/scenario.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

using namespace geomech;
using namespace geomech::cli;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out, err;
};

class Workdir {
public:
    Workdir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("geomech_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Workdir() { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name), std::ios::binary) << text;
        return path(name);
    }

    CliResult cli(const std::string& args) const {
        const std::string cmd = std::string(GEOMECH_CLI_PATH) + " " + args + " > " + path("stdout") + " 2> " + path("stderr");
        const int status = std::system(cmd.c_str());
        return {WEXITSTATUS(status), slurp(path("stdout")), slurp(path("stderr"))};
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

private:
    fs::path dir_;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::istringstream cs(line);
        std::string cell;
        while (std::getline(cs, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const char* kKeplerMinimal = R"({
  "system": "kepler",
  "initial_state": [1, 0, 0, 0, 1, 0],
  "integrator": {"method": "verlet", "dt": 0.01, "t_end": 0.01}
})";

std::string kepler_checks(double tol) {
    std::ostringstream s;
    s << R"({
  "system": "kepler",
  "params": {"m": 1, "k": 1},
  "initial_state": [1, 0, 0, 0, 1.2, 0],
  "integrator": {"method": "verlet", "dt": 1e-4, "t_end": 75, "record_stride": 10},
  "checks": [
    {"invariant": "energy", "tolerance": )"
      << tol << R"(},
    {"invariant": "angular_momentum", "tolerance": )"
      << tol << R"(},
    {"invariant": "eccentricity_vector", "tolerance": )"
      << tol << R"(}
  ]
})";
    return s.str();
}

std::string kepler_laws_config(const std::string& state) {
    return R"({
  "system": "kepler",
  "initial_state": )" +
           state + R"(,
  "integrator": {"method": "verlet", "dt": 1e-4, "t_end": 50, "record_stride": 10}
})";
}

/// Line of the first occurrence of `needle` in text, 1-based.
int line_of(const std::string& text, const std::string& needle) {
    const auto at = text.find(needle);
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(at), '\n'));
}

void expect_config_error(const std::string& text, const std::string& field, const std::string& anchor) {
    try {
        parse_config(text, "cfg.json");
        ADD_FAILURE() << "expected a config error naming " << field;
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), field) << e.what();
        EXPECT_NE(std::string(e.what()).find("'" + field + "'"), std::string::npos) << e.what();
        EXPECT_EQ(e.line(), line_of(text, anchor)) << e.what();
    }
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto at = s.find(from);
    EXPECT_NE(at, std::string::npos) << from;
    return s.replace(at, from.size(), to);
}

}  // namespace

TEST(ParseConfig, MinimalAndDefaults) {
    const auto cfg = parse_config(kKeplerMinimal);
    EXPECT_EQ(cfg.system, "kepler");
    EXPECT_EQ(cfg.integrator.method, Method::Verlet);
    EXPECT_EQ(cfg.integrator.steps(), 1);
    EXPECT_EQ(cfg.output_stride, 1);
    EXPECT_TRUE(cfg.checks.empty());
    EXPECT_EQ(cfg.kepler_laws.power, 1e-8);
}

TEST(ParseConfig, ErrorsNameTheFieldAndLine) {
    const std::string base = R"({
  "system": "spherical_pendulum",
  "params": {"R": 1},
  "initial_state": [0, 0, -1, 0.5, 0, 0],
  "integrator": {"method": "rattle", "dt": 0.001, "t_end": 1},
  "observables": ["energy", "j1"],
  "checks": [{"invariant": "energy", "tolerance": 1e-6}]
})";
    EXPECT_NO_THROW(parse_config(base));
    expect_config_error(replace(base, "\"spherical_pendulum\"", "\"double_pendulum\""), "system", "\"system\"");
    expect_config_error(replace(base, "[0, 0, -1, 0.5, 0, 0]", "[0, 0, -1, 0.5, 0]"), "initial_state", "\"initial_state\"");
    expect_config_error(replace(base, "[0, 0, -1, 0.5, 0, 0]", "[0, 0, -1.00001, 0.5, 0, 0]"), "initial_state",
                        "\"initial_state\"");
    expect_config_error(replace(base, "[0, 0, -1, 0.5, 0, 0]", "[0, 0, -1, 0, 0, 0.5]"), "initial_state", "\"initial_state\"");
    expect_config_error(replace(base, "\"dt\": 0.001", "\"dt\": -0.001"), "integrator.dt", "\"dt\"");
    expect_config_error(replace(base, "\"rattle\"", "\"verlet\""), "integrator.method", "\"method\"");
    expect_config_error(replace(base, "\"rattle\"", "\"euler\""), "integrator.method", "\"method\"");
    expect_config_error(replace(base, "\"j1\"]", "\"j2\"]"), "observables[1]", "\"j2\"");
    expect_config_error(replace(base, "\"invariant\": \"energy\"", "\"invariant\": \"momentum\""), "checks[0].invariant",
                        "\"invariant\"");
    expect_config_error(replace(base, "\"tolerance\": 1e-6}", "\"tolerance\": 1e-6, \"mode\": \"max\"}"), "checks[0].mode",
                        "\"invariant\"");
    expect_config_error(replace(base, "\"params\": {\"R\": 1}", "\"params\": {\"R\": -1}"), "params", "\"params\"");
    expect_config_error(replace(base, "\"params\"", "\"parameters\""), "parameters", "\"parameters\"");
    expect_config_error(replace(base, "\"t_end\": 1}", "\"t_end\": 1, \"order\": 2}"), "integrator.order",
                        "\"integrator\"");
}

TEST(ParseConfig, InvalidJsonReportsLine) {
    try {
        parse_config("{\n  \"system\": \"kepler\",\n  oops\n}", "bad.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3) << e.what();
        EXPECT_NE(std::string(e.what()).find("bad.json:3"), std::string::npos);
    }
}

TEST(Csv, FormatAndRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
    const auto sys = build_system("kepler");
    Trajectory traj({{"r", [](const VecX& z) { return z.head<3>().norm(); }}});
    traj.record(0.0, testsupport::eccentric_kepler0());
    traj.record(0.5, testsupport::circular_kepler(0.5));
    std::ostringstream out;
    write_csv(out, sys, traj);
    const auto rows = parse_csv(out.str());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "x1", "x2", "x3", "p1", "p2", "p3", "r"}));
    EXPECT_EQ(std::stod(rows[2][1]), std::cos(0.5));
}

TEST(Cli, MinimalRunWritesTwoRows) {
    Workdir w;
    const auto cfg = w.write("min.json", kKeplerMinimal);
    const auto r = w.cli("run --config " + cfg + " --out " + w.path("out.csv"));
    EXPECT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(Workdir::slurp(w.path("out.csv")));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][0], "0");
    EXPECT_EQ(rows[2][0], "0.01");
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, DeterministicCsv) {
    Workdir w;
    const auto cfg = w.write("det.json", R"({
  "system": "heavy_top",
  "initial_state": [0.4, -0.3, 0.6, 0.3, 0.1, -0.9],
  "integrator": {"method": "midpoint", "dt": 1e-3, "t_end": 2},
  "observables": ["energy", "ps_norm2", "pi_dot_ps"]
})");
    ASSERT_EQ(w.cli("run --config " + cfg + " --out " + w.path("a.csv")).code, 0);
    ASSERT_EQ(w.cli("run --config " + cfg + " --out " + w.path("b.csv")).code, 0);
    const auto a = Workdir::slurp(w.path("a.csv"));
    EXPECT_GT(a.size(), 1000u);
    EXPECT_EQ(a, Workdir::slurp(w.path("b.csv")));
}

TEST(Cli, CsvObservablesReproducedFromStateColumns) {
    Workdir w;
    const auto cfg = w.write("rt.json", R"({
  "system": "kepler",
  "initial_state": [1, 0, 0, 0, 1.2, 0],
  "integrator": {"method": "rk4", "dt": 1e-2, "t_end": 3},
  "observables": ["energy", "L3", "eps1", "eps2", "r", "lambda"],
  "output": {"stride": 7}
})");
    ASSERT_EQ(w.cli("run --config " + cfg + " --out " + w.path("rt.csv")).code, 0);
    const auto rows = parse_csv(Workdir::slurp(w.path("rt.csv")));
    const auto sys = build_system("kepler");
    ASSERT_EQ(rows.size(), 1u + (300 + 6) / 7);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        VecX z(6);
        for (int k = 0; k < 6; ++k) z[k] = std::stod(rows[i][1 + k]);
        for (std::size_t c = 7; c < rows[0].size(); ++c) {
            EXPECT_EQ(format_double(sys.find_observable(rows[0][c])->eval(z)), rows[i][c]) << rows[0][c];
        }
    }
}

TEST(Cli, ConfigErrorsExitTwo) {
    Workdir w;
    const auto bad_system = w.write("sys.json", replace(kKeplerMinimal, "\"kepler\"", "\"keplr\""));
    auto r = w.cli("run --config " + bad_system);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("field 'system'"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("sys.json:2"), std::string::npos) << r.err;

    const auto off = w.write("pend.json", R"({
  "system": "spherical_pendulum",
  "initial_state": [0, 0, -1.000001, 0, 0.5, 0],
  "integrator": {"method": "rattle", "dt": 1e-3, "t_end": 1}
})");
    r = w.cli("run --config " + off);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("field 'initial_state'"), std::string::npos) << r.err;

    EXPECT_EQ(w.cli("run --config " + w.path("missing.json")).code, 2);
    EXPECT_EQ(w.cli("run").code, 2);
    EXPECT_EQ(w.cli("fly --config " + bad_system).code, 2);
}

TEST(Cli, CheckPassFailAndEmpty) {
    Workdir w;
    const auto good = w.write("good.json", kepler_checks(1e-6));
    auto r = w.cli("check --config " + good + " --report " + w.path("rep.json"));
    EXPECT_EQ(r.code, 0) << r.err;
    const auto rep = json::parse(Workdir::slurp(w.path("rep.json")));
    EXPECT_TRUE(rep["pass"].get<bool>());
    ASSERT_EQ(rep["checks"].size(), 3u);
    for (const auto& c : rep["checks"]) {
        EXPECT_TRUE(c["pass"].get<bool>());
        EXPECT_LT(c["max_abs_drift"].get<double>(), 1e-6);
        for (const char* key : {"name", "initial_values", "rel_drift", "tolerance"}) EXPECT_TRUE(c.contains(key)) << key;
    }
    EXPECT_EQ(rep["checks"][2]["initial_values"][0].get<double>(), eccentricity_vector(Vec3(1, 0, 0), Vec3(0, 1.2, 0), 1, 1).x());
    EXPECT_TRUE(rep.contains("runtime_seconds"));

    const auto tight = w.write("tight.json", kepler_checks(1e-18));
    r = w.cli("check --config " + tight + " --report " + w.path("rep2.json"));
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(json::parse(Workdir::slurp(w.path("rep2.json")))["pass"].get<bool>());

    const auto empty = w.write("empty.json", replace(kKeplerMinimal, "\n}", ",\n  \"checks\": []\n}"));
    r = w.cli("check --config " + empty);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("field 'checks'"), std::string::npos) << r.err;
}

TEST(Cli, KeplerLaws) {
    Workdir w;
    const auto ecc = w.write("ecc.json", kepler_laws_config("[1, 0, 0, 0, 1.2, 0]"));
    auto r = w.cli("kepler-laws --config " + ecc + " --report " + w.path("k.json"));
    EXPECT_EQ(r.code, 0) << r.err;
    const auto k = json::parse(Workdir::slurp(w.path("k.json")));
    EXPECT_LT(k["third_law_residual"].get<double>(), 1e-4);
    EXPECT_LT(k["hodograph"]["power_residual"].get<double>(), 1e-8);
    EXPECT_NEAR(k["Omega"].get<double>(), 1.2, 1e-15);
    EXPECT_NEAR(k["H"].get<double>(), -0.28, 1e-15);
    for (const char* key : {"eps", "semi_latus", "a_semi", "T_measured", "areal"}) EXPECT_TRUE(k.contains(key)) << key;

    const auto circ = w.write("circ.json", kepler_laws_config("[1, 0, 0, 0, 1, 0]"));
    r = w.cli("kepler-laws --config " + circ + " --report " + w.path("c.json"));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_LT(json::parse(Workdir::slurp(w.path("c.json")))["eps"].get<double>(), 1e-10);

    const auto hyper = w.write("hyp.json", kepler_laws_config("[1, 0, 0, 0, 1.6, 0]"));
    r = w.cli("kepler-laws --config " + hyper);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("not elliptic"), std::string::npos) << r.err;

    const auto strict = w.write("strict.json", replace(kepler_laws_config("[1, 0, 0, 0, 1.2, 0]"), "\n}",
                                                      ",\n  \"kepler_laws\": {\"power\": 1e-20}\n}"));
    r = w.cli("kepler-laws --config " + strict + " --report " + w.path("s.json"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("power"), std::string::npos) << r.err;

    const auto pend = w.write("pend.json", R"({
  "system": "spherical_pendulum",
  "initial_state": [0, 0, -1, 0.5, 0, 0],
  "integrator": {"method": "rattle", "dt": 1e-3, "t_end": 1}
})");
    EXPECT_EQ(w.cli("kepler-laws --config " + pend).code, 2);
}

TEST(Cli, SolverFailureExitsOneWithPartialCsv) {
    Workdir w;
    const auto cfg = w.write("fail.json", R"({
  "system": "kepler",
  "initial_state": [1, 0, 0, 0, 0.05, 0],
  "integrator": {"method": "midpoint", "dt": 0.05, "t_end": 5, "solver_max_iter": 4}
})");
    const auto r = w.cli("run --config " + cfg + " --out " + w.path("p.csv"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("truncated"), std::string::npos) << r.err;
    const auto rows = parse_csv(Workdir::slurp(w.path("p.csv")));
    EXPECT_GT(rows.size(), 2u);
    EXPECT_LT(std::stod(rows.back()[0]), 5.0);
}

TEST(Cli, ListSystemsAndBatch) {
    Workdir w;
    auto r = w.cli("list-systems");
    EXPECT_EQ(r.code, 0);
    for (const auto& info : list_systems()) EXPECT_NE(r.out.find(info.name + ":"), std::string::npos);

    const std::string a = replace(kepler_checks(1e-6), "\"checks\"", "\"output\": {\"csv_path\": \"" + w.path("a.csv") + "\"},\n  \"checks\"");
    const std::string b = replace(a, w.path("a.csv"), w.path("b.csv"));
    const auto ca = w.write("a.json", a), cb = w.write("b.json", b);
    r = w.cli("check --jobs 2 --config " + ca + " --config " + cb);
    EXPECT_EQ(r.code, 0) << r.err;
    const auto csv_a = Workdir::slurp(w.path("a.csv"));
    EXPECT_FALSE(csv_a.empty());
    EXPECT_EQ(csv_a, Workdir::slurp(w.path("b.csv")));
}
