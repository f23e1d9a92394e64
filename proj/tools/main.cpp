#include "geomech/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

using namespace geomech::cli;

namespace {

using Command = int (*)(const std::string&, const Outputs&, std::ostream&, std::ostream&);

// Independent scenarios on a small thread pool; per-scenario output is
// buffered so streams do not interleave.
int run_batch(Command cmd, const std::vector<std::string>& configs, const Outputs& o, int jobs) {
    if (configs.size() == 1) return cmd(configs[0], o, std::cout, std::cerr);
    std::vector<int> codes(configs.size(), 0);
    std::vector<std::string> outs(configs.size()), errs(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            std::ostringstream out, err;
            codes[i] = cmd(configs[i], o, out, err);
            outs[i] = out.str();
            errs[i] = err.str();
        }
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    int worst = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::cout << outs[i];
        if (!errs[i].empty()) std::cerr << configs[i] << ": " << errs[i];
        worst = std::max(worst, codes[i]);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geomech: Hamiltonian, Lie-Poisson and reduced mechanics scenarios"};
    app.require_subcommand(1);

    std::vector<std::string> configs;
    Outputs o;
    int jobs = 1;
    long long seed = 0;

    auto add_common = [&](CLI::App* sub, bool report) {
        sub->add_option("--config", configs, "scenario JSON file (repeatable for batch mode)")->required();
        sub->add_option("--out", o.out, "CSV output path (overrides output.csv_path; '-' for stdout)");
        if (report) sub->add_option("--report", o.report, "report JSON path (stdout when omitted)");
        sub->add_option("--jobs", jobs, "number of scenarios run concurrently")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "reserved; no component is stochastic");
    };

    CLI::App* run = app.add_subcommand("run", "integrate a scenario and write its CSV trajectory");
    add_common(run, false);
    CLI::App* check = app.add_subcommand("check", "integrate and evaluate the declared invariant checks");
    add_common(check, true);
    CLI::App* kepler = app.add_subcommand("kepler-laws", "measure Kepler's laws on a kepler scenario");
    add_common(kepler, true);
    CLI::App* list = app.add_subcommand("list-systems", "print the built-in systems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    if (configs.size() > 1 && (!o.out.empty() || !o.report.empty())) {
        std::cerr << "config error: --out and --report need a single --config\n";
        return kConfigError;
    }
    if (*list) return cmd_list_systems(std::cout);
    if (*run) return run_batch(cmd_run, configs, o, jobs);
    if (*check) return run_batch(cmd_check, configs, o, jobs);
    if (*kepler) return run_batch(cmd_kepler_laws, configs, o, jobs);
    return kConfigError;
}
