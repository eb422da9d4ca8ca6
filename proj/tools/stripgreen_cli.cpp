// Batch front end: `stripgreen run <scenario.ini> --out <dir>` and `stripgreen selftest`.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stripgreen/cli/run.hpp"
#include "stripgreen/cli/scenario.hpp"
#include "stripgreen/selftest.hpp"

int main(int argc, char** argv) {
    namespace cli = stripgreen::cli;
    CLI::App app{"Green-function solver for the integro-differential strip problem"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, grid;
    std::vector<std::string> overrides;
    auto* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("scenario", scenario_path, "scenario file (flat section.key = value)")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--grid", grid, "grid override nx,nt");
    run->add_option("--override", overrides, "section.key=value override (repeatable)");

    auto* self = app.add_subcommand("selftest", "run the acceptance checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kExitValidation;
    }

    if (self->parsed()) return stripgreen::selftest::run_all(std::cout) ? cli::kExitPass : cli::kExitNumerical;

    std::vector<std::string> all;
    if (!grid.empty()) {
        const auto comma = grid.find(',');
        if (comma == std::string::npos) {
            std::cerr << "error: --grid expects nx,nt\n";
            return cli::kExitValidation;
        }
        all.push_back("grid.nx=" + grid.substr(0, comma));
        all.push_back("grid.nt=" + grid.substr(comma + 1));
    }
    all.insert(all.end(), overrides.begin(), overrides.end());

    cli::Scenario sc;
    try {
        sc = cli::parse_scenario(scenario_path, all);
    } catch (const cli::ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code();
    }
    return cli::run_scenario(sc, out_dir, std::cerr);
}
