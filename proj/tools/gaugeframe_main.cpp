// gaugeframe: run a scenario file against a constrained-system model.
//
// Usage: gaugeframe <config-path> [--tol X] [--output DIR] [--command NAME]
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numeric domain error.

#include <exception>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"

#include "gaugeframe/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Numerical gauge reduction of constrained Hamiltonian systems"};

    std::string config_path;
    std::string output_dir = ".";
    std::string command_override;
    double tol_override = 0.0;

    app.add_option("config", config_path, "Scenario file (JSON)")->required();
    app.add_option("--tol", tol_override,
                   "Override the relative integration tolerance");
    app.add_option("--output", output_dir,
                   "Directory for output artifacts (default: current directory)");
    app.add_option("--command", command_override,
                   "Override the run command from the scenario file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        gaugeframe::Scenario scenario = gaugeframe::load_scenario_file(config_path);
        if (!command_override.empty()) {
            static const std::set<std::string> commands = {"reduce", "evolve",
                                                           "rrft", "orbit",
                                                           "verify"};
            if (commands.find(command_override) == commands.end()) {
                throw gaugeframe::ConfigError("--command: unknown command '" +
                                              command_override + "'");
            }
            scenario.run.command = command_override;
        }
        if (tol_override != 0.0) {
            if (tol_override <= 0.0) {
                throw gaugeframe::ConfigError("--tol: must be positive");
            }
            scenario.numerics.rtol = tol_override;
        }
        const gaugeframe::RunResult result =
            gaugeframe::run_scenario(scenario, output_dir);
        return result.exit_code;
    } catch (const gaugeframe::ConfigError& e) {
        std::cerr << "gaugeframe: configuration error: " << e.what() << "\n";
        return 2;
    } catch (const gaugeframe::NumericError& e) {
        std::cerr << "gaugeframe: numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "gaugeframe: configuration error: " << e.what() << "\n";
        return 2;
    }
}
