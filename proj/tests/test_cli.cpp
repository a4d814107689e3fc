#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() /
                         ("gaugeframe_cli_" + std::to_string(::getpid()) + "_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const Json& config) {
    const fs::path path = dir / "scenario.json";
    std::ofstream out(path);
    out << config.dump(2) << "\n";
    return path;
}

int run_cli(const std::string& arguments,
            const std::string& env = "GAUGEFRAME_LOG=quiet") {
    const std::string command = env + " \"" GAUGEFRAME_CLI_PATH "\" " + arguments +
                                " >/dev/null 2>/dev/null";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Json toy_verify_config() {
    return Json{{"model", {{"kind", "linear_toy"}}},
                {"run", {{"command", "verify"}}}};
}

Json toy_evolve_config() {
    return Json{{"model", {{"kind", "linear_toy"}}},
                {"run", {{"command", "evolve"}, {"frame", "direct"},
                         {"times", {0.0, 1.0}}, {"initial", {0.2, 0.5}},
                         {"samples", 5}, {"output", "evo.csv"}}}};
}

}  // namespace

TEST_CASE("a passing verification exits with code 0") {
    const fs::path dir = fresh_dir("ok");
    const fs::path config = write_config(dir, toy_verify_config());
    const int code = run_cli(config.string() + " --output " + dir.string());
    REQUIRE(code == 0);
    REQUIRE(fs::exists(dir / "verification.json"));

    Json report;
    std::ifstream in(dir / "verification.json");
    in >> report;
    REQUIRE(report["overall_pass"].get<bool>());
}

TEST_CASE("configuration problems exit with code 2") {
    const fs::path dir = fresh_dir("config_errors");

    REQUIRE(run_cli((dir / "missing.json").string()) == 2);

    const fs::path invalid = dir / "invalid.json";
    std::ofstream(invalid) << "{ definitely not json";
    REQUIRE(run_cli(invalid.string()) == 2);

    Json unknown = toy_verify_config();
    unknown["model"]["kind"] = "perpetuum_mobile";
    REQUIRE(run_cli(write_config(dir, unknown).string()) == 2);

    REQUIRE(run_cli("") == 2);  // missing required argument
}

TEST_CASE("an unknown log level exits with code 2") {
    const fs::path dir = fresh_dir("bad_env");
    const fs::path config = write_config(dir, toy_verify_config());
    const int code = run_cli(config.string() + " --output " + dir.string(),
                             "GAUGEFRAME_LOG=bogus");
    REQUIRE(code == 2);
}

TEST_CASE("numeric domain violations exit with code 3") {
    const fs::path dir = fresh_dir("domain");
    // a spatial-frame state below the mass threshold has no solved momentum
    Json config;
    config["model"] = {{"kind", "relativistic_particle"}, {"dim", 1}, {"mass", 1.0}};
    config["run"] = {{"command", "evolve"}, {"frame", "spatial"},
                     {"times", {0.0, 1.0}}, {"initial", {0.3, -0.5}},
                     {"samples", 3}};
    const int code =
        run_cli(write_config(dir, config).string() + " --output " + dir.string());
    REQUIRE(code == 3);
}

TEST_CASE("a failing verification exits with code 1") {
    const fs::path dir = fresh_dir("fail");
    // with error control this loose the transport misses the closed-form
    // oracles by far more than their tolerances
    Json config;
    config["model"] = {{"kind", "kepler"}};
    config["run"] = {{"command", "verify"}};
    config["numerics"] = {{"rtol", 1e-2}, {"atol", 1e-2}};
    const int code =
        run_cli(write_config(dir, config).string() + " --output " + dir.string());
    REQUIRE(code == 1);

    Json report;
    std::ifstream in(dir / "verification.json");
    in >> report;
    REQUIRE_FALSE(report["overall_pass"].get<bool>());
}

TEST_CASE("identical scenarios produce byte-identical artifacts") {
    const fs::path dir = fresh_dir("determinism");
    const fs::path config = write_config(dir, toy_evolve_config());

    const fs::path out_a = dir / "a";
    const fs::path out_b = dir / "b";
    REQUIRE(run_cli(config.string() + " --output " + out_a.string()) == 0);
    REQUIRE(run_cli(config.string() + " --output " + out_b.string()) == 0);
    REQUIRE(slurp(out_a / "evo.csv") == slurp(out_b / "evo.csv"));

    // and a verification report is reproducible as well
    const fs::path verify_config = write_config(fresh_dir("determinism2"),
                                                toy_verify_config());
    REQUIRE(run_cli(verify_config.string() + " --output " + out_a.string()) == 0);
    REQUIRE(run_cli(verify_config.string() + " --output " + out_b.string()) == 0);
    REQUIRE(slurp(out_a / "verification.json") == slurp(out_b / "verification.json"));
}

TEST_CASE("command-line overrides adjust the scenario") {
    const fs::path dir = fresh_dir("overrides");
    Json evolve = toy_evolve_config();
    evolve["run"].erase("output");  // let each command pick its default name
    const fs::path config = write_config(dir, evolve);

    // run the evolve scenario as a verification instead
    REQUIRE(run_cli(config.string() + " --output " + dir.string() +
                    " --command verify") == 0);
    REQUIRE(fs::exists(dir / "verification.json"));

    // --tol must be positive, and unknown commands are rejected
    REQUIRE(run_cli(config.string() + " --tol -1") == 2);
    REQUIRE(run_cli(config.string() + " --command descend") == 2);

    // a tolerance override on a well-conditioned run still succeeds
    REQUIRE(run_cli(config.string() + " --output " + dir.string() +
                    " --tol 1e-8") == 0);
}

TEST_CASE("help is available and exits cleanly") {
    REQUIRE(run_cli("--help") == 0);
}
