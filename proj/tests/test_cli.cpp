#include <catch2/catch_amalgamated.hpp>

#include "cli_app.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using Catch::Approx;
using nlohmann::json;

namespace {

struct CliOutcome {
    int exit_code = 0;
    std::string out;
    std::string err;
};

CliOutcome run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliOutcome outcome;
    outcome.exit_code = semiconj::cli::run(args, out, err);
    outcome.out = out.str();
    outcome.err = err.str();
    return outcome;
}

std::filesystem::path temp_file(const std::string& stem) {
    return std::filesystem::temp_directory_path() / ("semiconj_test_" + stem);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("simulate writes the (t, x, V) table", "[cli]") {
    const auto out_path = temp_file("sim.csv");
    const auto result = run_cli({"simulate", "--system", "normalized", "--x0", "3,4", "--t", "2.5",
                                 "--out", out_path.string()});
    REQUIRE(result.exit_code == 0);

    const auto lines = split_lines(slurp(out_path));
    REQUIRE(lines.size() == 102);  // header plus the default 101-point grid
    CHECK(lines.front() == "t,x1,x2,V");

    std::istringstream last(lines.back());
    std::string cell;
    std::vector<double> values;
    while (std::getline(last, cell, ',')) values.push_back(std::stod(cell));
    REQUIRE(values.size() == 4);
    CHECK(values[0] == Approx(2.5).margin(1e-15));
    CHECK(values[1] == Approx(1.5).margin(1e-12));
    CHECK(values[2] == Approx(2.0).margin(1e-12));
    CHECK(values[3] == Approx(3.125).margin(1e-12));
    std::filesystem::remove(out_path);
}

TEST_CASE("simulate output is byte-identical across runs", "[cli]") {
    const auto path_a = temp_file("sim_a.csv");
    const auto path_b = temp_file("sim_b.csv");
    const std::vector<std::string> base{"simulate", "--system", "x0-plane", "--x0",
                                        "1,1",      "--t",      "2"};
    auto with_out = [&base](const std::string& path) {
        std::vector<std::string> args = base;
        args.push_back("--out");
        args.push_back(path);
        return args;
    };
    REQUIRE(run_cli(with_out(path_a.string())).exit_code == 0);
    REQUIRE(run_cli(with_out(path_b.string())).exit_code == 0);
    CHECK(slurp(path_a) == slurp(path_b));
    std::filesystem::remove(path_a);
    std::filesystem::remove(path_b);
}

TEST_CASE("simulate integrates backwards with --backward", "[cli]") {
    const auto out_path = temp_file("sim_back.csv");
    const auto result =
        run_cli({"simulate", "--system", "normalized", "--x0", "1,0", "--t", "0.5", "--backward",
                 "--grid", "0,0.5", "--out", out_path.string()});
    REQUIRE(result.exit_code == 0);
    const auto lines = split_lines(slurp(out_path));
    REQUIRE(lines.size() == 3);
    CHECK(lines.back().rfind("-0.5,1.5,", 0) == 0);
    std::filesystem::remove(out_path);
}

TEST_CASE("simulate rejects bad inputs with exit code 2", "[cli][errors]") {
    CHECK(run_cli({"simulate", "--system", "mystery", "--x0", "1,0", "--t", "1", "--out",
                   temp_file("x.csv").string()})
              .exit_code == 2);
    CHECK(run_cli({"simulate", "--system", "normalized", "--x0", "1;0", "--t", "1", "--out",
                   temp_file("x.csv").string()})
              .exit_code == 2);
    const auto missing = run_cli({"simulate", "--system", "normalized"});
    CHECK(missing.exit_code == 2);
    CHECK_FALSE(missing.err.empty());
    CHECK(run_cli({"simulate", "--system", "normalized", "--x0", "1,0", "--t", "1", "--frobnicate",
                   "yes", "--out", temp_file("x.csv").string()})
              .exit_code == 2);
}

TEST_CASE("conjugate emits the map evaluation as JSON", "[cli]") {
    const auto result = run_cli({"conjugate", "--system", "normalized", "--epsilon", "0.5", "--r",
                                 "1", "--point", "2,0"});
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    CHECK(doc["h"][0].get<double>() == Approx(std::exp(1.0)).margin(1e-9));
    CHECK(doc["h_inverse_of_h"][0].get<double>() == Approx(2.0).margin(1e-9));
    CHECK(doc["tau_prime"].get<double>() == Approx(1.0).margin(1e-9));
    CHECK(doc["gamma"]["value"].get<double>() ==
          Approx(std::log(doc["h"][0].get<double>())).margin(1e-6));
    CHECK(doc.contains("integrator"));
    CHECK(doc["integrator"]["event_tol"].get<double>() == 1e-10);
}

TEST_CASE("conjugate reports the bounded-domain diagnostics with --C", "[cli]") {
    const auto result = run_cli({"conjugate", "--system", "normalized-bounded", "--epsilon", "0.5",
                                 "--r", "1", "--C", "1", "--point", "1.2,0"});
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    CHECK(doc["case2"]["outer_radius_R"].get<double>() ==
          Approx(std::exp(std::sqrt(2.0) - 1.0)).margin(1e-6));
    CHECK(doc["case2"]["tau_C"].get<double>() == Approx(0.2).margin(1e-9));
}

TEST_CASE("config files feed the system selection and flags win", "[cli]") {
    const auto cfg_path = temp_file("system.json");
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"name": "linear-scaled", "dimension": 1, "params": {"a": 2.0}})";
    }
    const auto out_path = temp_file("sim_cfg.csv");
    const auto from_config = run_cli({"simulate", "--config", cfg_path.string(), "--x0", "1",
                                      "--t", "1", "--grid", "0,1", "--out", out_path.string()});
    REQUIRE(from_config.exit_code == 0);
    const auto lines = split_lines(slurp(out_path));
    std::istringstream last(lines.back());
    std::string cell;
    std::getline(last, cell, ',');
    std::getline(last, cell, ',');
    CHECK(std::stod(cell) == Approx(std::exp(-2.0)).margin(1e-10));

    // A --param flag overrides the config file's value for the same key.
    const auto overridden =
        run_cli({"simulate", "--config", cfg_path.string(), "--param", "a=1.0", "--x0", "1", "--t",
                 "1", "--grid", "0,1", "--out", out_path.string()});
    REQUIRE(overridden.exit_code == 0);
    const auto lines2 = split_lines(slurp(out_path));
    std::istringstream last2(lines2.back());
    std::getline(last2, cell, ',');
    std::getline(last2, cell, ',');
    CHECK(std::stod(cell) == Approx(std::exp(-1.0)).margin(1e-10));

    std::filesystem::remove(cfg_path);
    std::filesystem::remove(out_path);
}

TEST_CASE("verify reports and exit codes follow the verdict", "[cli]") {
    const auto out_path = temp_file("verify.json");
    const auto pass = run_cli({"verify", "--suite", "scalar", "--out", out_path.string()});
    CHECK(pass.exit_code == 0);
    const json report = json::parse(slurp(out_path));
    CHECK(report["verdict"] == "pass");
    CHECK(report["suite"] == "scalar");
    CHECK(report["cases_run"].get<int>() == 1000);
    CHECK(report["config"]["seed"].get<int>() == 0);
    CHECK(report["config"]["integrator_numeric"]["event_tol"].get<double>() == 1e-7);

    const auto fail =
        run_cli({"verify", "--suite", "scalar", "--tol", "1e-30", "--out", out_path.string()});
    CHECK(fail.exit_code == 1);
    CHECK(json::parse(slurp(out_path))["verdict"] == "fail");

    const auto unknown = run_cli({"verify", "--suite", "nope", "--out", out_path.string()});
    CHECK(unknown.exit_code == 2);
    CHECK(unknown.err.find("conjugacy-closed") != std::string::npos);
    std::filesystem::remove(out_path);
}

TEST_CASE("SEMICONJ_SEED overrides the sampler seed", "[cli]") {
    const auto out_path = temp_file("verify_seed.json");
    REQUIRE(setenv("SEMICONJ_SEED", "7", 1) == 0);
    const auto result = run_cli({"verify", "--suite", "scalar", "--out", out_path.string()});
    unsetenv("SEMICONJ_SEED");
    REQUIRE(result.exit_code == 0);
    CHECK(json::parse(slurp(out_path))["config"]["seed"].get<int>() == 7);

    const auto fallback = run_cli({"verify", "--suite", "scalar", "--out", out_path.string()});
    REQUIRE(fallback.exit_code == 0);
    CHECK(json::parse(slurp(out_path))["config"]["seed"].get<int>() == 0);
    std::filesystem::remove(out_path);
}

TEST_CASE("figdata writes figure CSVs and validates ids", "[cli]") {
    const auto out_path = temp_file("fig4.csv");
    const auto ok = run_cli({"figdata", "--figure", "4", "--out", out_path.string()});
    REQUIRE(ok.exit_code == 0);
    const auto lines = split_lines(slurp(out_path));
    CHECK(lines.front() == "t,transformed_norm");
    CHECK(lines.size() > 400);

    CHECK(run_cli({"figdata", "--figure", "2", "--out", out_path.string()}).exit_code == 2);
    std::filesystem::remove(out_path);
}

TEST_CASE("help and missing subcommands", "[cli]") {
    CHECK(run_cli({"--help"}).exit_code == 0);
    CHECK(run_cli({}).exit_code == 2);
}
