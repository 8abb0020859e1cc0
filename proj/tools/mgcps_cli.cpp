// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mgcps/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kMismatch = 2;

void print_error(const std::exception& e, int depth = 0) {
    std::cerr << (depth == 0 ? "error: " : "  caused by: ") << e.what() << '\n';
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        print_error(inner, depth + 1);
    } catch (...) {
    }
}

mgcps::Scenario load(const std::string& name, std::optional<std::uint64_t> seed) {
    mgcps::Scenario s = mgcps::load_scenario(name);
    if (seed) s.seed = *seed;
    return s;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mgcps::ScenarioError(mgcps::ScenarioErrorKind::Io, "cannot write '" + path.string() + "'");
    out << text;
}

int cmd_run(const std::string& name, std::optional<std::string> out_dir, std::optional<std::uint64_t> seed) {
    const auto scenario = load(name, seed);
    const auto result = mgcps::run_scenario(scenario);
    const fs::path dir = out_dir.value_or(scenario.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw mgcps::ScenarioError(mgcps::ScenarioErrorKind::Io,
                                   "cannot create '" + dir.string() + "': " + ec.message());
    }
    const fs::path csv = dir / (scenario.name + ".telemetry.csv");
    const fs::path json = dir / (scenario.name + ".summary.json");
    write_file(csv, result.telemetry);
    write_file(json, result.summary.to_json());
    std::cout << "cycles:     " << result.summary.cycles << '\n'
              << "mismatches: " << result.summary.mismatches << '\n'
              << "telemetry:  " << csv.string() << '\n'
              << "summary:    " << json.string() << '\n';
    return kOk;
}

int cmd_matrix(const std::string& name, std::optional<std::string> out_file) {
    const auto scenario = mgcps::load_scenario(name);
    const std::string csv = mgcps::adjacency_matrix(scenario.graph).to_csv();
    if (out_file) {
        write_file(*out_file, csv);
    } else {
        std::cout << csv;
    }
    return kOk;
}

int cmd_replay(const std::string& name, const std::string& trace, std::optional<std::uint64_t> seed) {
    const auto scenario = load(name, seed);
    const auto report = mgcps::replay_golden(trace, scenario);
    if (report.match) {
        std::cout << "replay ok: " << trace << '\n';
        return kOk;
    }
    std::cerr << "replay mismatch: " << report.describe() << '\n';
    return kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled cyber-physical microgrid simulator"};
    app.require_subcommand(1);

    std::string scenario;
    std::string trace;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Run a scenario and write telemetry CSV and summary JSON");
    run->add_option("scenario", scenario, "Fixture name or scenario file")->required();
    run->add_option("--out", out, "Output directory");
    run->add_option("--seed", seed, "Override the scenario seed");

    auto* matrix = app.add_subcommand("matrix", "Print the coupled adjacency matrix as CSV");
    matrix->add_option("scenario", scenario, "Fixture name or scenario file")->required();
    matrix->add_option("--out", out, "Write to a file instead of stdout");

    auto* replay = app.add_subcommand("replay", "Regenerate telemetry and compare it with a trace");
    replay->add_option("scenario", scenario, "Fixture name or scenario file")->required();
    replay->add_option("trace", trace, "Reference telemetry CSV")->required();
    replay->add_option("--seed", seed, "Override the scenario seed");

    auto* list = app.add_subcommand("list-fixtures", "List built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (*run) return cmd_run(scenario, out, seed);
        if (*matrix) return cmd_matrix(scenario, out);
        if (*replay) return cmd_replay(scenario, trace, seed);
        if (*list) {
            for (const auto& name : mgcps::fixture_names()) std::cout << name << '\n';
            return kOk;
        }
    } catch (const std::exception& e) {
        print_error(e);
        return kInvalid;
    }
    return kInvalid;
}
