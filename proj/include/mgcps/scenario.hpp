// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgcps/attack.hpp"
#include "mgcps/error.hpp"
#include "mgcps/pipeline.hpp"
#include "mgcps/plant.hpp"
#include "mgcps/terminal.hpp"
#include "mgcps/topology.hpp"

namespace mgcps {

enum class ScenarioErrorKind { ParseError, ValidationError, Io };

class ScenarioError : public KindedError<ScenarioErrorKind> {
public:
    ScenarioError(ScenarioErrorKind kind, const std::string& what, std::string field = {},
                  std::optional<std::size_t> line = {})
        : KindedError(kind, format(what, field, line)), field_(std::move(field)), line_(line) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    /// 1-based line in the scenario document, when known.
    [[nodiscard]] std::optional<std::size_t> line() const noexcept { return line_; }

private:
    static std::string format(const std::string& what, const std::string& field, std::optional<std::size_t> line) {
        std::string out;
        if (line) out += "line " + std::to_string(*line) + ": ";
        if (!field.empty()) out += field + ": ";
        return out + what;
    }

    std::string field_;
    std::optional<std::size_t> line_;
};

struct PolicySettings {
    std::string kind = "sequence-threshold";
    SequenceThresholdPolicy::Options options;
};

/// A fully validated experiment description.
struct Scenario {
    std::string name;
    std::uint64_t horizon = 1;
    /// Cycle length in seconds.
    double dt = 0.02;
    std::uint64_t seed = 7;
    int decimals = kDefaultDecimals;

    TopologySpec topology;
    CoupledGraph graph;
    PlantConfig plant;
    /// Empty means the default roster derived from the graph.
    std::vector<Terminal> terminals;
    PolicySettings policy;
    AttackSpec attacks;
    LatencyConfig latency;
    std::string output_dir = "out";

    [[nodiscard]] Micros cycle_period() const;
};

/// Parses and validates a scenario document. `origin` names it in errors.
[[nodiscard]] Scenario parse_scenario(std::string_view yaml, std::string_view origin = "<scenario>");

/// Built-in fixture name or a path to a scenario file.
[[nodiscard]] Scenario load_scenario(std::string_view name_or_path);

[[nodiscard]] const std::vector<std::string>& fixture_names();
[[nodiscard]] std::optional<std::string_view> fixture_source(std::string_view name);

[[nodiscard]] World make_world(const Scenario& scenario);

struct AttackWindow {
    std::string kind;
    std::string target;
    std::uint64_t start = 0;
    std::optional<std::uint64_t> end;

    friend bool operator==(const AttackWindow&, const AttackWindow&) = default;
};

/// Largest negative/zero-sequence current magnitude in a set of cycles.
struct SignatureStats {
    std::string window;
    double max_negative = 0.0;
    double max_zero = 0.0;

    friend bool operator==(const SignatureStats&, const SignatureStats&) = default;
};

struct RunSummary {
    std::string scenario;
    std::uint64_t cycles = 0;
    /// One entry per cycle: "NoFault" or the fault verdicts joined by ';'.
    std::vector<std::string> verdicts;
    std::vector<AttackWindow> attack_windows;
    std::uint64_t mismatches = 0;
    std::optional<std::uint64_t> first_fault_cycle;
    /// "baseline" covers cycles outside every attack window, then one entry
    /// per window in declaration order.
    std::vector<SignatureStats> signatures;

    [[nodiscard]] std::string to_json() const;
    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct RunResult {
    std::vector<CycleRecord> records;
    std::string telemetry;
    RunSummary summary;
};

[[nodiscard]] std::string telemetry_header();

/// Runs `horizon` cycles. Throws PipelineError with the failing cycle.
[[nodiscard]] RunResult run_scenario(const Scenario& scenario);

[[nodiscard]] std::vector<AttackWindow> attack_windows(const Scenario& scenario);

/// Recomputes the summary from telemetry alone.
[[nodiscard]] RunSummary summarize_telemetry(std::string_view csv, std::string_view scenario_name,
                                             const std::vector<AttackWindow>& windows);

struct DiffReport {
    bool match = true;
    /// 1-based line of the first difference (header is line 1).
    std::size_t line = 0;
    std::string expected;
    std::string actual;

    [[nodiscard]] std::string describe() const;
};

[[nodiscard]] DiffReport diff_traces(std::string_view expected, std::string_view actual);

/// Regenerates the telemetry of `scenario` and compares it with the trace at
/// `trace`. Throws ScenarioError{Io} if the trace cannot be read.
[[nodiscard]] DiffReport replay_golden(const std::filesystem::path& trace, const Scenario& scenario);

}  // namespace mgcps
