// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "mgcps/scenario.hpp"
#include "support.hpp"

namespace mgcps {
namespace {

std::string fixture(std::string_view name) { return std::string(*fixture_source(name)); }

ScenarioError expect_error(const std::string& yaml) {
    try {
        (void)parse_scenario(yaml, "test");
    } catch (const ScenarioError& e) {
        return e;
    }
    ADD_FAILURE() << "no ScenarioError for:\n" << yaml;
    return ScenarioError(ScenarioErrorKind::Io, "none");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    if (pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cols.push_back(c);
        out.push_back(cols);
    }
    return out;
}

TEST(Scenario, FixturesResolveByName) {
    EXPECT_EQ(fixture_names(),
              (std::vector<std::string>{"fig6-baseline", "scenario1-measurement-injection",
                                        "scenario2-command-injection"}));
    const auto base = load_scenario("fig6-baseline");
    EXPECT_TRUE(base.attacks.empty());
    EXPECT_EQ(base.horizon, 50u);
    const auto m = adjacency_matrix(base.graph);
    for (std::size_t r = 0; r < 15; ++r) {
        for (std::size_t c = 0; c < 15; ++c) ASSERT_EQ(m.at(r, c), testing::fig6_matrix()[r][c]);
    }

    const auto s1 = load_scenario("scenario1-measurement-injection");
    EXPECT_EQ(s1.horizon, 20u);
    ASSERT_EQ(s1.attacks.entries.size(), 1u);
    const auto& inj = std::get<MeasurementInjection>(s1.attacks.entries[0]);
    EXPECT_EQ(inj.start, 11u);
    EXPECT_EQ(s1.graph.name(inj.target), "load2");
    EXPECT_EQ(inj.channel, Channel::Current);
    EXPECT_EQ(inj.tamper.size(), 10u);
    EXPECT_NEAR(inj.tamper.at(11).negative.magnitude(), 0.4 * 0.8068, 1e-12);
    EXPECT_DOUBLE_EQ(inj.tamper.at(11).negative.angle_deg(), 165.00611);
    EXPECT_DOUBLE_EQ(inj.tamper.at(20).zero.angle_deg(), -54.87790);

    const auto s2 = load_scenario("scenario2-command-injection");
    const auto& cmd = std::get<CommandInjection>(s2.attacks.entries[0]);
    EXPECT_EQ(cmd.start, 511u);
    EXPECT_EQ(cmd.override_value, std::optional<CommandValue>(BreakerAction::Open));
}

TEST(Scenario, FileScenariosLoad) {
    const auto path = std::filesystem::temp_directory_path() / "mgcps_scenario_test.yaml";
    {
        std::ofstream out(path);
        out << replace(fixture("fig6-baseline"), "horizon: 50", "horizon: 3");
    }
    const auto s = load_scenario(path.string());
    EXPECT_EQ(s.horizon, 3u);
    std::filesystem::remove(path);

    try {
        (void)load_scenario("/nonexistent/scenario.yaml");
        FAIL();
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.kind(), ScenarioErrorKind::Io);
    }
}

TEST(Scenario, HorizonZeroIsRejected) {
    const auto e = expect_error(replace(fixture("fig6-baseline"), "horizon: 50", "horizon: 0"));
    EXPECT_EQ(e.kind(), ScenarioErrorKind::ValidationError);
    EXPECT_EQ(e.field(), "horizon");
    EXPECT_EQ(e.line(), std::optional<std::size_t>(2));
}

TEST(Scenario, ParseErrorsCarryLineAndField) {
    auto e = expect_error("name: x\nhorizon: [1\n");
    EXPECT_EQ(e.kind(), ScenarioErrorKind::ParseError);
    EXPECT_TRUE(e.line().has_value());

    e = expect_error(replace(fixture("fig6-baseline"), "seed: 7", "seed: 7\nsed: 8"));
    EXPECT_EQ(e.kind(), ScenarioErrorKind::ParseError);
    EXPECT_EQ(e.field(), "sed");
    EXPECT_EQ(e.line(), std::optional<std::size_t>(5));

    e = expect_error(replace(fixture("fig6-baseline"), "dt: 0.02", "dt: fast"));
    EXPECT_EQ(e.kind(), ScenarioErrorKind::ParseError);
    EXPECT_EQ(e.field(), "dt");

    e = expect_error(replace(fixture("fig6-baseline"), "{name: router2, kind: transmission}",
                             "{name: router2, kind: switch}"));
    EXPECT_EQ(e.field(), "topology.nodes[7].kind");
}

TEST(Scenario, DanglingReferencesAreNamed) {
    auto e = expect_error(replace(fixture("scenario2-command-injection"), "target: load2", "target: load9"));
    EXPECT_EQ(e.kind(), ScenarioErrorKind::ValidationError);
    EXPECT_EQ(e.field(), "attacks[0].target");
    EXPECT_NE(std::string(e.what()).find("load9"), std::string::npos);

    e = expect_error(replace(fixture("fig6-baseline"), "- [router2, load2]", "- [router2, load7]"));
    EXPECT_EQ(e.kind(), ScenarioErrorKind::ValidationError);
    EXPECT_NE(std::string(e.what()).find("load7"), std::string::npos);

    e = expect_error(replace(fixture("scenario2-command-injection"), "capability: breaker", "capability: setpoint"));
    EXPECT_EQ(e.field(), "attacks[0].override");

    e = expect_error(replace(fixture("fig6-baseline"), "dt: 0.02", "dt: -1"));
    EXPECT_EQ(e.kind(), ScenarioErrorKind::ValidationError);
}

TEST(Scenario, ExplicitRosterAndOverrides) {
    std::string yaml = replace(fixture("fig6-baseline"), "terminals: auto", R"(terminals:
  - {id: mgms, role: coordination, node: agent1, required_info: [decisions]}
  - {id: s2, role: perception, node: load2, required_info: [load2.current]}
  - {id: k2, role: control, node: load2, actions: [breaker]}
  - {id: x2, role: execution, node: load2, actions: [breaker.open]})");
    yaml = replace(yaml, "  substeps: 20", "  substeps: 20\n  nodes:\n    load2: {current: 1.2, weight: 0.5}\n"
                                           "    load1: {weight: 0.25}\n    load3: {weight: 0.25}");
    const auto s = parse_scenario(yaml);
    EXPECT_EQ(s.terminals.size(), 4u);
    EXPECT_DOUBLE_EQ(s.plant.nodes[3].current_magnitude, 1.2);
    EXPECT_DOUBLE_EQ(s.plant.nodes[3].redistribution_weight, 0.5);
    EXPECT_EQ(run_scenario(s).summary.cycles, 50u);

    const auto e = expect_error(replace(fixture("fig6-baseline"), "terminals: auto",
                                        "terminals:\n  - {id: s2, role: perception, required_info: [x]}"));
    EXPECT_EQ(e.field(), "terminals");
}

TEST(Scenario, BaselineRunIsQuiet) {
    const auto r = run_scenario(load_scenario("fig6-baseline"));
    EXPECT_EQ(r.records.size(), 50u);
    EXPECT_EQ(r.summary.cycles, 50u);
    EXPECT_EQ(r.summary.mismatches, 0u);
    EXPECT_FALSE(r.summary.first_fault_cycle.has_value());
    for (const auto& v : r.summary.verdicts) EXPECT_EQ(v, "NoFault");
    EXPECT_EQ(rows(r.telemetry).size(), 300u);
    EXPECT_EQ(r.telemetry.find("-0.00000"), std::string::npos);
}

TEST(Scenario, ScenarioOneFirstFaultAtOnset) {
    const auto r = run_scenario(load_scenario("scenario1-measurement-injection"));
    EXPECT_EQ(r.summary.first_fault_cycle, std::optional<std::uint64_t>(11));
    EXPECT_EQ(r.summary.verdicts[9], "NoFault");
    EXPECT_EQ(r.summary.verdicts[10], "FaultSuspected(load2)");
    EXPECT_EQ(r.summary.mismatches, 0u);
}

TEST(Scenario, ScenarioTwoMismatchesAndShedLoad) {
    const auto r = run_scenario(load_scenario("scenario2-command-injection"));
    EXPECT_EQ(r.summary.mismatches, 30u);
    for (const auto& row : rows(r.telemetry)) {
        const auto cycle = std::stoull(row[0]);
        if (row[1] != "load2") continue;
        EXPECT_EQ(row[27] != row[28], cycle >= 511) << "cycle " << cycle;
        if (cycle >= 512) EXPECT_EQ(row[8], "0.00000");
    }
}

TEST(Scenario, SummaryIsRecomputableFromTelemetry) {
    for (const auto& name : fixture_names()) {
        const auto s = load_scenario(name);
        const auto r = run_scenario(s);
        EXPECT_EQ(summarize_telemetry(r.telemetry, s.name, attack_windows(s)), r.summary) << name;
    }
}

TEST(Scenario, SummaryJsonShape) {
    const auto s = load_scenario("scenario1-measurement-injection");
    const auto j = nlohmann::json::parse(run_scenario(s).summary.to_json());
    EXPECT_EQ(j["cycles"], 20);
    EXPECT_EQ(j["first_fault_cycle"], 11);
    EXPECT_EQ(j["verdicts"].size(), 20u);
    EXPECT_EQ(j["attack_windows"][0]["start"], 11);
    EXPECT_EQ(j["signatures"][0]["window"], "baseline");

    const auto quiet = nlohmann::json::parse(run_scenario(load_scenario("fig6-baseline")).summary.to_json());
    EXPECT_TRUE(quiet["first_fault_cycle"].is_null());
}

TEST(Scenario, ReplayDetectsDrift) {
    auto s = load_scenario("fig6-baseline");
    const auto path = std::filesystem::temp_directory_path() / "mgcps_replay_test.csv";
    {
        std::ofstream out(path, std::ios::binary);
        out << run_scenario(s).telemetry;
    }
    EXPECT_TRUE(replay_golden(path, s).match);

    s.seed = 8;
    const auto drift = replay_golden(path, s);
    EXPECT_FALSE(drift.match);
    EXPECT_EQ(drift.line, 8u);
    std::filesystem::remove(path);

    EXPECT_THROW((void)replay_golden(path, s), ScenarioError);
    const auto shorter = diff_traces("a\nb\n", "a\n");
    EXPECT_FALSE(shorter.match);
    EXPECT_EQ(shorter.line, 2u);
    EXPECT_EQ(shorter.actual, "");
}

}  // namespace
}  // namespace mgcps
