// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "mgcps/scenario.hpp"

namespace mgcps {

namespace {

// Six units, three routers meshed, six agents meshed. Each router serves one
// generator/load pair and agentK is coupled to unit K.
constexpr std::string_view kFig6Topology = R"(topology:
  nodes:
    - {name: dg1, kind: power}
    - {name: load1, kind: load}
    - {name: dg2, kind: power}
    - {name: load2, kind: load}
    - {name: dg3, kind: power}
    - {name: load3, kind: load}
    - {name: router1, kind: transmission}
    - {name: router2, kind: transmission}
    - {name: router3, kind: transmission}
    - {name: agent1, kind: core}
    - {name: agent2, kind: core}
    - {name: agent3, kind: core}
    - {name: agent4, kind: core}
    - {name: agent5, kind: core}
    - {name: agent6, kind: core}
  edges:
    - [router1, dg1]
    - [router1, load1]
    - [router2, dg2]
    - [router2, load2]
    - [router3, dg3]
    - [router3, load3]
    - [router1, router2]
    - [router1, router3]
    - [router2, router3]
    - [agent1, agent2]
    - [agent1, agent3]
    - [agent1, agent4]
    - [agent1, agent5]
    - [agent1, agent6]
    - [agent2, agent3]
    - [agent2, agent4]
    - [agent2, agent5]
    - [agent2, agent6]
    - [agent3, agent4]
    - [agent3, agent5]
    - [agent3, agent6]
    - [agent4, agent5]
    - [agent4, agent6]
    - [agent5, agent6]
  coupling:
    - [dg1, agent1]
    - [load1, agent2]
    - [dg2, agent3]
    - [load2, agent4]
    - [dg3, agent5]
    - [load3, agent6]
)";

constexpr std::string_view kPlant = R"(plant:
  substeps: 20
  defaults: {voltage: 401.0963, voltage_angle: 0.0, current: 0.8068, current_angle: 117.0, noise: 0.002}
  transient: {cycles: 8, amplitude: 0.08, period_cycles: 4.0, damping: 0.3}
terminals: auto
latency: {perception_us: 100, per_hop_us: 50, decision_us: 200, command_us: 50}
)";

constexpr std::string_view kBaseline = R"(name: fig6-baseline
horizon: 50
dt: 0.02
seed: 7
policy: {kind: sequence-threshold, threshold_pu: 0.001, trip_on_fault: true}
attacks: []
)";

// Tampered angles for cycles 11-20 are fixed reference values; the
// 0.4 pu magnitudes are a fixture choice.
constexpr std::string_view kScenario1 = R"(name: scenario1-measurement-injection
horizon: 20
dt: 0.02
seed: 7
policy: {kind: sequence-threshold, threshold_pu: 0.001, trip_on_fault: false}
attacks:
  - type: measurement
    target: load2
    channel: current
    start: 11
    end: 20
    magnitude_pu: 0.4
    tamper:
      - {cycle: 11, negative: 165.00611, zero: -58.24689}
      - {cycle: 12, negative: 171.64097, zero: -49.97911}
      - {cycle: 13, negative: 172.59208, zero: -50.25413}
      - {cycle: 14, negative: 173.92134, zero: -52.28240}
      - {cycle: 15, negative: 171.90453, zero: -53.77782}
      - {cycle: 16, negative: 171.32011, zero: -52.27094}
      - {cycle: 17, negative: 170.54089, zero: -51.25680}
      - {cycle: 18, negative: 166.54737, zero: -56.04673}
      - {cycle: 19, negative: 169.71583, zero: -50.52342}
      - {cycle: 20, negative: 168.32354, zero: -54.87790}
)";

constexpr std::string_view kScenario2 = R"(name: scenario2-command-injection
horizon: 540
dt: 0.02
seed: 7
policy: {kind: sequence-threshold, threshold_pu: 0.001, trip_on_fault: true}
attacks:
  - type: command
    target: load2
    capability: breaker
    start: 511
    override: open
    c: 0.0
)";

std::string assemble(std::string_view head) {
    std::string out(head);
    out += kFig6Topology;
    out += kPlant;
    return out;
}

struct Fixture {
    std::string name;
    std::string source;
};

const std::vector<Fixture>& fixtures() {
    static const std::vector<Fixture> all = {
        {"fig6-baseline", assemble(kBaseline)},
        {"scenario1-measurement-injection", assemble(kScenario1)},
        {"scenario2-command-injection", assemble(kScenario2)},
    };
    return all;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& f : fixtures()) out.push_back(f.name);
        return out;
    }();
    return names;
}

std::optional<std::string_view> fixture_source(std::string_view name) {
    for (const auto& f : fixtures()) {
        if (f.name == name) return f.source;
    }
    return std::nullopt;
}

}  // namespace mgcps
