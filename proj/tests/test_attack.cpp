// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "mgcps/attack.hpp"
#include "mgcps/pipeline.hpp"
#include "mgcps/scenario.hpp"

namespace mgcps {
namespace {

class AttackTest : public ::testing::Test {
protected:
    CoupledGraph graph = build_graph(fig6_topology());
    NodeId load2 = *graph.find("load2");
    NodeId load1 = *graph.find("load1");
    NodeId dg1 = *graph.find("dg1");
    PlantConfig plant = PlantConfig::defaults_for(graph);

    Measurement healthy(NodeId node, std::uint64_t cycle) const {
        SignalPlant p(plant);
        auto s = p.init(7);
        for (std::uint64_t k = 1; k < cycle; ++k) s = p.advance(s, {});
        return perceive(p, s, graph, cycle, 100)[node.index];
    }

    static ControlCommand command(Actuator target, CommandValue v) { return {{target, v}, 10, NodeId{12}, false}; }
};

TEST_F(AttackTest, ScenarioOneFixtureTampersFromOnset) {
    const auto s = load_scenario("scenario1-measurement-injection");
    for (std::uint64_t n = 1; n <= 10; ++n) {
        const auto m = healthy(load2, n);
        EXPECT_EQ(tamper_uplink(m, s.attacks, n), m);
        EXPECT_FALSE(uplink_tampered(s.attacks, load2, n));
    }
    const auto t = quantize(tamper_uplink(healthy(load2, 11), s.attacks, 11), 5);
    EXPECT_DOUBLE_EQ(t.current_seq.negative.angle_deg(), 165.00611);
    EXPECT_DOUBLE_EQ(t.current_seq.zero.angle_deg(), -58.24689);
    EXPECT_DOUBLE_EQ(t.current_seq.negative.magnitude(), 0.32272);
    EXPECT_GT(t.current_seq.zero.magnitude(), 0.0);
    EXPECT_EQ(t.voltage, quantize(healthy(load2, 11).voltage, 5));
}

TEST_F(AttackTest, TamperedPhasesAreSelfConsistent) {
    const auto s = load_scenario("scenario1-measurement-injection");
    for (std::uint64_t n = 11; n <= 20; ++n) {
        const auto t = tamper_uplink(healthy(load2, n), s.attacks, n);
        const auto seq = to_sequence(t.current);
        EXPECT_LT(distance(seq.positive, t.current_seq.positive), 1e-9);
        EXPECT_LT(distance(seq.negative, t.current_seq.negative), 1e-9);
        EXPECT_LT(distance(seq.zero, t.current_seq.zero), 1e-9);
    }
}

TEST_F(AttackTest, OtherNodesAndOutsideWindowPassThrough) {
    const auto s = load_scenario("scenario1-measurement-injection");
    const auto m = healthy(load1, 12);
    EXPECT_EQ(tamper_uplink(m, s.attacks, 12), m);

    const auto c = command({load2, Capability::Breaker}, BreakerAction::Hold);
    const auto s2 = load_scenario("scenario2-command-injection");
    EXPECT_EQ(tamper_downlink(c, s2.attacks, 510), c);
    EXPECT_EQ(tamper_downlink(c, AttackSpec{}, 600), c);
}

TEST_F(AttackTest, OverrideHoldsLatestEntry) {
    MeasurementInjection inj;
    inj.target = load2;
    inj.start = 5;
    inj.end = 9;
    inj.tamper[6] = {std::nullopt, Phasor(1, 10), Phasor(1, 20)};
    EXPECT_EQ(inj.override_at(5), nullptr);
    EXPECT_NE(inj.override_at(6), nullptr);
    EXPECT_EQ(inj.override_at(9)->negative, Phasor(1, 10));
    EXPECT_EQ(inj.override_at(10), nullptr);
}

TEST_F(AttackTest, DownlinkRules) {
    const Actuator setpoint{dg1, Capability::Setpoint};
    AttackSpec additive;
    additive.entries.push_back(CommandInjection{setpoint, 1, std::nullopt, 0.25, std::nullopt});
    const auto issued = command(setpoint, 1.0);
    const auto applied = tamper_downlink(issued, additive, 3);
    EXPECT_EQ(std::get<double>(applied.command.value), 1.25);
    EXPECT_EQ(std::get<double>(issued.command.value), 1.0);

    AttackSpec zero;
    zero.entries.push_back(CommandInjection{setpoint, 1, std::nullopt, 0.0, std::nullopt});
    EXPECT_EQ(tamper_downlink(issued, zero, 3), issued);

    const auto s2 = load_scenario("scenario2-command-injection");
    const auto hold = command({load2, Capability::Breaker}, BreakerAction::Hold);
    EXPECT_EQ(std::get<BreakerAction>(tamper_downlink(hold, s2.attacks, 511).command.value), BreakerAction::Open);
}

TEST_F(AttackTest, PhantomCommands) {
    EXPECT_TRUE(inject_phantom_command({}, 5, {}, graph, 0).empty());

    const auto s2 = load_scenario("scenario2-command-injection");
    EXPECT_TRUE(inject_phantom_command(s2.attacks, 510, {}, graph, 0).empty());
    const auto onset = inject_phantom_command(s2.attacks, 511, {}, graph, 77);
    ASSERT_EQ(onset.size(), 1u);
    EXPECT_EQ(onset[0].command.target, (Actuator{load2, Capability::Breaker}));
    EXPECT_EQ(std::get<BreakerAction>(onset[0].command.value), BreakerAction::Open);
    EXPECT_TRUE(onset[0].attacker_originated);
    EXPECT_EQ(onset[0].issued_at, 77u);

    const std::vector<Actuator> legit{{load2, Capability::Breaker}};
    EXPECT_TRUE(inject_phantom_command(s2.attacks, 511, legit, graph, 0).empty());

    AttackSpec two;
    two.entries.push_back(CommandInjection{{load2, Capability::Breaker}, 1, std::nullopt, 0.0, BreakerAction::Open});
    two.entries.push_back(CommandInjection{{load1, Capability::Breaker}, 1, std::nullopt, 0.0, BreakerAction::Open});
    const auto both = inject_phantom_command(two, 1, {}, graph, 0);
    ASSERT_EQ(both.size(), 2u);
    EXPECT_EQ(both[0].command.target.node, load1);
}

TEST_F(AttackTest, SpecValidation) {
    auto kind = [&](const AttackSpec& s) {
        try {
            s.validate();
            s.validate_against(graph, plant);
        } catch (const AttackError& e) {
            return e.kind();
        }
        ADD_FAILURE() << "no AttackError thrown";
        return AttackErrorKind::InvalidWindow;
    };
    AttackSpec bad_window;
    bad_window.entries.push_back(CommandInjection{{load2, Capability::Breaker}, 10, 5, 0.0, std::nullopt});
    EXPECT_EQ(kind(bad_window), AttackErrorKind::InvalidWindow);

    AttackSpec overlap;
    overlap.entries.push_back(CommandInjection{{load2, Capability::Breaker}, 1, 10, 0.0, std::nullopt});
    overlap.entries.push_back(CommandInjection{{load2, Capability::Breaker}, 10, std::nullopt, 0.0, std::nullopt});
    EXPECT_EQ(kind(overlap), AttackErrorKind::OverlappingInjection);

    AttackSpec no_breaker;
    no_breaker.entries.push_back(CommandInjection{{dg1, Capability::Breaker}, 1, std::nullopt, 0.0, std::nullopt});
    EXPECT_EQ(kind(no_breaker), AttackErrorKind::UnknownTarget);

    AttackSpec cyber_target;
    MeasurementInjection m;
    m.target = *graph.find("router2");
    cyber_target.entries.push_back(m);
    EXPECT_EQ(kind(cyber_target), AttackErrorKind::UnknownTarget);

    AttackSpec wrong_override;
    wrong_override.entries.push_back(CommandInjection{{load2, Capability::Breaker}, 1, std::nullopt, 0.0, 2.0});
    EXPECT_EQ(kind(wrong_override), AttackErrorKind::UnknownTarget);
}

}  // namespace
}  // namespace mgcps
