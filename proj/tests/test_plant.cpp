// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>

#include "mgcps/plant.hpp"

namespace mgcps {
namespace {

class PlantTest : public ::testing::Test {
protected:
    CoupledGraph graph = build_graph(fig6_topology());
    NodeId load1 = *graph.find("load1");
    NodeId load2 = *graph.find("load2");
    NodeId load3 = *graph.find("load3");
    NodeId dg1 = *graph.find("dg1");

    PlantConfig quiet() const {
        auto cfg = PlantConfig::defaults_for(graph);
        for (auto& n : cfg.nodes) n.noise = 0.0;
        return cfg;
    }

    static PlantState step(const Plant& p, const PlantState& s, std::vector<ActuationCommand> cmds = {}) {
        return p.advance(s, cmds);
    }

    static ActuationCommand open(NodeId n) { return {{n, Capability::Breaker}, BreakerAction::Open}; }
};

TEST_F(PlantTest, DefaultsAreValidAndBalanced) {
    const auto cfg = PlantConfig::defaults_for(graph);
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.nodes.size(), 6u);
    EXPECT_EQ(cfg.load_indices().size(), 3u);

    SignalPlant plant(cfg);
    const auto s = plant.init(7);
    for (NodeId n : graph.physical_nodes()) {
        const auto r = plant.measure(s, n);
        const auto seq = to_sequence(r.current);
        EXPECT_LE(seq.negative.magnitude(), 1e-12);
        EXPECT_LE(seq.zero.magnitude(), 1e-12);
        EXPECT_GT(seq.positive.angle_deg(), 0.0);
        EXPECT_NEAR(r.voltage.a.magnitude(), 401.0963, 1e-9);
    }
}

TEST_F(PlantTest, ZeroNoiseIgnoresSeedAndIsAFixedPoint) {
    SignalPlant plant(quiet());
    const auto a = plant.init(1);
    const auto b = plant.init(99);
    EXPECT_EQ(a.voltage, b.voltage);
    EXPECT_EQ(a.current, b.current);

    auto s = a;
    for (int k = 0; k < 5; ++k) {
        const auto next = step(plant, s);
        EXPECT_EQ(next.voltage, s.voltage);
        EXPECT_EQ(next.current, s.current);
        EXPECT_EQ(next.dynamics, s.dynamics);
        s = next;
    }
}

TEST_F(PlantTest, ZeroNoiseCycleThreeIsExactNominal) {
    SignalPlant plant(quiet());
    auto s = plant.init(7);
    for (int k = 0; k < 3; ++k) s = step(plant, s);
    const auto r = plant.measure(s, load2);
    EXPECT_EQ(s.cycle, 3u);
    EXPECT_EQ(r.voltage, balanced(401.0963, 0.0));
    EXPECT_EQ(r.current, balanced(0.8068, 117.0));
}

TEST_F(PlantTest, SeededRunsAreDeterministic) {
    SignalPlant plant(PlantConfig::defaults_for(graph));
    auto a = plant.init(5);
    auto b = plant.init(5);
    auto c = plant.init(6);
    bool differs = false;
    for (int k = 0; k < 20; ++k) {
        a = step(plant, a);
        b = step(plant, b);
        c = step(plant, c);
        ASSERT_EQ(a.voltage, b.voltage);
        ASSERT_EQ(a.current, b.current);
        differs = differs || !(a.voltage == c.voltage);
    }
    EXPECT_TRUE(differs);
}

TEST_F(PlantTest, LoadVoltagesStayNearNominal) {
    SignalPlant plant(PlantConfig::defaults_for(graph));
    auto s = plant.init(7);
    for (int k = 0; k < 100; ++k) {
        s = step(plant, s);
        for (NodeId n : {load1, load2, load3}) {
            const auto r = plant.measure(s, n);
            EXPECT_NEAR(r.voltage.a.magnitude(), 401.0963, 0.05 * 401.0963);
            const auto seq = to_sequence(r.current);
            EXPECT_LE(seq.negative.magnitude(), 1e-9);
            EXPECT_LE(seq.zero.magnitude(), 1e-9);
        }
    }
}

TEST_F(PlantTest, OpeningLoadTwoShedsAndRedistributes) {
    SignalPlant plant(PlantConfig::defaults_for(graph));
    auto s = plant.init(7);
    std::vector<double> before_spread;
    for (int k = 0; k < 10; ++k) {
        s = step(plant, s);
        before_spread.push_back(plant.measure(s, load2).voltage.a.magnitude());
    }
    const double i1_before = plant.measure(s, load1).current.a.magnitude();
    const double i3_before = plant.measure(s, load3).current.a.magnitude();

    s = step(plant, s, {open(load2)});
    EXPECT_FALSE(s.breaker_closed[3]);
    EXPECT_EQ(plant.measure(s, load2).current.a.magnitude(), 0.0);
    EXPECT_GT(plant.measure(s, load1).current.a.magnitude(), i1_before);
    EXPECT_GT(plant.measure(s, load3).current.a.magnitude(), i3_before);

    std::vector<double> after_spread{plant.measure(s, load2).voltage.a.magnitude()};
    for (int k = 0; k < 9; ++k) {
        s = step(plant, s);
        after_spread.push_back(plant.measure(s, load2).voltage.a.magnitude());
        EXPECT_EQ(plant.measure(s, load2).current.b.magnitude(), 0.0);
    }
    auto spread = [](const std::vector<double>& v) {
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    EXPECT_GT(spread(after_spread), spread(before_spread));
}

TEST_F(PlantTest, TransientSettlesAndReclosing) {
    auto cfg = quiet();
    SignalPlant plant(cfg);
    auto s = step(plant, plant.init(7), {open(load2)});
    EXPECT_NE(s.transient_offset(), 0.0);
    for (std::size_t k = 0; k < cfg.transient.cycles + 1; ++k) s = step(plant, s);
    EXPECT_EQ(s.transient_offset(), 0.0);

    s = step(plant, s, {{{load2, Capability::Breaker}, BreakerAction::Close}});
    EXPECT_TRUE(s.breaker_closed[3]);
    EXPECT_GT(plant.measure(s, load2).current.a.magnitude(), 0.0);
}

TEST_F(PlantTest, SetpointScalesGeneratorCurrent) {
    SignalPlant plant(quiet());
    const auto s = step(plant, plant.init(7), {{{dg1, Capability::Setpoint}, 1.25}});
    EXPECT_NEAR(plant.measure(s, dg1).current.a.magnitude(), 0.8068 * 1.25, 1e-12);
}

TEST_F(PlantTest, RejectsInvalidCommandsAndNodes) {
    SignalPlant plant(quiet());
    const auto s = plant.init(7);
    auto kind = [&](std::vector<ActuationCommand> cmds) {
        try {
            (void)plant.advance(s, cmds);
        } catch (const PlantError& e) {
            return e.kind();
        }
        return PlantErrorKind::InvalidConfig;
    };
    EXPECT_EQ(kind({open(*graph.find("router1"))}), PlantErrorKind::UnknownActuator);
    EXPECT_EQ(kind({open(dg1)}), PlantErrorKind::UnknownActuator);
    EXPECT_EQ(kind({{{load1, Capability::Setpoint}, 1.0}}), PlantErrorKind::UnknownActuator);
    EXPECT_EQ(kind({{{dg1, Capability::Setpoint}, -1.0}}), PlantErrorKind::UnknownActuator);
    EXPECT_THROW((void)plant.measure(s, *graph.find("agent1")), PlantError);
}

TEST_F(PlantTest, ConfigValidation) {
    auto cfg = PlantConfig::defaults_for(graph);
    cfg.nodes[1].redistribution_weight += 0.1;
    EXPECT_THROW(cfg.validate(), PlantError);

    cfg = PlantConfig::defaults_for(graph);
    cfg.nodes[0].voltage_magnitude = 0.0;
    EXPECT_THROW(cfg.validate(), PlantError);

    cfg = PlantConfig::defaults_for(graph);
    cfg.substeps = 2;
    EXPECT_THROW(cfg.validate(), PlantError);

    cfg = PlantConfig::defaults_for(graph);
    cfg.transient.damping = 0.0;
    EXPECT_THROW(SignalPlant{cfg}, PlantError);
}

TEST_F(PlantTest, DynamicsAreTheHybridAutomaton) {
    SignalPlant plant(quiet());
    const auto& ha = plant.automaton();
    EXPECT_EQ(ha.modes().size(), 8u);
    EXPECT_EQ(ha.continuous_dim(), 3u);
    EXPECT_TRUE(ha.is_initial(plant.init(7).dynamics));
}

}  // namespace
}  // namespace mgcps
