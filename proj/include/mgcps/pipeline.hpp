// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgcps/attack.hpp"
#include "mgcps/events.hpp"
#include "mgcps/plant.hpp"
#include "mgcps/terminal.hpp"
#include "mgcps/topology.hpp"

namespace mgcps {

enum class PipelineErrorKind {
    CycleMismatch,
    NotACoreNode,
    Unreachable,
    EmptyInputs,
    MisaddressedInput,
    StageFailed,
};

class PipelineError : public KindedError<PipelineErrorKind> {
public:
    using KindedError::KindedError;

    PipelineError(std::string stage, std::uint64_t cycle, const std::string& cause)
        : KindedError(PipelineErrorKind::StageFailed,
                      "cycle " + std::to_string(cycle) + ", stage " + stage + ": " + cause),
          stage_(std::move(stage)),
          cycle_(cycle) {}

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
    [[nodiscard]] std::uint64_t cycle() const noexcept { return cycle_; }

private:
    std::string stage_;
    std::uint64_t cycle_ = 0;
};

/// Stage latencies on the logical clock.
struct LatencyConfig {
    Micros perception = 100;
    Micros per_hop = 50;
    Micros decision = 200;
    Micros command = 50;
};

inline constexpr int kDefaultDecimals = 5;

/// Samples every physical node of `graph` at cycle `cycle`, which must be
/// the plant's next cycle. Phase and sequence fields are quantized to
/// `decimals`; sequence fields come from the unquantized samples.
[[nodiscard]] std::vector<Measurement> perceive(const Plant& plant, const PlantState& state,
                                                const CoupledGraph& graph, std::uint64_t cycle, Micros at,
                                                int decimals = kDefaultDecimals);

[[nodiscard]] Measurement quantize(const Measurement& m, int decimals);

/// Shortest-path routing over the cyber subgraph.
class Router {
public:
    explicit Router(const CoupledGraph& graph);

    /// BFS shortest path between two cyber nodes; at each step the smallest
    /// next-hop id among the shortest continuations is taken. Throws
    /// Unreachable.
    [[nodiscard]] std::vector<NodeId> path(NodeId from, NodeId to) const;

    /// Routes a measurement from its source's coupled core to `destination`.
    [[nodiscard]] DeliveredData deliver(const Measurement& m, NodeId destination, Micros per_hop) const;

    [[nodiscard]] const CoupledGraph& cyber() const noexcept { return cyber_; }

private:
    CoupledGraph graph_;
    CoupledGraph cyber_;
};

[[nodiscard]] DeliveredData communicate(const Measurement& m, const CoupledGraph& graph, NodeId destination,
                                        Micros per_hop);

struct PolicyOutcome {
    Verdict verdict;
    std::vector<ActuationCommand> proposals;
};

/// Decision function of a core node.
class DecisionPolicy {
public:
    virtual ~DecisionPolicy() = default;
    [[nodiscard]] virtual std::string_view name() const noexcept = 0;
    [[nodiscard]] virtual PolicyOutcome evaluate(NodeId core, std::span<const DeliveredData> inputs) const = 0;
};

/// Flags a source whose negative- or zero-sequence current exceeds
/// `threshold_pu` of its nominal current, and proposes opening its breaker
/// when the source is a load and `trip_on_fault` is set.
class SequenceThresholdPolicy final : public DecisionPolicy {
public:
    struct Options {
        double threshold_pu = 1e-3;
        bool trip_on_fault = true;
    };

    SequenceThresholdPolicy(const PlantConfig& plant, Options options);

    [[nodiscard]] std::string_view name() const noexcept override { return "sequence-threshold"; }
    [[nodiscard]] PolicyOutcome evaluate(NodeId core, std::span<const DeliveredData> inputs) const override;
    [[nodiscard]] const Options& options() const noexcept { return options_; }

private:
    PlantConfig plant_;
    Options options_;
};

/// Throws EmptyInputs or MisaddressedInput.
[[nodiscard]] Decision decide(NodeId core, std::span<const DeliveredData> inputs, const DecisionPolicy& policy,
                              Micros decision_latency);

/// One command per proposal, sorted by target.
[[nodiscard]] std::vector<ControlCommand> control_convert(const Decision& decision, Micros command_latency);

[[nodiscard]] PlantState actuate(std::span<const ControlCommand> commands, const Plant& plant,
                                 const PlantState& state);

/// Everything one cycle produced.
struct CycleRecord {
    std::uint64_t cycle = 0;
    Micros started_at = 0;
    /// Sensor output before the uplink.
    std::vector<Measurement> measurements;
    /// What each core received; payloads may be tampered.
    std::vector<DeliveredData> delivered;
    std::vector<TaskAssignment> tasks;
    std::vector<Decision> decisions;
    std::vector<ControlCommand> issued;
    /// Commands reaching the actuators, after downlink tampering and
    /// attacker-originated additions.
    std::vector<ControlCommand> applied;
    /// Plant state after actuation.
    PlantState plant;
};

struct World {
    CoupledGraph graph;
    std::shared_ptr<const Plant> plant;
    PlantState plant_state;
    TerminalRegistry registry;
    std::shared_ptr<const DecisionPolicy> policy;
    AttackSpec attacks;
    LatencyConfig latency;
    Micros cycle_period = 20000;
    int decimals = kDefaultDecimals;
    Micros clock = 0;
    std::shared_ptr<const Router> router;

    [[nodiscard]] std::uint64_t next_cycle() const noexcept { return plant_state.cycle + 1; }
};

/// Assembles a world with the plant initialized from `seed`.
[[nodiscard]] World make_world(CoupledGraph graph, std::shared_ptr<const Plant> plant, TerminalRegistry registry,
                               std::shared_ptr<const DecisionPolicy> policy, AttackSpec attacks,
                               LatencyConfig latency, Micros cycle_period, std::uint64_t seed);

/// perceive -> uplink -> communicate -> decide -> control_convert ->
/// coordinate -> downlink -> actuate, once. Throws PipelineError naming the
/// failing stage and cycle.
CycleRecord run_cycle(World& world);

}  // namespace mgcps
