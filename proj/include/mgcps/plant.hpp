// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mgcps/electrical.hpp"
#include "mgcps/error.hpp"
#include "mgcps/hybrid_automaton.hpp"
#include "mgcps/topology.hpp"

namespace mgcps {

enum class PlantErrorKind { InvalidConfig, UnknownActuator, NotAPhysicalNode };
using PlantError = KindedError<PlantErrorKind>;

enum class Capability { Breaker, Setpoint };
enum class BreakerAction { Hold, Open, Close };

/// Breaker action, or a generator output setpoint in per-unit of nominal.
using CommandValue = std::variant<BreakerAction, double>;

struct Actuator {
    NodeId node;
    Capability capability = Capability::Breaker;

    friend auto operator<=>(const Actuator&, const Actuator&) = default;
};

struct ActuationCommand {
    Actuator target;
    CommandValue value;

    friend bool operator==(const ActuationCommand&, const ActuationCommand&) = default;
};

[[nodiscard]] std::string_view to_string(Capability c) noexcept;
[[nodiscard]] std::string_view to_string(BreakerAction a) noexcept;
/// "breaker:open", "setpoint:1.25000", ...
[[nodiscard]] std::string describe(const CommandValue& v);

struct NodeNominal {
    NodeId node;
    NodeKind kind = NodeKind::PhysicalLoad;
    double voltage_magnitude = 401.0963;
    double voltage_angle_deg = 0.0;
    double current_magnitude = 0.8068;
    double current_angle_deg = 117.0;
    /// Relative amplitude of the balanced per-cycle noise. The angle jitter
    /// is the same amount in radians.
    double noise = 0.002;
    /// Share of shed load current picked up by this load (loads only).
    double redistribution_weight = 0.0;
};

/// Damped oscillation superimposed on all magnitudes after a breaker event.
struct TransientConfig {
    std::size_t cycles = 8;
    double amplitude = 0.08;
    double period_cycles = 4.0;
    double damping = 0.3;
};

struct PlantConfig {
    std::vector<NodeNominal> nodes;
    TransientConfig transient;
    /// Cycle length in seconds.
    double dt = 0.02;
    /// Euler sub-steps of the transient dynamics per cycle.
    std::size_t substeps = 20;

    /// Throws PlantError{InvalidConfig} naming the violated bound.
    void validate() const;

    /// Index of `node` in `nodes`, if present.
    [[nodiscard]] std::optional<std::size_t> index_of(NodeId node) const;
    [[nodiscard]] std::vector<std::size_t> load_indices() const;

    /// Nominal defaults for every physical node of `graph`, load weights equal.
    [[nodiscard]] static PlantConfig defaults_for(const CoupledGraph& graph);
};

inline constexpr std::size_t kMaxLoads = 8;

/// Physical state I^N. Vectors are aligned with PlantConfig::nodes.
struct PlantState {
    std::uint64_t cycle = 0;
    std::vector<ThreePhase> voltage;
    std::vector<ThreePhase> current;
    std::vector<bool> breaker_closed;
    std::vector<double> setpoint;
    /// Mode = closed-breaker mask over loads; continuous = [x, x_dot, timer].
    HAState dynamics;
    std::mt19937_64 rng;

    [[nodiscard]] double transient_offset() const noexcept {
        return dynamics.continuous.empty() ? 0.0 : dynamics.continuous[0];
    }
};

struct NodeReading {
    ThreePhase voltage;
    ThreePhase current;
};

/// Physical plant behind the cycle driver.
class Plant {
public:
    virtual ~Plant() = default;

    [[nodiscard]] virtual const PlantConfig& config() const noexcept = 0;
    [[nodiscard]] virtual PlantState init(std::uint64_t seed) const = 0;
    /// Throws PlantError{UnknownActuator}.
    [[nodiscard]] virtual PlantState advance(const PlantState& state,
                                             std::span<const ActuationCommand> commands) const = 0;
    /// Throws PlantError{NotAPhysicalNode}.
    [[nodiscard]] virtual NodeReading measure(const PlantState& state, NodeId node) const = 0;
};

/// Quasi-steady-state signal model: balanced phasors at nominal values,
/// load shedding with current redistribution, and a transient whose
/// evolution is a hybrid automaton over breaker configurations.
class SignalPlant final : public Plant {
public:
    explicit SignalPlant(PlantConfig config);

    [[nodiscard]] const PlantConfig& config() const noexcept override { return config_; }
    [[nodiscard]] const HybridAutomaton& automaton() const noexcept { return *automaton_; }

    [[nodiscard]] PlantState init(std::uint64_t seed) const override;
    [[nodiscard]] PlantState advance(const PlantState& state,
                                     std::span<const ActuationCommand> commands) const override;
    [[nodiscard]] NodeReading measure(const PlantState& state, NodeId node) const override;

private:
    void compute_outputs(PlantState& state, bool with_noise) const;

    PlantConfig config_;
    std::vector<std::size_t> loads_;
    std::shared_ptr<const HybridAutomaton> automaton_;
};

}  // namespace mgcps
