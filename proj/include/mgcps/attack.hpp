// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mgcps/events.hpp"
#include "mgcps/plant.hpp"
#include "mgcps/topology.hpp"

namespace mgcps {

enum class AttackErrorKind { InvalidWindow, OverlappingInjection, UnknownTarget };
using AttackError = KindedError<AttackErrorKind>;

enum class Channel { Current, Voltage };

/// Replacement sequence values for one cycle. The positive sequence keeps
/// its measured value unless overridden.
struct SequenceOverride {
    std::optional<Phasor> positive;
    Phasor negative;
    Phasor zero;
};

/// Uplink tampering of one node's sensor channel.
struct MeasurementInjection {
    NodeId target;
    Channel channel = Channel::Current;
    std::uint64_t start = 1;
    std::optional<std::uint64_t> end;
    /// Keyed by cycle; a cycle without an entry reuses the latest earlier one.
    std::map<std::uint64_t, SequenceOverride> tamper;

    [[nodiscard]] bool active(std::uint64_t cycle) const noexcept {
        return cycle >= start && (!end || cycle <= *end);
    }
    [[nodiscard]] const SequenceOverride* override_at(std::uint64_t cycle) const;
};

/// Downlink tampering of one actuator: l' = l + c on setpoints, or an
/// absolute override of the command value.
struct CommandInjection {
    Actuator target;
    std::uint64_t start = 1;
    std::optional<std::uint64_t> end;
    double c = 0.0;
    std::optional<CommandValue> override_value;

    [[nodiscard]] bool active(std::uint64_t cycle) const noexcept {
        return cycle >= start && (!end || cycle <= *end);
    }
};

using Injection = std::variant<MeasurementInjection, CommandInjection>;

struct AttackSpec {
    std::vector<Injection> entries;

    /// Throws InvalidWindow (end < start) or OverlappingInjection (two
    /// entries on the same channel with intersecting windows).
    void validate() const;

    /// Throws UnknownTarget if a measurement target is not a physical node
    /// with a coupled core, or an actuator does not exist on the plant.
    void validate_against(const CoupledGraph& graph, const PlantConfig& plant) const;

    [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
};

/// Overrides the sequence fields of a matching measurement and recomputes the
/// phase fields so the tampered sample is self-consistent. Identity otherwise.
[[nodiscard]] Measurement tamper_uplink(const Measurement& m, const AttackSpec& spec, std::uint64_t cycle);

/// Whether tamper_uplink changes `node`'s sample at `cycle`.
[[nodiscard]] bool uplink_tampered(const AttackSpec& spec, NodeId node, std::uint64_t cycle);

/// The command as it reaches the actuator. The caller keeps the issued one.
[[nodiscard]] ControlCommand tamper_downlink(const ControlCommand& cmd, const AttackSpec& spec,
                                             std::uint64_t cycle);

/// Attacker-originated commands for active injections with an absolute
/// override whose actuator got no legitimate command this cycle. The issuer
/// is the core coupled to the target.
[[nodiscard]] std::vector<ControlCommand> inject_phantom_command(const AttackSpec& spec, std::uint64_t cycle,
                                                                 std::span<const Actuator> legitimate,
                                                                 const CoupledGraph& graph, Micros issued_at);

}  // namespace mgcps
