// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgcps/electrical.hpp"
#include "mgcps/plant.hpp"
#include "mgcps/topology.hpp"

namespace mgcps {

/// Simulated microseconds on the global logical clock.
using Micros = std::uint64_t;

/// Sampled information flow of one physical node.
struct Measurement {
    NodeId source;
    std::uint64_t cycle = 0;
    ThreePhase voltage;
    ThreePhase current;
    SequenceComponents voltage_seq;
    SequenceComponents current_seq;
    Micros perceived_at = 0;

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct DeliveredData {
    NodeId destination;
    Measurement payload;
    /// Cyber nodes from the source's coupled entry core to the destination.
    std::vector<NodeId> hop_path;
    Micros delivered_at = 0;

    /// The uplink into the entry core counts as the first hop.
    [[nodiscard]] std::size_t hops() const noexcept { return hop_path.size(); }
};

struct Verdict {
    enum class Kind { NoFault, FaultSuspected };

    Kind kind = Kind::NoFault;
    std::optional<NodeId> node;

    [[nodiscard]] static Verdict no_fault() { return {}; }
    [[nodiscard]] static Verdict fault_suspected(NodeId n) { return {Kind::FaultSuspected, n}; }
    [[nodiscard]] bool fault() const noexcept { return kind == Kind::FaultSuspected; }

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct Decision {
    NodeId core;
    std::uint64_t cycle = 0;
    Verdict verdict;
    std::vector<ActuationCommand> proposals;
    Micros decided_at = 0;
};

struct ControlCommand {
    ActuationCommand command;
    Micros issued_at = 0;
    NodeId issuer;
    /// Set only in the trace for commands fabricated by an attacker.
    bool attacker_originated = false;

    friend bool operator==(const ControlCommand&, const ControlCommand&) = default;
};

}  // namespace mgcps
