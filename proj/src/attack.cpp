// SPDX-License-Identifier: Apache-2.0

#include "mgcps/attack.hpp"

#include <algorithm>
#include <string>

namespace mgcps {

const SequenceOverride* MeasurementInjection::override_at(std::uint64_t cycle) const {
    if (!active(cycle)) return nullptr;
    auto it = tamper.upper_bound(cycle);
    if (it == tamper.begin()) return nullptr;
    return &std::prev(it)->second;
}

namespace {

struct Window {
    std::uint64_t start;
    std::optional<std::uint64_t> end;
};

bool overlaps(const Window& a, const Window& b) {
    const bool a_before_b = a.end && *a.end < b.start;
    const bool b_before_a = b.end && *b.end < a.start;
    return !a_before_b && !b_before_a;
}

Window window_of(const Injection& inj) {
    return std::visit([](const auto& i) { return Window{i.start, i.end}; }, inj);
}

bool same_channel(const Injection& a, const Injection& b) {
    if (a.index() != b.index()) return false;
    if (const auto* ma = std::get_if<MeasurementInjection>(&a)) {
        const auto& mb = std::get<MeasurementInjection>(b);
        return ma->target == mb.target && ma->channel == mb.channel;
    }
    return std::get<CommandInjection>(a).target == std::get<CommandInjection>(b).target;
}

std::string describe_target(const Injection& inj) {
    return std::visit([](const auto& i) -> std::string {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, MeasurementInjection>) {
            return "uplink of node " + std::to_string(i.target.index);
        } else {
            return std::string(to_string(i.target.capability)) + " of node " + std::to_string(i.target.node.index);
        }
    }, inj);
}

}  // namespace

void AttackSpec::validate() const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const Window w = window_of(entries[i]);
        if (w.end && *w.end < w.start) {
            throw AttackError(AttackErrorKind::InvalidWindow,
                              "injection on " + describe_target(entries[i]) + " ends before it starts");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (same_channel(entries[i], entries[j]) && overlaps(w, window_of(entries[j]))) {
                throw AttackError(AttackErrorKind::OverlappingInjection,
                                  "overlapping injections on " + describe_target(entries[i]));
            }
        }
    }
}

void AttackSpec::validate_against(const CoupledGraph& graph, const PlantConfig& plant) const {
    for (const auto& entry : entries) {
        if (const auto* m = std::get_if<MeasurementInjection>(&entry)) {
            if (!graph.contains(m->target) || !is_physical(graph.kind(m->target)) ||
                !graph.coupled_core(m->target)) {
                throw AttackError(AttackErrorKind::UnknownTarget,
                                  describe_target(entry) + " is not a physical node with an uplink");
            }
            continue;
        }
        const auto& c = std::get<CommandInjection>(entry);
        const auto idx = plant.index_of(c.target.node);
        const NodeKind needed =
            c.target.capability == Capability::Breaker ? NodeKind::PhysicalLoad : NodeKind::PhysicalPower;
        if (!idx || plant.nodes[*idx].kind != needed) {
            throw AttackError(AttackErrorKind::UnknownTarget, "no " + describe_target(entry));
        }
        if (c.override_value &&
            std::holds_alternative<BreakerAction>(*c.override_value) != (c.target.capability == Capability::Breaker)) {
            throw AttackError(AttackErrorKind::UnknownTarget,
                              "override value does not fit the " + describe_target(entry));
        }
    }
}

Measurement tamper_uplink(const Measurement& m, const AttackSpec& spec, std::uint64_t cycle) {
    for (const auto& entry : spec.entries) {
        const auto* inj = std::get_if<MeasurementInjection>(&entry);
        if (inj == nullptr || inj->target != m.source) continue;
        const SequenceOverride* ov = inj->override_at(cycle);
        if (ov == nullptr) continue;

        Measurement out = m;
        SequenceComponents& seq = inj->channel == Channel::Current ? out.current_seq : out.voltage_seq;
        ThreePhase& phases = inj->channel == Channel::Current ? out.current : out.voltage;
        if (ov->positive) seq.positive = *ov->positive;
        seq.negative = ov->negative;
        seq.zero = ov->zero;
        phases = from_sequence(seq);
        return out;
    }
    return m;
}

bool uplink_tampered(const AttackSpec& spec, NodeId node, std::uint64_t cycle) {
    return std::any_of(spec.entries.begin(), spec.entries.end(), [&](const Injection& entry) {
        const auto* inj = std::get_if<MeasurementInjection>(&entry);
        return inj != nullptr && inj->target == node && inj->override_at(cycle) != nullptr;
    });
}

ControlCommand tamper_downlink(const ControlCommand& cmd, const AttackSpec& spec, std::uint64_t cycle) {
    for (const auto& entry : spec.entries) {
        const auto* inj = std::get_if<CommandInjection>(&entry);
        if (inj == nullptr || inj->target != cmd.command.target || !inj->active(cycle)) continue;
        ControlCommand out = cmd;
        if (inj->override_value) {
            out.command.value = *inj->override_value;
        } else if (const auto* setpoint = std::get_if<double>(&out.command.value)) {
            out.command.value = *setpoint + inj->c;
        }
        return out;
    }
    return cmd;
}

std::vector<ControlCommand> inject_phantom_command(const AttackSpec& spec, std::uint64_t cycle,
                                                   std::span<const Actuator> legitimate,
                                                   const CoupledGraph& graph, Micros issued_at) {
    std::vector<ControlCommand> out;
    for (const auto& entry : spec.entries) {
        const auto* inj = std::get_if<CommandInjection>(&entry);
        if (inj == nullptr || !inj->active(cycle) || !inj->override_value) continue;
        if (std::find(legitimate.begin(), legitimate.end(), inj->target) != legitimate.end()) continue;
        ControlCommand cmd;
        cmd.command = {inj->target, *inj->override_value};
        cmd.issued_at = issued_at;
        cmd.issuer = graph.coupled_core(inj->target.node).value_or(inj->target.node);
        cmd.attacker_originated = true;
        out.push_back(std::move(cmd));
    }
    std::sort(out.begin(), out.end(), [](const ControlCommand& a, const ControlCommand& b) {
        return a.command.target < b.command.target;
    });
    return out;
}

}  // namespace mgcps
