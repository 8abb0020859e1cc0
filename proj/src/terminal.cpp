// SPDX-License-Identifier: Apache-2.0

#include "mgcps/terminal.hpp"

#include <algorithm>

namespace mgcps {

std::string_view to_string(TerminalRole r) noexcept {
    switch (r) {
        case TerminalRole::Perception: return "perception";
        case TerminalRole::Control: return "control";
        case TerminalRole::Coordination: return "coordination";
        case TerminalRole::Execution: return "execution";
    }
    return "unknown";
}

std::optional<TerminalRole> parse_terminal_role(std::string_view s) noexcept {
    if (s == "perception") return TerminalRole::Perception;
    if (s == "control") return TerminalRole::Control;
    if (s == "coordination") return TerminalRole::Coordination;
    if (s == "execution") return TerminalRole::Execution;
    return std::nullopt;
}

void TerminalRegistry::register_terminal(Terminal terminal) {
    if (terminals_.count(terminal.d_id) != 0) {
        throw TerminalError(TerminalErrorKind::DuplicateId, "terminal '" + terminal.d_id + "' already registered");
    }
    const bool acts = terminal.role == TerminalRole::Control || terminal.role == TerminalRole::Execution;
    const bool reads = terminal.role == TerminalRole::Perception || terminal.role == TerminalRole::Coordination;
    if (acts != !terminal.actions.empty()) {
        throw TerminalError(TerminalErrorKind::RoleCapabilityMismatch,
                            "terminal '" + terminal.d_id + "' (" + std::string(to_string(terminal.role)) +
                                (acts ? ") needs a nonempty action set" : ") must not carry actions"));
    }
    if (reads != !terminal.required_info.empty()) {
        throw TerminalError(TerminalErrorKind::RoleCapabilityMismatch,
                            "terminal '" + terminal.d_id + "' (" + std::string(to_string(terminal.role)) +
                                (reads ? ") needs a nonempty required-information set"
                                       : ") must not subscribe to information"));
    }
    if (terminal.role == TerminalRole::Coordination && coordinator() != nullptr) {
        throw TerminalError(TerminalErrorKind::MultipleCoordinators,
                            "terminal '" + terminal.d_id + "' would be a second coordinator next to '" +
                                coordinator()->d_id + "'");
    }
    std::string id = terminal.d_id;
    terminals_.emplace(std::move(id), std::move(terminal));
}

const Terminal* TerminalRegistry::find(std::string_view d_id) const {
    auto it = terminals_.find(d_id);
    return it == terminals_.end() ? nullptr : &it->second;
}

const Terminal& TerminalRegistry::at(std::string_view d_id) const {
    const Terminal* t = find(d_id);
    if (t == nullptr) {
        throw TerminalError(TerminalErrorKind::UnknownTerminal, "unknown terminal '" + std::string(d_id) + "'");
    }
    return *t;
}

const Terminal* TerminalRegistry::coordinator() const {
    for (const auto& [id, t] : terminals_) {
        if (t.role == TerminalRole::Coordination) return &t;
    }
    return nullptr;
}

const Terminal* TerminalRegistry::bound(TerminalRole role, NodeId node) const {
    for (const auto& [id, t] : terminals_) {
        if (t.role == role && t.bound_node == node) return &t;
    }
    return nullptr;
}

CycleState TerminalRegistry::snapshot(std::uint64_t cycle) const {
    CycleState s;
    s.cycle = cycle;
    for (const auto& [id, t] : terminals_) s.terminals.emplace(id, TerminalSnapshot{t.rt, {}});
    return s;
}

std::vector<TaskAssignment> TerminalRegistry::coordinate_tasks(const CycleState& state) const {
    const Terminal* coord = coordinator();
    if (coord == nullptr) {
        throw TerminalError(TerminalErrorKind::NoCoordinator, "registry has no coordination terminal");
    }
    std::vector<TaskAssignment> out;
    const std::string stamp = "c" + std::to_string(state.cycle);
    for (const auto& [id, t] : terminals_) {
        if (t.role == TerminalRole::Perception && !t.required_info.empty()) {
            std::string payload;
            for (const auto& channel : t.required_info) {
                if (!payload.empty()) payload += ';';
                payload += channel;
            }
            out.push_back({stamp + ":measure:" + id, TaskKind::Measure, coord->d_id, id, std::move(payload),
                           state.cycle});
        }
        if (t.role != TerminalRole::Control) continue;
        auto snap = state.terminals.find(id);
        if (snap == state.terminals.end()) continue;
        const auto& pending = snap->second.pending_commands;
        for (std::size_t k = 0; k < pending.size(); ++k) {
            out.push_back({stamp + ":actuate:" + id + ":" + std::to_string(k), TaskKind::Actuate, coord->d_id, id,
                           pending[k], state.cycle});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const TaskAssignment& a, const TaskAssignment& b) { return a.target < b.target; });
    return out;
}

void TerminalRegistry::record_feedback(std::string_view d_id, Feedback outcome) {
    auto it = terminals_.find(d_id);
    if (it == terminals_.end()) {
        throw TerminalError(TerminalErrorKind::UnknownTerminal, "unknown terminal '" + std::string(d_id) + "'");
    }
    it->second.rt.status = TerminalStatus::Idle;
    it->second.rt.cycle = outcome.cycle;
    it->second.feedback.push_back(std::move(outcome));
}

TerminalRegistry default_roster(const CoupledGraph& graph) {
    TerminalRegistry reg;
    for (NodeId p : graph.physical_nodes()) {
        const std::string& name = graph.name(p);
        const bool load = graph.kind(p) == NodeKind::PhysicalLoad;
        const std::string capability = load ? "breaker" : "setpoint";

        Terminal sensor;
        sensor.d_id = "sensor." + name;
        sensor.role = TerminalRole::Perception;
        sensor.function = "sample voltage and current of " + name;
        sensor.bound_node = p;
        sensor.required_info = {name + ".current", name + ".voltage"};
        sensor.goals = {"report " + name + " every cycle"};
        reg.register_terminal(std::move(sensor));

        Terminal control;
        control.d_id = "control." + name;
        control.role = TerminalRole::Control;
        control.function = "convert decisions for " + name + " into commands";
        control.bound_node = p;
        control.actions = {capability};
        control.strategies = {"sequence-threshold"};
        reg.register_terminal(std::move(control));

        Terminal actuator;
        actuator.d_id = "actuator." + name;
        actuator.role = TerminalRole::Execution;
        actuator.function = "drive the " + capability + " of " + name;
        actuator.bound_node = p;
        actuator.actions = load ? std::set<std::string>{"breaker.open", "breaker.close"}
                                : std::set<std::string>{"setpoint.set"};
        reg.register_terminal(std::move(actuator));
    }

    Terminal mgms;
    mgms.d_id = "coordinator";
    mgms.role = TerminalRole::Coordination;
    mgms.function = "microgrid management system";
    const auto cores = graph.nodes_of_kind(NodeKind::CyberCore);
    if (!cores.empty()) mgms.bound_node = cores.front();
    mgms.required_info = {"decisions"};
    mgms.goals = {"keep every unit in service"};
    reg.register_terminal(std::move(mgms));
    return reg;
}

}  // namespace mgcps
