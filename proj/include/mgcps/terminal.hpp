// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mgcps/error.hpp"
#include "mgcps/topology.hpp"

namespace mgcps {

enum class TerminalRole { Perception, Control, Coordination, Execution };

[[nodiscard]] std::string_view to_string(TerminalRole r) noexcept;
[[nodiscard]] std::optional<TerminalRole> parse_terminal_role(std::string_view s) noexcept;

enum class TerminalErrorKind {
    DuplicateId,
    RoleCapabilityMismatch,
    MultipleCoordinators,
    NoCoordinator,
    UnknownTerminal,
};
using TerminalError = KindedError<TerminalErrorKind>;

enum class TerminalStatus { Idle, Busy };

struct RealTimeState {
    TerminalStatus status = TerminalStatus::Idle;
    std::uint64_t cycle = 0;
    std::string note;

    friend bool operator==(const RealTimeState&, const RealTimeState&) = default;
};

struct Feedback {
    std::uint64_t cycle = 0;
    std::string task_id;
    std::string outcome;
    bool success = true;

    friend bool operator==(const Feedback&, const Feedback&) = default;
};

/// CPS terminal (D_ID, Fu, RT, OT, A, St, Ac, VI, EI, R_FB).
///
/// `bound_node` ties the terminal to the physical unit it senses, controls
/// or actuates; a coordination terminal binds to the core node hosting it.
struct Terminal {
    std::string d_id;
    TerminalRole role = TerminalRole::Perception;
    std::string function;
    std::optional<NodeId> bound_node;

    RealTimeState rt;
    std::vector<std::string> tasks;
    std::set<std::string> goals;
    std::set<std::string> strategies;
    std::set<std::string> actions;
    std::set<std::string> required_info;
    std::map<std::string, std::string> environment;
    std::vector<Feedback> feedback;
};

enum class TaskKind { Measure, Actuate };

struct TaskAssignment {
    std::string task_id;
    TaskKind kind = TaskKind::Measure;
    std::string coordinator;
    std::string target;
    std::string payload;
    std::uint64_t cycle = 0;

    friend bool operator==(const TaskAssignment&, const TaskAssignment&) = default;
};

/// Immutable per-cycle view of a terminal handed to the coordinator.
/// `pending_commands` lists the commands produced by the decision paired
/// with a control terminal this cycle, as "<core>:<command>" strings.
struct TerminalSnapshot {
    RealTimeState rt;
    std::vector<std::string> pending_commands;
};

struct CycleState {
    std::uint64_t cycle = 0;
    std::map<std::string, TerminalSnapshot> terminals;
};

class TerminalRegistry {
public:
    /// Throws DuplicateId, RoleCapabilityMismatch (actions must be nonempty
    /// exactly for Control/Execution, required_info exactly for
    /// Perception/Coordination) or MultipleCoordinators.
    void register_terminal(Terminal terminal);

    /// Measure tasks for every perception terminal with a subscription, and
    /// one actuate task per pending command of a control terminal, sorted by
    /// target id. Throws NoCoordinator.
    [[nodiscard]] std::vector<TaskAssignment> coordinate_tasks(const CycleState& state) const;

    /// Appends to R_FB and sets RT idle. Throws UnknownTerminal.
    void record_feedback(std::string_view d_id, Feedback outcome);

    [[nodiscard]] std::size_t size() const noexcept { return terminals_.size(); }
    [[nodiscard]] const Terminal* find(std::string_view d_id) const;
    [[nodiscard]] const Terminal& at(std::string_view d_id) const;
    [[nodiscard]] const std::map<std::string, Terminal, std::less<>>& terminals() const noexcept {
        return terminals_;
    }

    [[nodiscard]] const Terminal* coordinator() const;
    /// First terminal of `role` bound to `node`, by id.
    [[nodiscard]] const Terminal* bound(TerminalRole role, NodeId node) const;

    /// Snapshot of every terminal's RT with no pending commands.
    [[nodiscard]] CycleState snapshot(std::uint64_t cycle) const;

private:
    std::map<std::string, Terminal, std::less<>> terminals_;
};

/// One perception, control and execution terminal per physical unit and a
/// single coordination terminal hosted on the first core node.
[[nodiscard]] TerminalRegistry default_roster(const CoupledGraph& graph);

}  // namespace mgcps
