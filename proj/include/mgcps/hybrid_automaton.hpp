// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgcps/error.hpp"

namespace mgcps {

using StateVector = std::vector<double>;
using InputView = std::span<const double>;

enum class HybridErrorKind {
    InvalidDefinition,
    InvalidArgument,
    NotInitial,
    InvariantViolated,
    NonFiniteState,
    AmbiguousJump,
    ResetViolatesInvariant,
    InvariantExit,
};

class HybridError : public KindedError<HybridErrorKind> {
public:
    HybridError(HybridErrorKind kind, const std::string& what, std::optional<std::size_t> step = {})
        : KindedError(kind, step ? what + " (step " + std::to_string(*step) + ")" : what), step_(step) {}

    /// Step index for errors raised from run().
    [[nodiscard]] std::optional<std::size_t> step() const noexcept { return step_; }

private:
    std::optional<std::size_t> step_;
};

/// Discrete location of the automaton. Indexes HybridAutomaton::modes().
using DiscreteState = std::size_t;

struct HAState {
    DiscreteState discrete = 0;
    StateVector continuous;

    friend bool operator==(const HAState&, const HAState&) = default;
};

/// A discrete state with its flow F(d, c), invariant Inv(d) and activity
/// relation h(c, c_dot, i) whose zero set is the admissible evolution.
struct Mode {
    using Flow = std::function<StateVector(const StateVector& c)>;
    using Predicate = std::function<bool(const StateVector& c)>;
    using Activity =
        std::function<StateVector(const StateVector& c, const StateVector& c_dot, InputView input)>;

    std::string name;
    Flow flow;
    Predicate invariant;
    Activity activity;
    /// Admissible initial continuous states in this mode (intersected with
    /// the invariant). Empty means the mode is not initial.
    Predicate init;
};

/// Guarded, resetting transition between modes. When several guards hold
/// at once the highest priority wins; a tie at the top is an error.
struct Transition {
    using Guard = std::function<bool(const StateVector& c, InputView input)>;
    using Reset = std::function<StateVector(const StateVector& c, InputView input)>;

    DiscreteState source = 0;
    DiscreteState target = 0;
    Guard guard;
    /// Identity when empty.
    Reset reset;
    int priority = 0;
    std::string label;
};

/// Immutable hybrid automaton (D, E, C, Init, F, Inv, Act).
class HybridAutomaton {
public:
    /// Throws HybridError{InvalidDefinition} if any transition references an
    /// unknown mode or a mode lacks flow, invariant or activity.
    HybridAutomaton(std::size_t continuous_dim, std::vector<Mode> modes,
                    std::vector<Transition> transitions, double act_tolerance = 1e-6);

    [[nodiscard]] std::size_t continuous_dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<Mode>& modes() const noexcept { return modes_; }
    [[nodiscard]] const std::vector<Transition>& transitions() const noexcept { return transitions_; }
    [[nodiscard]] double act_tolerance() const noexcept { return act_tolerance_; }

    /// Transition indices leaving `d`, in declaration order.
    [[nodiscard]] const std::vector<std::size_t>& outgoing(DiscreteState d) const;

    [[nodiscard]] bool satisfies_invariant(const HAState& s) const;
    [[nodiscard]] bool is_initial(const HAState& s) const;

private:
    std::size_t dim_;
    std::vector<Mode> modes_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<std::size_t>> outgoing_;
    double act_tolerance_;
};

struct FlowResult {
    HAState state;
    /// The advanced state left Inv(d); the caller must attempt a jump.
    bool invariant_exit = false;
    /// max |h(c, c_dot, i)| with c_dot the Euler difference quotient.
    double activity_residual = 0.0;
    bool activity_violation = false;
};

/// One explicit Euler step of F(d, .). Throws InvalidArgument for dt <= 0 or a
/// dimension mismatch, InvariantViolated if `state` is outside Inv(d), and
/// NonFiniteState if integration produces inf/nan.
[[nodiscard]] FlowResult flow_step(const HybridAutomaton& ha, const HAState& state, InputView input,
                                   double dt);

/// The jump successor of `state`, if any guard holds.
[[nodiscard]] std::optional<HAState> try_jump(const HybridAutomaton& ha, const HAState& state,
                                              InputView input = {});

struct JumpRecord {
    std::size_t step = 0;
    std::size_t transition = 0;
    StateVector pre_jump;
};

struct ActivityDiagnostic {
    std::size_t step = 0;
    double residual = 0.0;
};

struct Trajectory {
    /// horizon + 1 entries, the first being the initial state.
    std::vector<HAState> states;
    std::vector<JumpRecord> jumps;
    std::vector<ActivityDiagnostic> activity_violations;
};

/// Alternates flow_step and try_jump `horizon` times. Input k is
/// input_trace[k]; steps past the end of the trace reuse its last entry, or an
/// empty input when the trace is empty.
[[nodiscard]] Trajectory run(const HybridAutomaton& ha, const HAState& init,
                             std::span<const StateVector> input_trace, double dt, std::size_t horizon);

/// Activity residual c_dot - F(d, c): zero exactly on the flow.
[[nodiscard]] Mode::Activity flow_residual(Mode::Flow flow);

}  // namespace mgcps
