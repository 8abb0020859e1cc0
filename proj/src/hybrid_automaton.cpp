// SPDX-License-Identifier: Apache-2.0

#include "mgcps/hybrid_automaton.hpp"

#include <algorithm>
#include <cmath>

namespace mgcps {

namespace {

bool all_finite(const StateVector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

HybridAutomaton::HybridAutomaton(std::size_t continuous_dim, std::vector<Mode> modes,
                                 std::vector<Transition> transitions, double act_tolerance)
    : dim_(continuous_dim),
      modes_(std::move(modes)),
      transitions_(std::move(transitions)),
      outgoing_(modes_.size()),
      act_tolerance_(act_tolerance) {
    if (modes_.empty()) {
        throw HybridError(HybridErrorKind::InvalidDefinition, "automaton has no discrete states");
    }
    for (const auto& m : modes_) {
        if (!m.flow || !m.invariant || !m.activity) {
            throw HybridError(HybridErrorKind::InvalidDefinition,
                              "mode '" + m.name + "' needs a flow, an invariant and an activity");
        }
    }
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        const auto& t = transitions_[i];
        if (t.source >= modes_.size() || t.target >= modes_.size()) {
            throw HybridError(HybridErrorKind::InvalidDefinition,
                              "transition '" + t.label + "' references an unknown mode");
        }
        if (!t.guard) {
            throw HybridError(HybridErrorKind::InvalidDefinition,
                              "transition '" + t.label + "' has no guard");
        }
        outgoing_[t.source].push_back(i);
    }
    if (!(act_tolerance_ >= 0.0)) {
        throw HybridError(HybridErrorKind::InvalidDefinition, "act tolerance must be non-negative");
    }
}

const std::vector<std::size_t>& HybridAutomaton::outgoing(DiscreteState d) const {
    return outgoing_.at(d);
}

bool HybridAutomaton::satisfies_invariant(const HAState& s) const {
    return s.discrete < modes_.size() && s.continuous.size() == dim_ &&
           modes_[s.discrete].invariant(s.continuous);
}

bool HybridAutomaton::is_initial(const HAState& s) const {
    if (!satisfies_invariant(s)) return false;
    const auto& init = modes_[s.discrete].init;
    return init && init(s.continuous);
}

FlowResult flow_step(const HybridAutomaton& ha, const HAState& state, InputView input, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw HybridError(HybridErrorKind::InvalidArgument, "dt must be positive and finite");
    }
    if (state.discrete >= ha.modes().size() || state.continuous.size() != ha.continuous_dim()) {
        throw HybridError(HybridErrorKind::InvalidArgument, "state does not match the automaton");
    }
    const Mode& mode = ha.modes()[state.discrete];
    if (!mode.invariant(state.continuous)) {
        throw HybridError(HybridErrorKind::InvariantViolated,
                          "state outside the invariant of mode '" + mode.name + "'");
    }

    const StateVector derivative = mode.flow(state.continuous);
    if (derivative.size() != ha.continuous_dim()) {
        throw HybridError(HybridErrorKind::InvalidDefinition,
                          "flow of mode '" + mode.name + "' has the wrong dimension");
    }

    FlowResult out;
    out.state.discrete = state.discrete;
    out.state.continuous.resize(state.continuous.size());
    for (std::size_t i = 0; i < state.continuous.size(); ++i) {
        out.state.continuous[i] = state.continuous[i] + dt * derivative[i];
    }
    if (!all_finite(out.state.continuous)) {
        throw HybridError(HybridErrorKind::NonFiniteState,
                          "integration in mode '" + mode.name + "' produced a non-finite value");
    }

    StateVector c_dot(state.continuous.size());
    for (std::size_t i = 0; i < c_dot.size(); ++i) {
        c_dot[i] = (out.state.continuous[i] - state.continuous[i]) / dt;
    }
    for (double r : mode.activity(state.continuous, c_dot, input)) {
        out.activity_residual = std::max(out.activity_residual, std::abs(r));
    }
    out.activity_violation = !(out.activity_residual <= ha.act_tolerance());
    out.invariant_exit = !mode.invariant(out.state.continuous);
    return out;
}

namespace {

struct Selected {
    std::size_t transition;
    HAState state;
};

std::optional<Selected> select_jump(const HybridAutomaton& ha, const HAState& state, InputView input) {
    if (state.discrete >= ha.modes().size()) {
        throw HybridError(HybridErrorKind::InvalidArgument, "unknown discrete state");
    }
    std::optional<std::size_t> best;
    bool tie = false;
    for (std::size_t idx : ha.outgoing(state.discrete)) {
        const auto& t = ha.transitions()[idx];
        if (!t.guard(state.continuous, input)) continue;
        if (!best || t.priority > ha.transitions()[*best].priority) {
            best = idx;
            tie = false;
        } else if (t.priority == ha.transitions()[*best].priority) {
            tie = true;
        }
    }
    if (!best) return std::nullopt;
    const auto& t = ha.transitions()[*best];
    if (tie) {
        throw HybridError(HybridErrorKind::AmbiguousJump,
                          "several guards with priority " + std::to_string(t.priority) +
                              " hold in mode '" + ha.modes()[state.discrete].name + "'");
    }

    HAState next{t.target, t.reset ? t.reset(state.continuous, input) : state.continuous};
    if (next.continuous.size() != ha.continuous_dim()) {
        throw HybridError(HybridErrorKind::InvalidDefinition,
                          "reset of '" + t.label + "' has the wrong dimension");
    }
    if (!all_finite(next.continuous)) {
        throw HybridError(HybridErrorKind::NonFiniteState, "reset of '" + t.label + "' is not finite");
    }
    if (!ha.modes()[t.target].invariant(next.continuous)) {
        throw HybridError(HybridErrorKind::ResetViolatesInvariant,
                          "reset of '" + t.label + "' lands outside the invariant of '" +
                              ha.modes()[t.target].name + "'");
    }
    return Selected{*best, std::move(next)};
}

}  // namespace

std::optional<HAState> try_jump(const HybridAutomaton& ha, const HAState& state, InputView input) {
    auto sel = select_jump(ha, state, input);
    if (!sel) return std::nullopt;
    return std::move(sel->state);
}

Trajectory run(const HybridAutomaton& ha, const HAState& init, std::span<const StateVector> input_trace,
               double dt, std::size_t horizon) {
    if (!ha.is_initial(init)) {
        throw HybridError(HybridErrorKind::NotInitial, "initial state is not in Init");
    }
    Trajectory traj;
    traj.states.reserve(horizon + 1);
    traj.states.push_back(init);

    for (std::size_t k = 0; k < horizon; ++k) {
        InputView input;
        if (!input_trace.empty()) {
            input = input_trace[std::min(k, input_trace.size() - 1)];
        }
        try {
            FlowResult flowed = flow_step(ha, traj.states.back(), input, dt);
            if (flowed.activity_violation) {
                traj.activity_violations.push_back({k, flowed.activity_residual});
            }
            auto sel = select_jump(ha, flowed.state, input);
            if (sel) {
                traj.jumps.push_back({k, sel->transition, flowed.state.continuous});
                traj.states.push_back(std::move(sel->state));
            } else if (flowed.invariant_exit) {
                throw HybridError(HybridErrorKind::InvariantExit,
                                  "left the invariant of '" + ha.modes()[flowed.state.discrete].name +
                                      "' with no enabled jump");
            } else {
                traj.states.push_back(std::move(flowed.state));
            }
        } catch (const HybridError& e) {
            if (e.step()) throw;
            throw HybridError(e.kind(), e.what(), k);
        }
    }
    return traj;
}

Mode::Activity flow_residual(Mode::Flow flow) {
    return [flow = std::move(flow)](const StateVector& c, const StateVector& c_dot, InputView) {
        StateVector f = flow(c);
        for (std::size_t i = 0; i < f.size() && i < c_dot.size(); ++i) f[i] = c_dot[i] - f[i];
        return f;
    };
}

}  // namespace mgcps
