// SPDX-License-Identifier: Apache-2.0

#include "mgcps/plant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace mgcps {

std::string_view to_string(Capability c) noexcept {
    return c == Capability::Breaker ? "breaker" : "setpoint";
}

std::string_view to_string(BreakerAction a) noexcept {
    switch (a) {
        case BreakerAction::Hold: return "hold";
        case BreakerAction::Open: return "open";
        case BreakerAction::Close: return "close";
    }
    return "unknown";
}

std::string describe(const CommandValue& v) {
    if (const auto* a = std::get_if<BreakerAction>(&v)) {
        return "breaker:" + std::string(to_string(*a));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "setpoint:%.5f", std::get<double>(v));
    return buf;
}

namespace {

PlantError invalid(const std::string& what) {
    return PlantError(PlantErrorKind::InvalidConfig, what);
}

std::string node_label(const NodeNominal& n) {
    return "node " + std::to_string(n.node.index);
}

/// Uniform in [-1, 1) from the raw 64-bit stream, identical on every
/// standard library.
double symmetric_uniform(std::mt19937_64& rng) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

void PlantConfig::validate() const {
    if (nodes.empty()) throw invalid("plant has no physical nodes");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw invalid("dt must be positive");
    if (substeps == 0) throw invalid("substeps must be at least 1");

    double weight_sum = 0.0;
    std::size_t loads = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (!is_physical(n.kind)) throw invalid(node_label(n) + " is not a physical node");
        for (std::size_t j = 0; j < i; ++j) {
            if (nodes[j].node == n.node) throw invalid(node_label(n) + " is configured twice");
        }
        if (!(n.voltage_magnitude > 0.0) || !std::isfinite(n.voltage_magnitude)) {
            throw invalid(node_label(n) + ": nominal voltage magnitude must be > 0");
        }
        if (!(n.current_magnitude > 0.0) || !std::isfinite(n.current_magnitude)) {
            throw invalid(node_label(n) + ": nominal current magnitude must be > 0");
        }
        if (!std::isfinite(n.voltage_angle_deg) || !std::isfinite(n.current_angle_deg)) {
            throw invalid(node_label(n) + ": nominal angles must be finite");
        }
        if (!(n.noise >= 0.0) || n.noise >= 0.5) {
            throw invalid(node_label(n) + ": noise amplitude must be in [0, 0.5)");
        }
        if (n.kind == NodeKind::PhysicalLoad) {
            ++loads;
            if (!(n.redistribution_weight >= 0.0)) {
                throw invalid(node_label(n) + ": redistribution weight must be >= 0");
            }
            weight_sum += n.redistribution_weight;
        } else if (n.redistribution_weight != 0.0) {
            throw invalid(node_label(n) + ": only loads carry a redistribution weight");
        }
    }
    if (loads > kMaxLoads) {
        throw invalid("at most " + std::to_string(kMaxLoads) + " loads are supported");
    }
    if (loads > 0 && std::abs(weight_sum - 1.0) > 1e-9) {
        throw invalid("load redistribution weights must sum to 1");
    }
    if (substeps < loads) throw invalid("substeps must be at least the number of loads");

    const auto& t = transient;
    if (!(t.amplitude >= 0.0) || t.amplitude > 0.5) {
        throw invalid("transient amplitude must be in [0, 0.5]");
    }
    if (!(t.period_cycles > 0.0) || !std::isfinite(t.period_cycles)) {
        throw invalid("transient period must be positive");
    }
    if (!(t.damping > 0.0) || t.damping > 1.0) throw invalid("transient damping must be in (0, 1]");
}

std::optional<std::size_t> PlantConfig::index_of(NodeId node) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].node == node) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> PlantConfig::load_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].kind == NodeKind::PhysicalLoad) out.push_back(i);
    }
    return out;
}

PlantConfig PlantConfig::defaults_for(const CoupledGraph& graph) {
    PlantConfig cfg;
    const auto loads = graph.nodes_of_kind(NodeKind::PhysicalLoad).size();
    for (NodeId id : graph.physical_nodes()) {
        NodeNominal n;
        n.node = id;
        n.kind = graph.kind(id);
        if (n.kind == NodeKind::PhysicalLoad) n.redistribution_weight = 1.0 / static_cast<double>(loads);
        cfg.nodes.push_back(n);
    }
    return cfg;
}

namespace {

std::shared_ptr<const HybridAutomaton> build_dynamics(const PlantConfig& cfg, std::size_t loads) {
    const double period = cfg.transient.period_cycles * cfg.dt;
    const double omega = 2.0 * std::numbers::pi / period;
    const double zeta = cfg.transient.damping;
    const double amplitude = cfg.transient.amplitude;
    const double hold = static_cast<double>(cfg.transient.cycles) * cfg.dt;

    Mode::Flow flow = [omega, zeta](const StateVector& c) {
        return StateVector{c[1], -omega * omega * c[0] - 2.0 * zeta * omega * c[1],
                           c[2] > 0.0 ? -1.0 : 0.0};
    };
    Mode::Predicate bounded = [](const StateVector& c) {
        return std::isfinite(c[0]) && std::isfinite(c[1]) && std::isfinite(c[2]) && std::abs(c[0]) < 1.0;
    };
    Mode::Predicate any = [](const StateVector&) { return true; };

    const std::size_t n_modes = std::size_t{1} << loads;
    std::vector<Mode> modes;
    modes.reserve(n_modes);
    for (std::size_t m = 0; m < n_modes; ++m) {
        std::string name = "breakers:";
        for (std::size_t k = 0; k < loads; ++k) name += ((m >> k) & 1U) ? '1' : '0';
        modes.push_back({std::move(name), flow, bounded, flow_residual(flow), any});
    }

    std::vector<Transition> transitions;
    for (std::size_t m = 0; m < n_modes; ++m) {
        for (std::size_t k = 0; k < loads; ++k) {
            const bool closed = ((m >> k) & 1U) != 0;
            Transition t;
            t.source = m;
            t.target = m ^ (std::size_t{1} << k);
            t.guard = [k, closed](const StateVector&, InputView in) {
                return k < in.size() && (in[k] > 0.5) != closed;
            };
            // Shedding a load kicks the magnitudes up, restoring it pulls them down.
            const double kick = closed ? amplitude : -amplitude;
            t.reset = [kick, hold](const StateVector& c, InputView) {
                return StateVector{std::clamp(c[0] + kick, -0.9, 0.9), c[1], hold};
            };
            t.priority = static_cast<int>(100 + loads - k);
            t.label = "toggle-load-" + std::to_string(k);
            transitions.push_back(std::move(t));
        }
        Transition settle;
        settle.source = m;
        settle.target = m;
        settle.guard = [](const StateVector& c, InputView) {
            return c[2] <= 0.0 && (c[0] != 0.0 || c[1] != 0.0 || c[2] != 0.0);
        };
        settle.reset = [](const StateVector&, InputView) { return StateVector{0.0, 0.0, 0.0}; };
        settle.priority = 0;
        settle.label = "settle";
        transitions.push_back(std::move(settle));
    }
    return std::make_shared<const HybridAutomaton>(3, std::move(modes), std::move(transitions));
}

}  // namespace

SignalPlant::SignalPlant(PlantConfig config) : config_(std::move(config)) {
    config_.validate();
    loads_ = config_.load_indices();
    automaton_ = build_dynamics(config_, loads_.size());
}

PlantState SignalPlant::init(std::uint64_t seed) const {
    PlantState s;
    s.cycle = 0;
    s.breaker_closed.assign(config_.nodes.size(), true);
    s.setpoint.assign(config_.nodes.size(), 1.0);
    s.dynamics = {(std::size_t{1} << loads_.size()) - 1, {0.0, 0.0, 0.0}};
    s.rng.seed(seed);
    compute_outputs(s, false);
    return s;
}

PlantState SignalPlant::advance(const PlantState& state,
                                std::span<const ActuationCommand> commands) const {
    PlantState next = state;
    for (const auto& cmd : commands) {
        const auto idx = config_.index_of(cmd.target.node);
        const auto describe_target = [&] {
            return "node " + std::to_string(cmd.target.node.index) + " " +
                   std::string(to_string(cmd.target.capability));
        };
        if (!idx) {
            throw PlantError(PlantErrorKind::UnknownActuator, "no actuator at " + describe_target());
        }
        const auto& nominal = config_.nodes[*idx];
        if (cmd.target.capability == Capability::Breaker) {
            const auto* action = std::get_if<BreakerAction>(&cmd.value);
            if (nominal.kind != NodeKind::PhysicalLoad || action == nullptr) {
                throw PlantError(PlantErrorKind::UnknownActuator, "no breaker at " + describe_target());
            }
            if (*action == BreakerAction::Open) next.breaker_closed[*idx] = false;
            if (*action == BreakerAction::Close) next.breaker_closed[*idx] = true;
        } else {
            const auto* value = std::get_if<double>(&cmd.value);
            if (nominal.kind != NodeKind::PhysicalPower || value == nullptr || !std::isfinite(*value) ||
                *value < 0.0) {
                throw PlantError(PlantErrorKind::UnknownActuator,
                                 "no valid setpoint actuator at " + describe_target());
            }
            next.setpoint[*idx] = *value;
        }
    }

    StateVector input(loads_.size());
    for (std::size_t k = 0; k < loads_.size(); ++k) input[k] = next.breaker_closed[loads_[k]] ? 1.0 : 0.0;
    const std::vector<StateVector> trace{input};
    const double sub_dt = config_.dt / static_cast<double>(config_.substeps);
    Trajectory traj = run(*automaton_, next.dynamics, trace, sub_dt, config_.substeps);
    next.dynamics = std::move(traj.states.back());

    ++next.cycle;
    compute_outputs(next, true);
    return next;
}

void SignalPlant::compute_outputs(PlantState& s, bool with_noise) const {
    double shed = 0.0;
    double closed_weight = 0.0;
    for (std::size_t i : loads_) {
        if (s.breaker_closed[i]) {
            closed_weight += config_.nodes[i].redistribution_weight;
        } else {
            shed += config_.nodes[i].current_magnitude;
        }
    }

    const double offset = 1.0 + s.transient_offset();
    s.voltage.resize(config_.nodes.size());
    s.current.resize(config_.nodes.size());
    for (std::size_t i = 0; i < config_.nodes.size(); ++i) {
        const auto& n = config_.nodes[i];
        // Always draw so the stream position depends only on the cycle count.
        double vm = symmetric_uniform(s.rng);
        double va = symmetric_uniform(s.rng);
        double im = symmetric_uniform(s.rng);
        double ia = symmetric_uniform(s.rng);
        if (!with_noise) vm = va = im = ia = 0.0;

        double current = n.current_magnitude;
        if (n.kind == NodeKind::PhysicalLoad) {
            if (!s.breaker_closed[i]) {
                current = 0.0;
            } else if (closed_weight > 0.0) {
                current += n.redistribution_weight / closed_weight * shed;
            }
        } else {
            current *= s.setpoint[i];
        }

        s.voltage[i] = balanced(n.voltage_magnitude * offset * (1.0 + n.noise * vm),
                                n.voltage_angle_deg + n.noise * kRadToDeg * va);
        s.current[i] = balanced(current * offset * (1.0 + n.noise * im),
                                n.current_angle_deg + n.noise * kRadToDeg * ia);
    }
}

NodeReading SignalPlant::measure(const PlantState& state, NodeId node) const {
    const auto idx = config_.index_of(node);
    if (!idx || *idx >= state.voltage.size()) {
        throw PlantError(PlantErrorKind::NotAPhysicalNode,
                         "node " + std::to_string(node.index) + " is not a physical node of the plant");
    }
    return {state.voltage[*idx], state.current[*idx]};
}

}  // namespace mgcps
