// SPDX-License-Identifier: Apache-2.0

#include "mgcps/pipeline.hpp"

#include <algorithm>
#include <deque>
#include <exception>
#include <limits>
#include <map>

namespace mgcps {

Measurement quantize(const Measurement& m, int decimals) {
    Measurement q = m;
    q.voltage = quantize(m.voltage, decimals);
    q.current = quantize(m.current, decimals);
    q.voltage_seq = quantize(m.voltage_seq, decimals);
    q.current_seq = quantize(m.current_seq, decimals);
    return q;
}

std::vector<Measurement> perceive(const Plant& plant, const PlantState& state, const CoupledGraph& graph,
                                  std::uint64_t cycle, Micros at, int decimals) {
    if (cycle != state.cycle + 1) {
        throw PipelineError(PipelineErrorKind::CycleMismatch,
                            "pipeline cycle " + std::to_string(cycle) + " does not follow plant state " +
                                std::to_string(state.cycle));
    }
    std::vector<Measurement> out;
    for (NodeId node : graph.physical_nodes()) {
        const NodeReading r = plant.measure(state, node);
        Measurement m;
        m.source = node;
        m.cycle = cycle;
        m.voltage = r.voltage;
        m.current = r.current;
        m.voltage_seq = to_sequence(r.voltage);
        m.current_seq = to_sequence(r.current);
        m.perceived_at = at;
        out.push_back(quantize(m, decimals));
    }
    return out;
}

Router::Router(const CoupledGraph& graph) : graph_(graph), cyber_(cyber_subgraph(graph)) {}

std::vector<NodeId> Router::path(NodeId from, NodeId to) const {
    auto unreachable = [&] {
        return PipelineError(PipelineErrorKind::Unreachable,
                             "no cyber path from node " + std::to_string(from.index) + " to node " +
                                 std::to_string(to.index));
    };
    if (!cyber_.contains(from) || !cyber_.contains(to)) throw unreachable();

    // Distances to the destination, then a greedy walk choosing the
    // smallest id among neighbors one step closer.
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(cyber_.size(), kInf);
    std::deque<NodeId> queue{to};
    dist[cyber_.position(to)] = 0;
    while (!queue.empty()) {
        const NodeId n = queue.front();
        queue.pop_front();
        const std::size_t d = dist[cyber_.position(n)];
        for (NodeId nb : cyber_.neighbors(n)) {
            auto& slot = dist[cyber_.position(nb)];
            if (slot == kInf) {
                slot = d + 1;
                queue.push_back(nb);
            }
        }
    }
    if (dist[cyber_.position(from)] == kInf) throw unreachable();

    std::vector<NodeId> out{from};
    NodeId at = from;
    while (at != to) {
        const std::size_t d = dist[cyber_.position(at)];
        for (NodeId nb : cyber_.neighbors(at)) {
            if (dist[cyber_.position(nb)] + 1 == d) {
                at = nb;
                break;
            }
        }
        out.push_back(at);
    }
    return out;
}

DeliveredData Router::deliver(const Measurement& m, NodeId destination, Micros per_hop) const {
    if (!graph_.contains(destination) || graph_.kind(destination) != NodeKind::CyberCore) {
        throw PipelineError(PipelineErrorKind::NotACoreNode,
                            "destination node " + std::to_string(destination.index) + " is not a core node");
    }
    const auto entry = graph_.contains(m.source) ? graph_.coupled_core(m.source) : std::nullopt;
    if (!entry) {
        throw PipelineError(PipelineErrorKind::Unreachable,
                            "source node " + std::to_string(m.source.index) + " has no coupled core");
    }
    DeliveredData out;
    out.destination = destination;
    out.payload = m;
    out.hop_path = path(*entry, destination);
    out.delivered_at = m.perceived_at + per_hop * out.hop_path.size();
    return out;
}

DeliveredData communicate(const Measurement& m, const CoupledGraph& graph, NodeId destination, Micros per_hop) {
    return Router(graph).deliver(m, destination, per_hop);
}

SequenceThresholdPolicy::SequenceThresholdPolicy(const PlantConfig& plant, Options options)
    : plant_(plant), options_(options) {}

PolicyOutcome SequenceThresholdPolicy::evaluate(NodeId, std::span<const DeliveredData> inputs) const {
    PolicyOutcome out;
    std::vector<NodeId> faulty;
    for (const auto& in : inputs) {
        const NodeId src = in.payload.source;
        const auto idx = plant_.index_of(src);
        const double base = idx ? plant_.nodes[*idx].current_magnitude : 1.0;
        const double neg = in.payload.current_seq.negative.magnitude() / base;
        const double zero = in.payload.current_seq.zero.magnitude() / base;
        if (neg > options_.threshold_pu || zero > options_.threshold_pu) faulty.push_back(src);
    }
    std::sort(faulty.begin(), faulty.end());
    faulty.erase(std::unique(faulty.begin(), faulty.end()), faulty.end());
    if (faulty.empty()) return out;

    out.verdict = Verdict::fault_suspected(faulty.front());
    if (options_.trip_on_fault) {
        for (NodeId n : faulty) {
            const auto idx = plant_.index_of(n);
            if (idx && plant_.nodes[*idx].kind == NodeKind::PhysicalLoad) {
                out.proposals.push_back({{n, Capability::Breaker}, BreakerAction::Open});
            }
        }
    }
    return out;
}

Decision decide(NodeId core, std::span<const DeliveredData> inputs, const DecisionPolicy& policy,
                Micros decision_latency) {
    if (inputs.empty()) {
        throw PipelineError(PipelineErrorKind::EmptyInputs,
                            "core node " + std::to_string(core.index) + " has nothing to decide on");
    }
    Micros latest = 0;
    for (const auto& in : inputs) {
        if (in.destination != core) {
            throw PipelineError(PipelineErrorKind::MisaddressedInput,
                                "input for node " + std::to_string(in.destination.index) +
                                    " handed to node " + std::to_string(core.index));
        }
        latest = std::max(latest, in.delivered_at);
    }
    PolicyOutcome outcome = policy.evaluate(core, inputs);
    Decision d;
    d.core = core;
    d.cycle = inputs.front().payload.cycle;
    d.verdict = outcome.verdict;
    d.proposals = std::move(outcome.proposals);
    d.decided_at = latest + decision_latency;
    return d;
}

std::vector<ControlCommand> control_convert(const Decision& decision, Micros command_latency) {
    std::vector<ControlCommand> out;
    out.reserve(decision.proposals.size());
    for (const auto& p : decision.proposals) {
        out.push_back({p, decision.decided_at + command_latency, decision.core, false});
    }
    std::stable_sort(out.begin(), out.end(), [](const ControlCommand& a, const ControlCommand& b) {
        return a.command.target < b.command.target;
    });
    return out;
}

PlantState actuate(std::span<const ControlCommand> commands, const Plant& plant, const PlantState& state) {
    std::vector<ActuationCommand> raw;
    raw.reserve(commands.size());
    for (const auto& c : commands) raw.push_back(c.command);
    return plant.advance(state, raw);
}

World make_world(CoupledGraph graph, std::shared_ptr<const Plant> plant, TerminalRegistry registry,
                 std::shared_ptr<const DecisionPolicy> policy, AttackSpec attacks, LatencyConfig latency,
                 Micros cycle_period, std::uint64_t seed) {
    World w;
    w.router = std::make_shared<const Router>(graph);
    w.graph = std::move(graph);
    w.plant_state = plant->init(seed);
    w.plant = std::move(plant);
    w.registry = std::move(registry);
    w.policy = std::move(policy);
    w.attacks = std::move(attacks);
    w.latency = latency;
    w.cycle_period = cycle_period;
    return w;
}

namespace {

template <typename Fn>
auto stage(const char* name, std::uint64_t cycle, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        std::throw_with_nested(PipelineError(name, cycle, e.what()));
    }
}

}  // namespace

CycleRecord run_cycle(World& world) {
    const std::uint64_t n = world.next_cycle();
    const auto& lat = world.latency;

    CycleRecord rec;
    rec.cycle = n;
    rec.started_at = std::max(world.clock, (n - 1) * world.cycle_period);

    rec.measurements = stage("perceive", n, [&] {
        return perceive(*world.plant, world.plant_state, world.graph, n, rec.started_at + lat.perception,
                        world.decimals);
    });

    stage("communicate", n, [&] {
        for (const auto& m : rec.measurements) {
            Measurement sent = m;
            if (uplink_tampered(world.attacks, m.source, n)) {
                sent = quantize(tamper_uplink(m, world.attacks, n), world.decimals);
            }
            const NodeId dest = *world.graph.coupled_core(m.source);
            rec.delivered.push_back(world.router->deliver(sent, dest, lat.per_hop));
        }
    });

    stage("decide", n, [&] {
        std::map<NodeId, std::vector<DeliveredData>> inbox;
        for (const auto& d : rec.delivered) inbox[d.destination].push_back(d);
        for (const auto& [core, inputs] : inbox) {
            rec.decisions.push_back(decide(core, inputs, *world.policy, lat.decision));
        }
    });

    stage("control", n, [&] {
        for (const auto& d : rec.decisions) {
            auto cmds = control_convert(d, lat.command);
            rec.issued.insert(rec.issued.end(), cmds.begin(), cmds.end());
        }
        std::stable_sort(rec.issued.begin(), rec.issued.end(), [](const ControlCommand& a, const ControlCommand& b) {
            return a.command.target < b.command.target;
        });
    });

    stage("coordinate", n, [&] {
        CycleState state = world.registry.snapshot(n);
        for (const auto& c : rec.issued) {
            const Terminal* control = world.registry.bound(TerminalRole::Control, c.command.target.node);
            if (control == nullptr) continue;
            state.terminals[control->d_id].pending_commands.push_back(world.graph.name(c.issuer) + ":" +
                                                                      describe(c.command.value));
        }
        rec.tasks = world.registry.coordinate_tasks(state);
    });

    stage("downlink", n, [&] {
        std::vector<Actuator> legitimate;
        Micros window = 0;
        for (const auto& d : rec.decisions) window = std::max(window, d.decided_at + lat.command);
        for (const auto& c : rec.issued) {
            rec.applied.push_back(tamper_downlink(c, world.attacks, n));
            legitimate.push_back(c.command.target);
        }
        auto phantom = inject_phantom_command(world.attacks, n, legitimate, world.graph, window);
        rec.applied.insert(rec.applied.end(), phantom.begin(), phantom.end());
        std::stable_sort(rec.applied.begin(), rec.applied.end(), [](const ControlCommand& a, const ControlCommand& b) {
            return a.command.target < b.command.target;
        });
    });

    world.plant_state = stage("actuate", n, [&] { return actuate(rec.applied, *world.plant, world.plant_state); });

    stage("feedback", n, [&] {
        for (const auto& t : rec.tasks) {
            if (t.kind == TaskKind::Actuate) world.registry.record_feedback(t.target, {n, t.task_id, t.payload, true});
        }
        for (const auto& c : rec.applied) {
            const Terminal* exec = world.registry.bound(TerminalRole::Execution, c.command.target.node);
            if (exec == nullptr) continue;
            world.registry.record_feedback(exec->d_id, {n, "c" + std::to_string(n) + ":execute:" + exec->d_id,
                                                        describe(c.command.value), true});
        }
    });

    Micros last = rec.started_at;
    for (const auto& m : rec.measurements) last = std::max(last, m.perceived_at);
    for (const auto& d : rec.delivered) last = std::max(last, d.delivered_at);
    for (const auto& d : rec.decisions) last = std::max(last, d.decided_at);
    for (const auto& c : rec.applied) last = std::max(last, c.issued_at);
    world.clock = last + 1;

    rec.plant = world.plant_state;
    return rec;
}

}  // namespace mgcps
