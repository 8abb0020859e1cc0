// SPDX-License-Identifier: Apache-2.0

#include "mgcps/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mgcps {

Micros Scenario::cycle_period() const {
    return static_cast<Micros>(std::llround(dt * 1e6));
}

namespace {

using Kind = ScenarioErrorKind;

std::optional<std::size_t> line_of(const YAML::Node& n) {
    if (!n.IsDefined()) return std::nullopt;
    const auto mark = n.Mark();
    if (mark.is_null()) return std::nullopt;
    return static_cast<std::size_t>(mark.line) + 1;
}

[[noreturn]] void parse_error(const YAML::Node& at, const std::string& field, const std::string& what) {
    throw ScenarioError(Kind::ParseError, what, field, line_of(at));
}

[[noreturn]] void validation_error(const YAML::Node& at, const std::string& field, const std::string& what) {
    throw ScenarioError(Kind::ValidationError, what, field, line_of(at));
}

void require_map(const YAML::Node& n, const std::string& field) {
    if (!n.IsMap()) parse_error(n, field, "expected a mapping");
}

void check_keys(const YAML::Node& n, const std::string& field, std::initializer_list<std::string_view> allowed) {
    require_map(n, field);
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            parse_error(kv.first, field.empty() ? key : field + "." + key, "unknown key");
        }
    }
}

template <typename T>
T as(const YAML::Node& n, const std::string& field, const char* expected) {
    if (!n.IsScalar()) parse_error(n, field, std::string("expected ") + expected);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        parse_error(n, field, std::string("expected ") + expected);
    }
}

std::string join(const std::string& a, const std::string& b) {
    return a.empty() ? b : a + "." + b;
}

double get_double(const YAML::Node& parent, const std::string& path, const char* key, double fallback) {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    const double v = as<double>(n, join(path, key), "a number");
    if (!std::isfinite(v)) parse_error(n, join(path, key), "expected a finite number");
    return v;
}

std::int64_t get_int(const YAML::Node& parent, const std::string& path, const char* key, std::int64_t fallback) {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    return as<std::int64_t>(n, join(path, key), "an integer");
}

std::uint64_t get_positive(const YAML::Node& parent, const std::string& path, const char* key,
                           std::uint64_t fallback) {
    const std::int64_t v = get_int(parent, path, key, static_cast<std::int64_t>(fallback));
    if (v < 1) validation_error(parent[key], join(path, key), "must be >= 1");
    return static_cast<std::uint64_t>(v);
}

std::string get_string(const YAML::Node& parent, const std::string& path, const char* key,
                       std::optional<std::string> fallback = {}) {
    const YAML::Node n = parent[key];
    if (!n) {
        if (fallback) return *fallback;
        parse_error(parent, join(path, key), "missing");
    }
    return as<std::string>(n, join(path, key), "a string");
}

NodeId resolve(const CoupledGraph& g, const YAML::Node& at, const std::string& field, const std::string& name) {
    const auto id = g.find(name);
    if (!id) validation_error(at, field, "unknown node '" + name + "'");
    return *id;
}

std::vector<TopologySpec::NamePair> parse_pairs(const YAML::Node& n, const std::string& field) {
    std::vector<TopologySpec::NamePair> out;
    if (!n) return out;
    if (!n.IsSequence()) parse_error(n, field, "expected a list of [a, b] pairs");
    for (std::size_t i = 0; i < n.size(); ++i) {
        const auto& p = n[i];
        const std::string f = field + "[" + std::to_string(i) + "]";
        if (!p.IsSequence() || p.size() != 2) parse_error(p, f, "expected a pair [a, b]");
        out.emplace_back(as<std::string>(p[0], f, "a node name"), as<std::string>(p[1], f, "a node name"));
    }
    return out;
}

TopologySpec parse_topology(const YAML::Node& n) {
    if (!n) parse_error(n, "topology", "missing");
    check_keys(n, "topology", {"fixture", "nodes", "edges", "coupling"});
    if (n["fixture"]) {
        const auto name = as<std::string>(n["fixture"], "topology.fixture", "a fixture name");
        if (name != "fig6") validation_error(n["fixture"], "topology.fixture", "unknown topology '" + name + "'");
        if (n["nodes"] || n["edges"] || n["coupling"]) {
            parse_error(n, "topology", "a topology fixture cannot be combined with nodes or edges");
        }
        return fig6_topology();
    }
    TopologySpec spec;
    const YAML::Node nodes = n["nodes"];
    if (!nodes || !nodes.IsSequence()) parse_error(n, "topology.nodes", "expected a list of nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string f = "topology.nodes[" + std::to_string(i) + "]";
        check_keys(nodes[i], f, {"name", "kind"});
        const auto kind_text = get_string(nodes[i], f, "kind");
        const auto kind = parse_node_kind(kind_text);
        if (!kind) parse_error(nodes[i]["kind"], f + ".kind", "expected power, load, core or transmission");
        spec.nodes.push_back({get_string(nodes[i], f, "name"), *kind});
    }
    spec.edges = parse_pairs(n["edges"], "topology.edges");
    spec.coupling = parse_pairs(n["coupling"], "topology.coupling");
    return spec;
}

void apply_nominal(const YAML::Node& n, const std::string& path, NodeNominal& nominal, bool allow_weight) {
    check_keys(n, path, {"voltage", "voltage_angle", "current", "current_angle", "noise", "weight"});
    nominal.voltage_magnitude = get_double(n, path, "voltage", nominal.voltage_magnitude);
    nominal.voltage_angle_deg = get_double(n, path, "voltage_angle", nominal.voltage_angle_deg);
    nominal.current_magnitude = get_double(n, path, "current", nominal.current_magnitude);
    nominal.current_angle_deg = get_double(n, path, "current_angle", nominal.current_angle_deg);
    nominal.noise = get_double(n, path, "noise", nominal.noise);
    if (n["weight"]) {
        if (!allow_weight) parse_error(n["weight"], path + ".weight", "weights are set per load");
        nominal.redistribution_weight = get_double(n, path, "weight", 0.0);
    }
}

PlantConfig parse_plant(const YAML::Node& n, const CoupledGraph& graph, double dt) {
    PlantConfig cfg = PlantConfig::defaults_for(graph);
    cfg.dt = dt;
    if (!n) return cfg;
    check_keys(n, "plant", {"substeps", "defaults", "nodes", "transient"});
    cfg.substeps = get_positive(n, "plant", "substeps", cfg.substeps);
    if (const auto d = n["defaults"]) {
        for (auto& nominal : cfg.nodes) {
            const double weight = nominal.redistribution_weight;
            apply_nominal(d, "plant.defaults", nominal, false);
            nominal.redistribution_weight = weight;
        }
    }
    if (const auto nodes = n["nodes"]) {
        require_map(nodes, "plant.nodes");
        for (const auto& kv : nodes) {
            const auto name = kv.first.as<std::string>();
            const std::string path = "plant.nodes." + name;
            const NodeId id = resolve(graph, kv.first, path, name);
            const auto idx = cfg.index_of(id);
            if (!idx) validation_error(kv.first, path, "'" + name + "' is not a physical node");
            apply_nominal(kv.second, path, cfg.nodes[*idx], cfg.nodes[*idx].kind == NodeKind::PhysicalLoad);
        }
    }
    if (const auto t = n["transient"]) {
        check_keys(t, "plant.transient", {"cycles", "amplitude", "period_cycles", "damping"});
        const auto cycles = get_int(t, "plant.transient", "cycles", static_cast<std::int64_t>(cfg.transient.cycles));
        if (cycles < 0) validation_error(t["cycles"], "plant.transient.cycles", "must be >= 0");
        cfg.transient.cycles = static_cast<std::size_t>(cycles);
        cfg.transient.amplitude = get_double(t, "plant.transient", "amplitude", cfg.transient.amplitude);
        cfg.transient.period_cycles = get_double(t, "plant.transient", "period_cycles", cfg.transient.period_cycles);
        cfg.transient.damping = get_double(t, "plant.transient", "damping", cfg.transient.damping);
    }
    try {
        cfg.validate();
    } catch (const PlantError& e) {
        validation_error(n, "plant", e.what());
    }
    return cfg;
}

std::set<std::string> parse_string_set(const YAML::Node& n, const std::string& field) {
    std::set<std::string> out;
    if (!n) return out;
    if (!n.IsSequence()) parse_error(n, field, "expected a list of strings");
    for (const auto& s : n) out.insert(as<std::string>(s, field, "a string"));
    return out;
}

std::vector<Terminal> parse_terminals(const YAML::Node& n, const CoupledGraph& graph) {
    std::vector<Terminal> out;
    if (!n || (n.IsScalar() && n.as<std::string>() == "auto")) return out;
    if (!n.IsSequence()) parse_error(n, "terminals", "expected 'auto' or a list of terminals");
    TerminalRegistry check;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const auto& t = n[i];
        const std::string f = "terminals[" + std::to_string(i) + "]";
        check_keys(t, f, {"id", "role", "function", "node", "actions", "required_info", "goals", "strategies"});
        Terminal term;
        term.d_id = get_string(t, f, "id");
        const auto role = parse_terminal_role(get_string(t, f, "role"));
        if (!role) parse_error(t["role"], f + ".role", "expected perception, control, coordination or execution");
        term.role = *role;
        term.function = get_string(t, f, "function", std::string());
        if (t["node"]) term.bound_node = resolve(graph, t["node"], f + ".node", get_string(t, f, "node"));
        term.actions = parse_string_set(t["actions"], f + ".actions");
        term.required_info = parse_string_set(t["required_info"], f + ".required_info");
        term.goals = parse_string_set(t["goals"], f + ".goals");
        term.strategies = parse_string_set(t["strategies"], f + ".strategies");
        try {
            check.register_terminal(term);
        } catch (const TerminalError& e) {
            validation_error(t, f, e.what());
        }
        out.push_back(std::move(term));
    }
    if (check.coordinator() == nullptr) validation_error(n, "terminals", "no coordination terminal");
    return out;
}

PolicySettings parse_policy(const YAML::Node& n) {
    PolicySettings p;
    if (!n) return p;
    check_keys(n, "policy", {"kind", "threshold_pu", "trip_on_fault"});
    p.kind = get_string(n, "policy", "kind", p.kind);
    if (p.kind != "sequence-threshold") validation_error(n["kind"], "policy.kind", "unknown policy '" + p.kind + "'");
    p.options.threshold_pu = get_double(n, "policy", "threshold_pu", p.options.threshold_pu);
    if (!(p.options.threshold_pu > 0.0)) validation_error(n["threshold_pu"], "policy.threshold_pu", "must be > 0");
    if (n["trip_on_fault"]) p.options.trip_on_fault = as<bool>(n["trip_on_fault"], "policy.trip_on_fault", "a boolean");
    return p;
}

LatencyConfig parse_latency(const YAML::Node& n) {
    LatencyConfig l;
    if (!n) return l;
    check_keys(n, "latency", {"perception_us", "per_hop_us", "decision_us", "command_us"});
    l.perception = get_positive(n, "latency", "perception_us", l.perception);
    l.per_hop = get_positive(n, "latency", "per_hop_us", l.per_hop);
    l.decision = get_positive(n, "latency", "decision_us", l.decision);
    l.command = get_positive(n, "latency", "command_us", l.command);
    return l;
}

Phasor parse_tamper_phasor(const YAML::Node& n, const std::string& field, std::optional<double> default_mag,
                           double base) {
    if (n.IsScalar()) {
        if (!default_mag) parse_error(n, field, "no default magnitude; give {magnitude, angle}");
        return Phasor(*default_mag, as<double>(n, field, "an angle in degrees"));
    }
    check_keys(n, field, {"magnitude", "magnitude_pu", "angle"});
    if (n["magnitude"] && n["magnitude_pu"]) parse_error(n, field, "give magnitude or magnitude_pu, not both");
    std::optional<double> mag = default_mag;
    if (n["magnitude"]) mag = get_double(n, field, "magnitude", 0.0);
    if (n["magnitude_pu"]) mag = get_double(n, field, "magnitude_pu", 0.0) * base;
    if (!mag) parse_error(n, field, "missing magnitude");
    if (*mag < 0.0) validation_error(n, field, "magnitude must be >= 0");
    return Phasor(*mag, get_double(n, field, "angle", 0.0));
}

std::optional<std::uint64_t> parse_end(const YAML::Node& n, const std::string& field) {
    if (!n["end"]) return std::nullopt;
    return get_positive(n, field, "end", 1);
}

MeasurementInjection parse_measurement_attack(const YAML::Node& n, const std::string& f, const CoupledGraph& graph,
                                              const PlantConfig& plant) {
    check_keys(n, f, {"type", "target", "channel", "start", "end", "magnitude", "magnitude_pu", "tamper"});
    MeasurementInjection inj;
    inj.target = resolve(graph, n["target"], f + ".target", get_string(n, f, "target"));
    const auto channel = get_string(n, f, "channel", std::string("current"));
    if (channel == "current") {
        inj.channel = Channel::Current;
    } else if (channel == "voltage") {
        inj.channel = Channel::Voltage;
    } else {
        parse_error(n["channel"], f + ".channel", "expected current or voltage");
    }
    inj.start = get_positive(n, f, "start", 1);
    inj.end = parse_end(n, f);

    const auto idx = plant.index_of(inj.target);
    if (!idx) validation_error(n["target"], f + ".target", "not a physical node of the plant");
    const double base = inj.channel == Channel::Current ? plant.nodes[*idx].current_magnitude
                                                        : plant.nodes[*idx].voltage_magnitude;
    std::optional<double> default_mag;
    if (n["magnitude"] && n["magnitude_pu"]) parse_error(n, f, "give magnitude or magnitude_pu, not both");
    if (n["magnitude"]) default_mag = get_double(n, f, "magnitude", 0.0);
    if (n["magnitude_pu"]) default_mag = get_double(n, f, "magnitude_pu", 0.0) * base;
    if (default_mag && *default_mag < 0.0) validation_error(n, f, "magnitude must be >= 0");

    const YAML::Node tamper = n["tamper"];
    if (!tamper || !tamper.IsSequence() || tamper.size() == 0) {
        parse_error(n, f + ".tamper", "expected a nonempty list of per-cycle overrides");
    }
    for (std::size_t i = 0; i < tamper.size(); ++i) {
        const auto& e = tamper[i];
        const std::string ef = f + ".tamper[" + std::to_string(i) + "]";
        check_keys(e, ef, {"cycle", "positive", "negative", "zero"});
        const std::uint64_t cycle = get_positive(e, ef, "cycle", 1);
        if (!e["negative"] || !e["zero"]) parse_error(e, ef, "negative and zero are required");
        SequenceOverride ov;
        ov.negative = parse_tamper_phasor(e["negative"], ef + ".negative", default_mag, base);
        ov.zero = parse_tamper_phasor(e["zero"], ef + ".zero", default_mag, base);
        if (e["positive"]) ov.positive = parse_tamper_phasor(e["positive"], ef + ".positive", std::nullopt, base);
        if (!inj.tamper.emplace(cycle, ov).second) validation_error(e, ef + ".cycle", "duplicate cycle");
    }
    return inj;
}

CommandInjection parse_command_attack(const YAML::Node& n, const std::string& f, const CoupledGraph& graph) {
    check_keys(n, f, {"type", "target", "capability", "start", "end", "override", "c"});
    CommandInjection inj;
    inj.target.node = resolve(graph, n["target"], f + ".target", get_string(n, f, "target"));
    const auto cap = get_string(n, f, "capability", std::string("breaker"));
    if (cap == "breaker") {
        inj.target.capability = Capability::Breaker;
    } else if (cap == "setpoint") {
        inj.target.capability = Capability::Setpoint;
    } else {
        parse_error(n["capability"], f + ".capability", "expected breaker or setpoint");
    }
    inj.start = get_positive(n, f, "start", 1);
    inj.end = parse_end(n, f);
    inj.c = get_double(n, f, "c", 0.0);
    if (const auto o = n["override"]) {
        if (inj.target.capability == Capability::Breaker) {
            const auto text = as<std::string>(o, f + ".override", "open, close or hold");
            if (text == "open") {
                inj.override_value = BreakerAction::Open;
            } else if (text == "close") {
                inj.override_value = BreakerAction::Close;
            } else if (text == "hold") {
                inj.override_value = BreakerAction::Hold;
            } else {
                parse_error(o, f + ".override", "expected open, close or hold");
            }
        } else {
            inj.override_value = as<double>(o, f + ".override", "a setpoint");
        }
    }
    return inj;
}

AttackSpec parse_attacks(const YAML::Node& n, const CoupledGraph& graph, const PlantConfig& plant) {
    AttackSpec spec;
    if (!n) return spec;
    if (!n.IsSequence()) parse_error(n, "attacks", "expected a list");
    for (std::size_t i = 0; i < n.size(); ++i) {
        const std::string f = "attacks[" + std::to_string(i) + "]";
        require_map(n[i], f);
        const auto type = get_string(n[i], f, "type");
        if (type == "measurement") {
            spec.entries.emplace_back(parse_measurement_attack(n[i], f, graph, plant));
        } else if (type == "command") {
            spec.entries.emplace_back(parse_command_attack(n[i], f, graph));
        } else {
            parse_error(n[i]["type"], f + ".type", "expected measurement or command");
        }
    }
    try {
        spec.validate();
        spec.validate_against(graph, plant);
    } catch (const AttackError& e) {
        validation_error(n, "attacks", e.what());
    }
    return spec;
}

}  // namespace

Scenario parse_scenario(std::string_view yaml, std::string_view origin) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml));
    } catch (const YAML::ParserException& e) {
        throw ScenarioError(Kind::ParseError, std::string(origin) + ": " + e.msg, {},
                            static_cast<std::size_t>(e.mark.line) + 1);
    }
    check_keys(root, "", {"name", "horizon", "dt", "seed", "decimals", "topology", "plant", "terminals", "policy",
                          "latency", "attacks", "output"});

    Scenario s;
    s.name = get_string(root, "", "name", std::string(origin));
    const std::int64_t horizon = get_int(root, "", "horizon", 0);
    if (horizon < 1) validation_error(root["horizon"] ? root["horizon"] : root, "horizon", "must be >= 1");
    s.horizon = static_cast<std::uint64_t>(horizon);
    s.dt = get_double(root, "", "dt", s.dt);
    if (!(s.dt > 0.0) || s.cycle_period() == 0) validation_error(root["dt"], "dt", "must be at least 1e-6 s");
    const std::int64_t seed = get_int(root, "", "seed", static_cast<std::int64_t>(s.seed));
    if (seed < 0) validation_error(root["seed"], "seed", "must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
    s.decimals = static_cast<int>(get_int(root, "", "decimals", s.decimals));
    if (s.decimals < 0 || s.decimals > 12) validation_error(root["decimals"], "decimals", "must be in [0, 12]");

    s.topology = parse_topology(root["topology"]);
    try {
        s.graph = build_graph(s.topology);
    } catch (const TopologyError& e) {
        validation_error(root["topology"], "topology", e.what());
    }
    s.plant = parse_plant(root["plant"], s.graph, s.dt);
    s.terminals = parse_terminals(root["terminals"], s.graph);
    s.policy = parse_policy(root["policy"]);
    s.latency = parse_latency(root["latency"]);
    s.attacks = parse_attacks(root["attacks"], s.graph, s.plant);
    if (const auto out = root["output"]) {
        check_keys(out, "output", {"dir"});
        s.output_dir = get_string(out, "output", "dir", s.output_dir);
    }
    return s;
}

Scenario load_scenario(std::string_view name_or_path) {
    if (const auto src = fixture_source(name_or_path)) return parse_scenario(*src, name_or_path);
    std::ifstream in{std::string(name_or_path)};
    if (!in) {
        throw ScenarioError(Kind::Io, "no fixture or readable file named '" + std::string(name_or_path) + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), name_or_path);
}

World make_world(const Scenario& scenario) {
    auto plant = std::make_shared<const SignalPlant>(scenario.plant);
    TerminalRegistry registry;
    if (scenario.terminals.empty()) {
        registry = default_roster(scenario.graph);
    } else {
        for (const auto& t : scenario.terminals) registry.register_terminal(t);
    }
    auto policy = std::make_shared<const SequenceThresholdPolicy>(scenario.plant, scenario.policy.options);
    World w = make_world(scenario.graph, plant, std::move(registry), std::move(policy), scenario.attacks,
                         scenario.latency, scenario.cycle_period(), scenario.seed);
    w.decimals = scenario.decimals;
    return w;
}

// ---------------------------------------------------------------------------
// Telemetry

namespace {

constexpr const char* kColumns[] = {
    "cycle",     "node",      "va_mag",     "va_ang",     "vb_mag",    "vb_ang",    "vc_mag",    "vc_ang",
    "ia_mag",    "ia_ang",    "ib_mag",     "ib_ang",     "ic_mag",    "ic_ang",    "v_pos_mag", "v_pos_ang",
    "v_neg_mag", "v_neg_ang", "v_zero_mag", "v_zero_ang", "i_pos_mag", "i_pos_ang", "i_neg_mag", "i_neg_ang",
    "i_zero_mag", "i_zero_ang", "verdict",  "issued",     "applied",
};
constexpr std::size_t kColumnCount = std::size(kColumns);
constexpr std::size_t kINegMag = 22;
constexpr std::size_t kIZeroMag = 24;
constexpr std::size_t kVerdict = 26;
constexpr std::size_t kIssued = 27;
constexpr std::size_t kApplied = 28;

struct Row {
    std::uint64_t cycle = 0;
    double i_neg = 0.0;
    double i_zero = 0.0;
    std::string verdict;
    std::string issued;
    std::string applied;
};

std::string fixed(double v, int decimals) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

void append_phasor(std::string& line, const Phasor& p, int decimals) {
    line += ',';
    line += fixed(p.magnitude(), decimals);
    line += ',';
    line += fixed(p.angle_deg(), decimals);
}

std::string verdict_text(const Verdict& v, const CoupledGraph& g) {
    if (!v.fault()) return "NoFault";
    return "FaultSuspected(" + g.name(*v.node) + ")";
}

std::string commands_for(const std::vector<ControlCommand>& cmds, NodeId node) {
    std::string out;
    for (const auto& c : cmds) {
        if (c.command.target.node != node) continue;
        if (!out.empty()) out += '|';
        out += describe(c.command.value);
    }
    return out.empty() ? "-" : out;
}

bool in_window(const AttackWindow& w, std::uint64_t cycle) {
    return cycle >= w.start && (!w.end || cycle <= *w.end);
}

/// Shared by the run path and the telemetry path.
class SummaryBuilder {
public:
    SummaryBuilder(std::string name, std::vector<AttackWindow> windows) {
        summary_.scenario = std::move(name);
        summary_.attack_windows = std::move(windows);
        summary_.signatures.push_back({"baseline", 0.0, 0.0});
        for (const auto& w : summary_.attack_windows) {
            summary_.signatures.push_back({w.kind + ":" + w.target + ":" + std::to_string(w.start), 0.0, 0.0});
        }
    }

    void add(const Row& r) {
        if (r.cycle != current_) flush(r.cycle);
        if (r.verdict != "NoFault") faults_.insert(r.verdict);
        if (r.issued != r.applied) ++summary_.mismatches;
        bool any = false;
        for (std::size_t i = 0; i < summary_.attack_windows.size(); ++i) {
            if (!in_window(summary_.attack_windows[i], r.cycle)) continue;
            any = true;
            bump(summary_.signatures[i + 1], r);
        }
        if (!any) bump(summary_.signatures[0], r);
    }

    RunSummary finish() {
        flush(0);
        return std::move(summary_);
    }

private:
    static void bump(SignatureStats& s, const Row& r) {
        s.max_negative = std::max(s.max_negative, r.i_neg);
        s.max_zero = std::max(s.max_zero, r.i_zero);
    }

    void flush(std::uint64_t next) {
        if (current_ != 0) {
            std::string v;
            for (const auto& f : faults_) v += (v.empty() ? "" : ";") + f;
            if (v.empty()) {
                v = "NoFault";
            } else if (!summary_.first_fault_cycle) {
                summary_.first_fault_cycle = current_;
            }
            summary_.verdicts.push_back(v);
            ++summary_.cycles;
        }
        faults_.clear();
        current_ = next;
    }

    RunSummary summary_;
    std::uint64_t current_ = 0;
    std::set<std::string> faults_;
};

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string telemetry_header() {
    std::string out;
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (i != 0) out += ',';
        out += kColumns[i];
    }
    return out;
}

std::vector<AttackWindow> attack_windows(const Scenario& scenario) {
    std::vector<AttackWindow> out;
    for (const auto& e : scenario.attacks.entries) {
        if (const auto* m = std::get_if<MeasurementInjection>(&e)) {
            out.push_back({"measurement", scenario.graph.name(m->target), m->start, m->end});
        } else {
            const auto& c = std::get<CommandInjection>(e);
            out.push_back({"command", scenario.graph.name(c.target.node), c.start, c.end});
        }
    }
    return out;
}

RunResult run_scenario(const Scenario& scenario) {
    RunResult result;
    World world = make_world(scenario);
    SummaryBuilder summary(scenario.name, attack_windows(scenario));
    const int dec = scenario.decimals;

    result.telemetry = telemetry_header() + "\n";
    result.records.reserve(scenario.horizon);
    for (std::uint64_t k = 0; k < scenario.horizon; ++k) {
        CycleRecord rec = run_cycle(world);
        for (const auto& d : rec.delivered) {
            const Measurement& m = d.payload;
            Row row;
            row.cycle = rec.cycle;
            row.i_neg = m.current_seq.negative.magnitude();
            row.i_zero = m.current_seq.zero.magnitude();
            row.verdict = "NoFault";
            for (const auto& dec_rec : rec.decisions) {
                if (dec_rec.core == d.destination) row.verdict = verdict_text(dec_rec.verdict, scenario.graph);
            }
            row.issued = commands_for(rec.issued, m.source);
            row.applied = commands_for(rec.applied, m.source);

            std::string line = std::to_string(rec.cycle) + "," + scenario.graph.name(m.source);
            for (const auto* tp : {&m.voltage, &m.current}) {
                append_phasor(line, tp->a, dec);
                append_phasor(line, tp->b, dec);
                append_phasor(line, tp->c, dec);
            }
            for (const auto* sc : {&m.voltage_seq, &m.current_seq}) {
                append_phasor(line, sc->positive, dec);
                append_phasor(line, sc->negative, dec);
                append_phasor(line, sc->zero, dec);
            }
            line += "," + row.verdict + "," + row.issued + "," + row.applied + "\n";
            result.telemetry += line;
            summary.add(row);
        }
        result.records.push_back(std::move(rec));
    }
    result.summary = summary.finish();
    return result;
}

RunSummary summarize_telemetry(std::string_view csv, std::string_view scenario_name,
                               const std::vector<AttackWindow>& windows) {
    SummaryBuilder summary(std::string(scenario_name), windows);
    const auto lines = split(csv, '\n');
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cols = split(lines[i], ',');
        if (cols.size() != kColumnCount) {
            throw ScenarioError(Kind::ParseError, "telemetry row has " + std::to_string(cols.size()) + " columns",
                                "telemetry", i + 1);
        }
        Row r;
        r.cycle = std::stoull(cols[0]);
        r.i_neg = std::stod(cols[kINegMag]);
        r.i_zero = std::stod(cols[kIZeroMag]);
        r.verdict = cols[kVerdict];
        r.issued = cols[kIssued];
        r.applied = cols[kApplied];
        summary.add(r);
    }
    return summary.finish();
}

std::string RunSummary::to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["cycles"] = cycles;
    j["mismatches"] = mismatches;
    j["first_fault_cycle"] = first_fault_cycle ? nlohmann::ordered_json(*first_fault_cycle) : nullptr;
    auto& windows = j["attack_windows"] = nlohmann::ordered_json::array();
    for (const auto& w : attack_windows) {
        windows.push_back({{"kind", w.kind},
                           {"target", w.target},
                           {"start", w.start},
                           {"end", w.end ? nlohmann::ordered_json(*w.end) : nullptr}});
    }
    auto& sigs = j["signatures"] = nlohmann::ordered_json::array();
    for (const auto& s : signatures) {
        sigs.push_back({{"window", s.window},
                        {"max_negative_current", s.max_negative},
                        {"max_zero_current", s.max_zero}});
    }
    j["verdicts"] = verdicts;
    return j.dump(2) + "\n";
}

std::string DiffReport::describe() const {
    if (match) return "traces match";
    return "first difference at line " + std::to_string(line) + "\n  expected: " + expected +
           "\n  actual:   " + actual;
}

DiffReport diff_traces(std::string_view expected, std::string_view actual) {
    const auto e = split(expected, '\n');
    const auto a = split(actual, '\n');
    DiffReport report;
    const std::size_t n = std::max(e.size(), a.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string ev = i < e.size() ? e[i] : "<end of trace>";
        const std::string av = i < a.size() ? a[i] : "<end of trace>";
        if (ev != av) {
            report.match = false;
            report.line = i + 1;
            report.expected = ev;
            report.actual = av;
            break;
        }
    }
    return report;
}

DiffReport replay_golden(const std::filesystem::path& trace, const Scenario& scenario) {
    std::ifstream in(trace, std::ios::binary);
    if (!in) throw ScenarioError(Kind::Io, "cannot read trace '" + trace.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return diff_traces(buf.str(), run_scenario(scenario).telemetry);
}

}  // namespace mgcps
