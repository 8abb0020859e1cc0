// SPDX-License-Identifier: Apache-2.0

#include "mgcps/topology.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mgcps {

std::string_view to_string(NodeKind k) noexcept {
    switch (k) {
        case NodeKind::PhysicalPower: return "power";
        case NodeKind::PhysicalLoad: return "load";
        case NodeKind::CyberCore: return "core";
        case NodeKind::CyberTransmission: return "transmission";
    }
    return "unknown";
}

std::optional<NodeKind> parse_node_kind(std::string_view s) noexcept {
    if (s == "power") return NodeKind::PhysicalPower;
    if (s == "load") return NodeKind::PhysicalLoad;
    if (s == "core") return NodeKind::CyberCore;
    if (s == "transmission") return NodeKind::CyberTransmission;
    return std::nullopt;
}

Edge make_edge(NodeId a, NodeId b) noexcept {
    return a < b ? Edge{a, b} : Edge{b, a};
}

void CoupledGraph::index() {
    position_.clear();
    by_name_.clear();
    adjacency_.assign(nodes_.size(), {});
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        position_.emplace(nodes_[i].id.index, i);
        by_name_.emplace(nodes_[i].name, nodes_[i].id);
    }
    std::sort(edges_.begin(), edges_.end());
    for (const auto& e : edges_) {
        adjacency_[position_.at(e.first.index)].push_back(e.second);
        adjacency_[position_.at(e.second.index)].push_back(e.first);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

bool CoupledGraph::contains(NodeId id) const noexcept {
    return position_.count(id.index) != 0;
}

std::size_t CoupledGraph::position(NodeId id) const {
    auto it = position_.find(id.index);
    if (it == position_.end()) {
        throw TopologyError(TopologyErrorKind::UnknownNode,
                            "node id " + std::to_string(id.index) + " is not in the graph");
    }
    return it->second;
}

const CoupledGraph::Node& CoupledGraph::node(NodeId id) const {
    return nodes_[position(id)];
}

std::optional<NodeId> CoupledGraph::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

bool CoupledGraph::adjacent(NodeId a, NodeId b) const {
    const auto& adj = neighbors(a);
    return std::binary_search(adj.begin(), adj.end(), b);
}

const std::vector<NodeId>& CoupledGraph::neighbors(NodeId id) const {
    return adjacency_[position(id)];
}

std::optional<NodeId> CoupledGraph::coupled_core(NodeId physical) const {
    for (const auto& [p, c] : coupling_) {
        if (p == physical) return c;
    }
    return std::nullopt;
}

std::optional<NodeId> CoupledGraph::coupled_physical(NodeId core) const {
    for (const auto& [p, c] : coupling_) {
        if (c == core) return p;
    }
    return std::nullopt;
}

std::vector<NodeId> CoupledGraph::physical_nodes() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_) {
        if (is_physical(n.kind)) out.push_back(n.id);
    }
    return out;
}

std::vector<NodeId> CoupledGraph::cyber_nodes() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_) {
        if (is_cyber(n.kind)) out.push_back(n.id);
    }
    return out;
}

std::vector<NodeId> CoupledGraph::nodes_of_kind(NodeKind k) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_) {
        if (n.kind == k) out.push_back(n.id);
    }
    return out;
}

namespace {

std::string pair_text(const TopologySpec::NamePair& p) {
    return "(" + p.first + ", " + p.second + ")";
}

}  // namespace

CoupledGraph build_graph(const TopologySpec& spec) {
    CoupledGraph g;
    std::unordered_map<std::string, NodeId> ids;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const auto& n = spec.nodes[i];
        if (!ids.emplace(n.name, NodeId{i}).second) {
            throw TopologyError(TopologyErrorKind::DuplicateNode, "duplicate node '" + n.name + "'");
        }
        g.nodes_.push_back({NodeId{i}, n.name, n.kind});
    }

    auto lookup = [&](const std::string& name) {
        auto it = ids.find(name);
        if (it == ids.end()) {
            throw TopologyError(TopologyErrorKind::UnknownNode, "undeclared node '" + name + "'");
        }
        return it->second;
    };

    std::set<Edge> seen;
    auto add_edge = [&](const TopologySpec::NamePair& p) {
        const NodeId a = lookup(p.first);
        const NodeId b = lookup(p.second);
        if (a == b) {
            throw TopologyError(TopologyErrorKind::SelfEdge, "self edge on '" + p.first + "'");
        }
        if (!seen.insert(make_edge(a, b)).second) {
            throw TopologyError(TopologyErrorKind::DuplicateEdge, "duplicate edge " + pair_text(p));
        }
    };
    for (const auto& e : spec.edges) add_edge(e);

    std::set<NodeId> mapped_physical;
    std::set<NodeId> mapped_core;
    for (const auto& p : spec.coupling) {
        const NodeId phys = lookup(p.first);
        const NodeId core = lookup(p.second);
        if (!is_physical(g.nodes_[phys.index].kind) ||
            g.nodes_[core.index].kind != NodeKind::CyberCore) {
            throw TopologyError(TopologyErrorKind::CouplingKindMismatch,
                                "coupling " + pair_text(p) + " must pair a physical node with a core node");
        }
        if (!mapped_physical.insert(phys).second) {
            throw TopologyError(TopologyErrorKind::CouplingNotBijective,
                                "physical node '" + p.first + "' is coupled more than once");
        }
        if (!mapped_core.insert(core).second) {
            throw TopologyError(TopologyErrorKind::CouplingNotBijective,
                                "core node '" + p.second + "' is coupled to more than one physical node");
        }
        add_edge(p);
        g.coupling_.emplace_back(phys, core);
    }

    std::size_t physical = 0;
    std::size_t cores = 0;
    for (const auto& n : g.nodes_) {
        if (is_physical(n.kind)) {
            ++physical;
            if (mapped_physical.count(n.id) == 0) {
                throw TopologyError(TopologyErrorKind::CouplingNotBijective,
                                    "physical node '" + n.name + "' has no coupled core node");
            }
        }
        if (n.kind == NodeKind::CyberCore) ++cores;
    }
    if (physical != cores) {
        throw TopologyError(TopologyErrorKind::CoreCountMismatch,
                            std::to_string(cores) + " core nodes for " + std::to_string(physical) +
                                " physical units");
    }

    g.edges_.assign(seen.begin(), seen.end());
    std::sort(g.coupling_.begin(), g.coupling_.end());
    g.index();
    return g;
}

bool AdjacencyMatrix::symmetric() const noexcept {
    for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t c = r + 1; c < n_; ++c) {
            if (entries_[r * n_ + c] != entries_[c * n_ + r]) return false;
        }
    }
    return true;
}

AdjacencyMatrix AdjacencyMatrix::transpose() const {
    AdjacencyMatrix t(n_);
    for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t c = 0; c < n_; ++c) t.set(c, r, at(r, c));
    }
    return t;
}

std::string AdjacencyMatrix::to_csv() const {
    std::string out;
    out.reserve(n_ * n_ * 2);
    for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t c = 0; c < n_; ++c) {
            if (c != 0) out.push_back(',');
            out.push_back(entries_[r * n_ + c] ? '1' : '0');
        }
        out.push_back('\n');
    }
    return out;
}

AdjacencyMatrix adjacency_matrix(const CoupledGraph& graph) {
    AdjacencyMatrix m(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) m.set(i, i, 1);
    for (const auto& e : graph.edges()) {
        const auto a = graph.position(e.first);
        const auto b = graph.position(e.second);
        m.set(a, b, 1);
        m.set(b, a, 1);
    }
    return m;
}

MatrixBlocks::Block MatrixBlocks::Block::transpose() const {
    Block t{cols, rows, std::vector<std::uint8_t>(entries.size(), 0)};
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) t.entries[c * rows + r] = at(r, c);
    }
    return t;
}

MatrixBlocks partition(const CoupledGraph& graph, const AdjacencyMatrix& m) {
    std::vector<std::size_t> cyber;
    std::vector<std::size_t> physical;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        (is_physical(graph.nodes()[i].kind) ? physical : cyber).push_back(i);
    }
    auto cut = [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
        MatrixBlocks::Block b{rows.size(), cols.size(), {}};
        b.entries.reserve(rows.size() * cols.size());
        for (auto r : rows) {
            for (auto c : cols) b.entries.push_back(m.at(r, c));
        }
        return b;
    };
    return {cut(cyber, cyber), cut(cyber, physical), cut(physical, cyber), cut(physical, physical)};
}

CoupledGraph cyber_subgraph(const CoupledGraph& graph) {
    CoupledGraph sub;
    for (const auto& n : graph.nodes()) {
        if (is_cyber(n.kind)) sub.nodes_.push_back(n);
    }
    for (const auto& e : graph.edges()) {
        if (is_cyber(graph.kind(e.first)) && is_cyber(graph.kind(e.second))) sub.edges_.push_back(e);
    }
    sub.index();
    return sub;
}

std::vector<Edge> edges_from_matrix(const CoupledGraph& graph, const AdjacencyMatrix& m) {
    std::vector<Edge> out;
    const auto& nodes = graph.nodes();
    for (std::size_t r = 0; r < m.dimension(); ++r) {
        for (std::size_t c = r + 1; c < m.dimension(); ++c) {
            if (m.at(r, c)) out.push_back(make_edge(nodes[r].id, nodes[c].id));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

TopologySpec fig6_topology() {
    TopologySpec spec;
    spec.nodes = {
        {"dg1", NodeKind::PhysicalPower},       {"load1", NodeKind::PhysicalLoad},
        {"dg2", NodeKind::PhysicalPower},       {"load2", NodeKind::PhysicalLoad},
        {"dg3", NodeKind::PhysicalPower},       {"load3", NodeKind::PhysicalLoad},
        {"router1", NodeKind::CyberTransmission}, {"router2", NodeKind::CyberTransmission},
        {"router3", NodeKind::CyberTransmission},
    };
    for (int k = 1; k <= 6; ++k) spec.nodes.push_back({"agent" + std::to_string(k), NodeKind::CyberCore});

    const char* units[] = {"dg1", "load1", "dg2", "load2", "dg3", "load3"};
    for (int k = 0; k < 6; ++k) {
        spec.edges.emplace_back("router" + std::to_string(k / 2 + 1), units[k]);
    }
    spec.edges.emplace_back("router1", "router2");
    spec.edges.emplace_back("router1", "router3");
    spec.edges.emplace_back("router2", "router3");
    for (int a = 1; a <= 6; ++a) {
        for (int b = a + 1; b <= 6; ++b) {
            spec.edges.emplace_back("agent" + std::to_string(a), "agent" + std::to_string(b));
        }
    }
    for (int k = 0; k < 6; ++k) spec.coupling.emplace_back(units[k], "agent" + std::to_string(k + 1));
    return spec;
}

}  // namespace mgcps
