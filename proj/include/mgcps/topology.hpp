// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mgcps/error.hpp"

namespace mgcps {

/// Dense node index, assigned in declaration order.
struct NodeId {
    std::size_t index = 0;

    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class NodeKind { PhysicalPower, PhysicalLoad, CyberCore, CyberTransmission };

[[nodiscard]] constexpr bool is_physical(NodeKind k) noexcept {
    return k == NodeKind::PhysicalPower || k == NodeKind::PhysicalLoad;
}
[[nodiscard]] constexpr bool is_cyber(NodeKind k) noexcept { return !is_physical(k); }

[[nodiscard]] std::string_view to_string(NodeKind k) noexcept;
[[nodiscard]] std::optional<NodeKind> parse_node_kind(std::string_view s) noexcept;

enum class TopologyErrorKind {
    UnknownNode,
    DuplicateNode,
    DuplicateEdge,
    SelfEdge,
    CouplingNotBijective,
    CouplingKindMismatch,
    CoreCountMismatch,
};
using TopologyError = KindedError<TopologyErrorKind>;

/// Declarative topology: nodes by name, undirected edges, and the
/// physical -> core coupling pairs. Coupling pairs become graph edges.
struct TopologySpec {
    struct Node {
        std::string name;
        NodeKind kind = NodeKind::PhysicalLoad;
    };
    using NamePair = std::pair<std::string, std::string>;

    std::vector<Node> nodes;
    std::vector<NamePair> edges;
    std::vector<NamePair> coupling;
};

/// Normalized undirected edge, first < second.
struct Edge {
    NodeId first;
    NodeId second;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

[[nodiscard]] Edge make_edge(NodeId a, NodeId b) noexcept;

/// Immutable coupled cyber-physical graph.
///
/// Nodes keep the NodeId assigned by build_graph; an induced subgraph keeps
/// the ids of the parent so results can be joined back without remapping.
class CoupledGraph {
public:
    struct Node {
        NodeId id;
        std::string name;
        NodeKind kind;
    };

    CoupledGraph() = default;

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }
    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }

    [[nodiscard]] bool contains(NodeId id) const noexcept;
    [[nodiscard]] const Node& node(NodeId id) const;
    [[nodiscard]] NodeKind kind(NodeId id) const { return node(id).kind; }
    [[nodiscard]] const std::string& name(NodeId id) const { return node(id).name; }
    [[nodiscard]] std::optional<NodeId> find(std::string_view name) const;

    /// Position of the node in declaration order (matrix row).
    [[nodiscard]] std::size_t position(NodeId id) const;

    [[nodiscard]] bool adjacent(NodeId a, NodeId b) const;
    /// Neighbors sorted by id.
    [[nodiscard]] const std::vector<NodeId>& neighbors(NodeId id) const;

    [[nodiscard]] std::optional<NodeId> coupled_core(NodeId physical) const;
    [[nodiscard]] std::optional<NodeId> coupled_physical(NodeId core) const;
    [[nodiscard]] const std::vector<std::pair<NodeId, NodeId>>& coupling() const noexcept {
        return coupling_;
    }

    [[nodiscard]] std::vector<NodeId> physical_nodes() const;
    [[nodiscard]] std::vector<NodeId> cyber_nodes() const;
    [[nodiscard]] std::vector<NodeId> nodes_of_kind(NodeKind k) const;

private:
    friend CoupledGraph build_graph(const TopologySpec& spec);
    friend CoupledGraph cyber_subgraph(const CoupledGraph& graph);

    void index();

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::pair<NodeId, NodeId>> coupling_;  // (physical, core)

    std::unordered_map<std::size_t, std::size_t> position_;
    std::unordered_map<std::string, NodeId> by_name_;
    std::vector<std::vector<NodeId>> adjacency_;  // by position
};

/// Symmetric 0/1 matrix with unit diagonal, rows in declaration order.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(std::size_t n) : n_(n), entries_(n * n, 0) {}

    [[nodiscard]] std::size_t dimension() const noexcept { return n_; }
    [[nodiscard]] std::uint8_t at(std::size_t row, std::size_t col) const {
        return entries_.at(row * n_ + col);
    }
    void set(std::size_t row, std::size_t col, std::uint8_t v) { entries_.at(row * n_ + col) = v; }

    [[nodiscard]] bool symmetric() const noexcept;
    [[nodiscard]] AdjacencyMatrix transpose() const;

    /// Row-major CSV of 0/1 integers, no header, '\n' line endings.
    [[nodiscard]] std::string to_csv() const;

    friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> entries_;
};

/// The four blocks of the coupled matrix: cyber/cyber, cyber/physical,
/// physical/cyber and physical/physical. Non-square blocks are stored as
/// flat row-major vectors.
struct MatrixBlocks {
    struct Block {
        std::size_t rows = 0;
        std::size_t cols = 0;
        std::vector<std::uint8_t> entries;

        [[nodiscard]] std::uint8_t at(std::size_t r, std::size_t c) const {
            return entries.at(r * cols + c);
        }
        [[nodiscard]] Block transpose() const;
        friend bool operator==(const Block&, const Block&) = default;
    };

    Block cyber_cyber;
    Block cyber_physical;
    Block physical_cyber;
    Block physical_physical;
};

[[nodiscard]] CoupledGraph build_graph(const TopologySpec& spec);
[[nodiscard]] AdjacencyMatrix adjacency_matrix(const CoupledGraph& graph);
[[nodiscard]] MatrixBlocks partition(const CoupledGraph& graph, const AdjacencyMatrix& m);

/// Induced subgraph on CyberCore and CyberTransmission nodes; ids preserved.
[[nodiscard]] CoupledGraph cyber_subgraph(const CoupledGraph& graph);

/// Edge set recovered from the off-diagonal ones of a matrix, expressed in
/// the ids of `graph`.
[[nodiscard]] std::vector<Edge> edges_from_matrix(const CoupledGraph& graph,
                                                  const AdjacencyMatrix& m);

/// Six-unit desk microgrid: dg1, load1, dg2, load2, dg3, load3, then
/// router1..3 and agent1..6. Each router serves one generator/load pair,
/// routers are meshed, agents are meshed, agentK is coupled to unit K.
[[nodiscard]] TopologySpec fig6_topology();

}  // namespace mgcps
