#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mgcc {

using NodeId = std::size_t;

/// Unordered edge, stored with a < b.
struct Edge {
    NodeId a;
    NodeId b;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// One controller direction of an undirected edge: `node` acts on data
/// received from `neighbour`.
struct DirectedEdge {
    NodeId node;
    NodeId neighbour;
    std::size_t undirected;  // index into Topology::edges()
};

/// Undirected, connected communication graph among microgrid coordinators.
/// Node ids are dense and follow the order of the adjacency description.
/// Immutable after construction.
class Topology {
public:
    /// Validates a square, symmetric, zero-diagonal, non-negative adjacency
    /// matrix. Any positive entry is an edge; magnitudes are discarded.
    /// A single node with no edges is accepted as a trivially connected graph.
    static Topology from_adjacency(const std::vector<std::vector<double>>& adjacency);

    static Topology from_edges(std::size_t node_count, const std::vector<Edge>& edges);

    std::size_t node_count() const noexcept { return neighbours_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    /// Node-major, neighbours ascending. Every undirected edge appears twice.
    const std::vector<DirectedEdge>& directed_edges() const noexcept { return directed_; }

    std::span<const NodeId> neighbours(NodeId i) const { return neighbours_.at(i); }
    std::size_t degree(NodeId i) const { return neighbours_.at(i).size(); }

    std::optional<std::size_t> edge_index(NodeId i, NodeId j) const;
    std::optional<std::size_t> directed_index(NodeId node, NodeId neighbour) const;

    /// Index of the directed edge running the opposite way.
    std::size_t reverse(std::size_t directed) const { return reverse_.at(directed); }

    /// Directed edges whose controller lives at node i.
    std::span<const std::size_t> outgoing(NodeId i) const { return outgoing_.at(i); }

    std::vector<std::vector<double>> adjacency() const;

private:
    Topology() = default;
    void index();

    std::vector<std::vector<NodeId>> neighbours_;
    std::vector<Edge> edges_;
    std::vector<DirectedEdge> directed_;
    std::vector<std::size_t> reverse_;
    std::vector<std::vector<std::size_t>> outgoing_;
};

struct DegreeSummary {
    std::vector<std::size_t> degrees;
    std::size_t d_max = 0;
    std::size_t d_min = 0;
};

DegreeSummary degrees(const Topology& topology);

}  // namespace mgcc
