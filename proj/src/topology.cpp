#include "mgcc/topology.hpp"

#include "mgcc/error.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace mgcc {

namespace {

std::string cell(std::size_t i, std::size_t j)
{
    return "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

bool connected(const std::vector<std::vector<NodeId>>& neighbours)
{
    const std::size_t n = neighbours.size();
    std::vector<bool> seen(n, false);
    std::queue<NodeId> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const NodeId i = frontier.front();
        frontier.pop();
        for (const NodeId j : neighbours[i]) {
            if (!seen[j]) {
                seen[j] = true;
                ++reached;
                frontier.push(j);
            }
        }
    }
    return reached == n;
}

}  // namespace

Topology Topology::from_adjacency(const std::vector<std::vector<double>>& adjacency)
{
    const std::size_t n = adjacency.size();
    if (n == 0) {
        throw Error(Errc::EmptyTopology, "adjacency matrix has no rows");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency[i].size() != n) {
            throw Error(Errc::NotSquare, "row " + std::to_string(i) + " has " +
                                             std::to_string(adjacency[i].size()) +
                                             " entries, expected " + std::to_string(n));
        }
    }

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency[i][i] != 0.0) {
            throw Error(Errc::SelfLoop, "non-zero diagonal entry " + cell(i, i));
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (adjacency[i][j] < 0.0) {
                throw Error(Errc::NegativeWeight, "negative entry " + cell(i, j));
            }
            if (adjacency[i][j] != adjacency[j][i]) {
                throw Error(Errc::NotSymmetric,
                            "entry " + cell(i, j) + " differs from " + cell(j, i));
            }
            if (j > i && adjacency[i][j] > 0.0) {
                edges.push_back({i, j});
            }
        }
    }
    return from_edges(n, edges);
}

Topology Topology::from_edges(std::size_t node_count, const std::vector<Edge>& edges)
{
    if (node_count == 0) {
        throw Error(Errc::EmptyTopology, "graph has no nodes");
    }
    Topology t;
    t.neighbours_.assign(node_count, {});
    for (const Edge& e : edges) {
        if (e.a >= node_count || e.b >= node_count) {
            throw Error(Errc::InvalidArgument, "edge endpoint out of range");
        }
        if (e.a == e.b) {
            throw Error(Errc::SelfLoop, "edge {" + std::to_string(e.a) + "," +
                                            std::to_string(e.b) + "}");
        }
        const Edge norm{std::min(e.a, e.b), std::max(e.a, e.b)};
        if (std::find(t.edges_.begin(), t.edges_.end(), norm) != t.edges_.end()) {
            continue;
        }
        t.edges_.push_back(norm);
        t.neighbours_[norm.a].push_back(norm.b);
        t.neighbours_[norm.b].push_back(norm.a);
    }
    for (auto& list : t.neighbours_) {
        std::sort(list.begin(), list.end());
    }
    std::sort(t.edges_.begin(), t.edges_.end(),
              [](const Edge& x, const Edge& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });

    if (!connected(t.neighbours_)) {
        throw Error(Errc::Disconnected, "communication graph is not connected");
    }
    t.index();
    return t;
}

void Topology::index()
{
    const std::size_t n = node_count();
    directed_.clear();
    outgoing_.assign(n, {});
    for (NodeId i = 0; i < n; ++i) {
        for (const NodeId j : neighbours_[i]) {
            outgoing_[i].push_back(directed_.size());
            directed_.push_back({i, j, *edge_index(i, j)});
        }
    }
    reverse_.resize(directed_.size());
    for (std::size_t k = 0; k < directed_.size(); ++k) {
        reverse_[k] = *directed_index(directed_[k].neighbour, directed_[k].node);
    }
}

std::optional<std::size_t> Topology::edge_index(NodeId i, NodeId j) const
{
    const Edge key{std::min(i, j), std::max(i, j)};
    const auto it = std::lower_bound(
        edges_.begin(), edges_.end(), key,
        [](const Edge& x, const Edge& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });
    if (it == edges_.end() || !(*it == key)) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - edges_.begin());
}

std::optional<std::size_t> Topology::directed_index(NodeId node, NodeId neighbour) const
{
    if (node >= node_count()) {
        return std::nullopt;
    }
    for (const std::size_t k : outgoing_[node]) {
        if (directed_[k].neighbour == neighbour) {
            return k;
        }
    }
    return std::nullopt;
}

std::vector<std::vector<double>> Topology::adjacency() const
{
    std::vector<std::vector<double>> a(node_count(), std::vector<double>(node_count(), 0.0));
    for (const Edge& e : edges_) {
        a[e.a][e.b] = 1.0;
        a[e.b][e.a] = 1.0;
    }
    return a;
}

DegreeSummary degrees(const Topology& topology)
{
    DegreeSummary s;
    s.degrees.reserve(topology.node_count());
    for (NodeId i = 0; i < topology.node_count(); ++i) {
        s.degrees.push_back(topology.degree(i));
    }
    s.d_max = *std::max_element(s.degrees.begin(), s.degrees.end());
    s.d_min = *std::min_element(s.degrees.begin(), s.degrees.end());
    return s;
}

}  // namespace mgcc
