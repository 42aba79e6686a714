#pragma once

#include "meshtopo/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace meshtopo {

using NodeId = std::int64_t;

struct Node {
    NodeId id = 0;
    Point pos;

    friend bool operator==(const Node&, const Node&) = default;
};

/// Undirected link, stored with the smaller id first.
struct Edge {
    NodeId a = 0;
    NodeId b = 0;

    Edge() = default;
    Edge(NodeId u, NodeId v) : a(std::min(u, v)), b(std::max(u, v))
    {
        if (u == v) throw Error("edge endpoints must be distinct (node " + std::to_string(u) + ")");
    }

    NodeId other(NodeId u) const { return u == a ? b : a; }

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Edge& e)
{
    return os << e.a << '-' << e.b;
}

struct Area {
    double width = 1000.0;   // meters
    double height = 1000.0;  // meters

    friend bool operator==(const Area&, const Area&) = default;
};

/// Undirected link graph over a fixed node set.
///
/// Nodes keep their insertion order (index 0..n-1); links are kept sorted.
/// Duplicate node ids, duplicate positions, self loops, duplicate links and
/// links to unknown nodes are all rejected.
class Topology {
public:
    Topology() = default;

    explicit Topology(std::vector<Node> nodes, Area area = {}) : area_(area)
    {
        nodes_.reserve(nodes.size());
        for (const Node& n : nodes) add_node(n);
    }

    void add_node(const Node& n)
    {
        if (!in_coordinate_range(n.pos)) {
            throw Error("node " + std::to_string(n.id) + " lies outside the supported coordinate range");
        }
        if (index_.contains(n.id)) {
            throw Error("duplicate node id " + std::to_string(n.id));
        }
        if (!positions_.insert(n.pos).second) {
            throw Error("node " + std::to_string(n.id) + " duplicates the position of another node");
        }
        index_.emplace(n.id, nodes_.size());
        nodes_.push_back(n);
        adjacency_.emplace_back();
    }

    void add_link(NodeId u, NodeId v)
    {
        const Edge e(u, v);
        const std::size_t iu = index_of(u), iv = index_of(v);
        if (!links_.insert(e).second) {
            throw Error("duplicate link " + std::to_string(e.a) + "-" + std::to_string(e.b));
        }
        adjacency_[iu].push_back(v);
        adjacency_[iv].push_back(u);
    }

    void add_link(const Edge& e) { add_link(e.a, e.b); }

    bool remove_link(const Edge& e)
    {
        if (links_.erase(e) == 0) return false;
        auto drop = [](std::vector<NodeId>& adj, NodeId x) {
            adj.erase(std::find(adj.begin(), adj.end(), x));
        };
        drop(adjacency_[index_of(e.a)], e.b);
        drop(adjacency_[index_of(e.b)], e.a);
        return true;
    }

    bool has_link(const Edge& e) const { return links_.contains(e); }
    bool has_node(NodeId id) const { return index_.contains(id); }

    std::size_t index_of(NodeId id) const
    {
        const auto it = index_.find(id);
        if (it == index_.end()) throw Error("unknown node id " + std::to_string(id));
        return it->second;
    }

    const Node& node(NodeId id) const { return nodes_[index_of(id)]; }
    const Point& position(NodeId id) const { return node(id).pos; }

    std::span<const Node> nodes() const { return nodes_; }
    const std::set<Edge>& links() const { return links_; }
    std::span<const NodeId> neighbors(NodeId id) const { return adjacency_[index_of(id)]; }
    std::size_t degree(NodeId id) const { return neighbors(id).size(); }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }

    const Area& area() const { return area_; }
    void set_area(Area a) { area_ = a; }

    double length(const Edge& e) const { return dist(position(e.a), position(e.b)); }
    i128 squared_length(const Edge& e) const { return squared_distance(position(e.a), position(e.b)); }

    Segment segment(const Edge& e) const { return Segment{position(e.a), position(e.b)}; }

    /// Copy of this topology with the same nodes and no links.
    Topology without_links() const { return Topology(nodes_, area_); }

    friend bool operator==(const Topology& l, const Topology& r)
    {
        return l.nodes_ == r.nodes_ && l.links_ == r.links_ && l.area_ == r.area_;
    }

private:
    Area area_;
    std::vector<Node> nodes_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::set<Point> positions_;
    std::set<Edge> links_;
    std::vector<std::vector<NodeId>> adjacency_;
};

/// True when every node can reach every other node.
inline bool is_connected(const Topology& topo)
{
    const std::size_t n = topo.node_count();
    if (n <= 1) return true;
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{topo.nodes()[0].id};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (NodeId v : topo.neighbors(u)) {
            const std::size_t iv = topo.index_of(v);
            if (!seen[iv]) {
                seen[iv] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == n;
}

/// All pairs within `range_m` meters (inclusive) become links.
inline Topology unit_disk_topology(std::vector<Node> nodes, double range_m, Area area = {})
{
    Topology topo(std::move(nodes), area);
    const double r_um = range_m * static_cast<double>(kMicrometersPerMeter);
    const i128 r2 = static_cast<i128>(std::llround(r_um)) * std::llround(r_um);
    auto sorted = std::vector<Node>(topo.nodes().begin(), topo.nodes().end());
    std::sort(sorted.begin(), sorted.end(), [](const Node& l, const Node& r) { return l.pos < r.pos; });
    const std::int64_t r_int = std::llround(r_um);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size() && sorted[j].pos.x - sorted[i].pos.x <= r_int; ++j) {
            if (squared_distance(sorted[i].pos, sorted[j].pos) <= r2) {
                topo.add_link(sorted[i].id, sorted[j].id);
            }
        }
    }
    return topo;
}

}  // namespace meshtopo
