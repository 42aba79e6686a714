#pragma once

// Transmission range and interference classification over a link graph.
//
// A node's transmission range is its longest incident link. Nodes inside
// that range are directly interfered (they must listen while it sends);
// nodes outside it that have a link to a directly interfered node are
// indirectly interfered; everything else is unaffected. Distances are
// compared exactly on squared micrometers.

#include "meshtopo/spatial_index.hpp"
#include "meshtopo/topology.hpp"

#include <algorithm>
#include <unordered_set>
#include <vector>

namespace meshtopo {

/// Squared transmission range in um^2; 0 for an isolated node.
inline i128 squared_transmission_range(const Topology& topo, NodeId u)
{
    i128 best = 0;
    const Point& pu = topo.position(u);
    for (NodeId v : topo.neighbors(u)) best = std::max(best, squared_distance(pu, topo.position(v)));
    return best;
}

/// Transmission range in meters.
inline double transmission_range(const Topology& topo, NodeId u)
{
    return squared_um_to_meters(squared_transmission_range(topo, u));
}

struct Classification {
    std::vector<NodeId> direct;    // sorted
    std::vector<NodeId> indirect;  // sorted
    std::vector<NodeId> none;      // sorted
};

namespace detail {

inline std::vector<NodeId> direct_set(const Topology& topo, NodeId u, const SpatialIndex* index)
{
    const i128 r2 = squared_transmission_range(topo, u);
    const Point& pu = topo.position(u);
    std::vector<NodeId> out;
    const auto nodes = topo.nodes();
    if (index != nullptr) {
        index->within(pu, r2, [&](std::size_t i) {
            if (nodes[i].id != u) out.push_back(nodes[i].id);
        });
    } else {
        for (const Node& n : nodes) {
            if (n.id != u && squared_distance(n.pos, pu) <= r2) out.push_back(n.id);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Point> positions_of(const Topology& topo)
{
    std::vector<Point> pts;
    pts.reserve(topo.node_count());
    for (const Node& n : topo.nodes()) pts.push_back(n.pos);
    return pts;
}

}  // namespace detail

inline Classification classify(const Topology& topo, NodeId u)
{
    (void)topo.index_of(u);
    Classification c;
    c.direct = detail::direct_set(topo, u, nullptr);
    std::unordered_set<NodeId> in_direct(c.direct.begin(), c.direct.end());
    std::unordered_set<NodeId> indirect;
    for (NodeId w : c.direct) {
        for (NodeId v : topo.neighbors(w)) {
            if (v != u && !in_direct.contains(v)) indirect.insert(v);
        }
    }
    c.indirect.assign(indirect.begin(), indirect.end());
    std::sort(c.indirect.begin(), c.indirect.end());
    for (const Node& n : topo.nodes()) {
        if (n.id != u && !in_direct.contains(n.id) && !indirect.contains(n.id)) c.none.push_back(n.id);
    }
    std::sort(c.none.begin(), c.none.end());
    return c;
}

struct DegreeStats {
    std::size_t total = 0;
    double average = 0.0;
};

inline DegreeStats degree_stats(const Topology& topo)
{
    DegreeStats s;
    s.total = 2 * topo.link_count();
    s.average = topo.node_count() == 0 ? 0.0 : static_cast<double>(s.total) / static_cast<double>(topo.node_count());
    return s;
}

/// Mean over nodes of |direct(u)| / (n - 1).
inline double interference_rate(const Topology& topo)
{
    const std::size_t n = topo.node_count();
    if (n < 2) throw Error("interference_rate needs at least two nodes");
    const SpatialIndex index(detail::positions_of(topo));
    double sum = 0.0;
    for (const Node& node : topo.nodes()) {
        sum += static_cast<double>(detail::direct_set(topo, node.id, &index).size()) / static_cast<double>(n - 1);
    }
    return sum / static_cast<double>(n);
}

inline double average_transmission_range(const Topology& topo)
{
    if (topo.node_count() == 0) return 0.0;
    double sum = 0.0;
    for (const Node& n : topo.nodes()) sum += transmission_range(topo, n.id);
    return sum / static_cast<double>(topo.node_count());
}

struct NodeInterference {
    NodeId node = 0;
    double range_m = 0.0;
    Classification sets;
};

struct InterferenceReport {
    std::vector<NodeInterference> nodes;  // empty unless requested
    std::size_t total_degree = 0;
    double average_degree = 0.0;
    double average_range_m = 0.0;
    double average_interference_rate = 0.0;
};

/// Aggregate metrics, optionally with the per-node partition (O(n^2) memory).
inline InterferenceReport interference_report(const Topology& topo, bool per_node = false)
{
    InterferenceReport r;
    const DegreeStats d = degree_stats(topo);
    r.total_degree = d.total;
    r.average_degree = d.average;
    r.average_range_m = average_transmission_range(topo);
    r.average_interference_rate = topo.node_count() >= 2 ? interference_rate(topo) : 0.0;
    if (per_node) {
        for (const Node& n : topo.nodes()) {
            r.nodes.push_back(NodeInterference{n.id, transmission_range(topo, n.id), classify(topo, n.id)});
        }
    }
    return r;
}

}  // namespace meshtopo
