#pragma once

#include "meshtopo/rng.hpp"
#include "meshtopo/topology.hpp"

#include <unordered_set>
#include <vector>

namespace meshtopo {

struct Deployment {
    Area area;
    std::vector<Node> nodes;
    double initial_range_m = 300.0;
    std::uint64_t seed = 0;
};

/// n uniform points in the area, snapped to the micrometer grid. A point that
/// lands on an occupied grid position is redrawn. Ids are 0..n-1.
inline Deployment generate_deployment(std::size_t n, Area area, std::uint64_t seed, double initial_range_m = 300.0)
{
    if (!(area.width > 0) || !(area.height > 0)) throw Error("deployment area must be positive");
    Deployment d{area, {}, initial_range_m, seed};
    d.nodes.reserve(n);
    Rng rng(seed);
    std::unordered_set<Point> used;
    while (d.nodes.size() < n) {
        const double x = rng.uniform(0.0, area.width);
        const double y = rng.uniform(0.0, area.height);
        const Point p = point_from_meters(x, y);
        if (!used.insert(p).second) continue;
        d.nodes.push_back(Node{static_cast<NodeId>(d.nodes.size()), p});
    }
    return d;
}

/// Every pair within the initial range is linked.
inline Topology original_topology(const Deployment& d)
{
    return unit_disk_topology(d.nodes, d.initial_range_m, d.area);
}

}  // namespace meshtopo
