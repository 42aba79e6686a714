// Deploy 100 nodes, triangulate, prune and compare the three topologies.
#include "meshtopo/meshtopo.hpp"

#include <cstdio>

int main()
{
    using namespace meshtopo;
    const Deployment d = generate_deployment(100, Area{}, 7);
    const Topology original = original_topology(d);
    const Topology dt = build_delaunay(d.nodes).link_graph(d.area);
    const PruneResult sd = prune(dt);

    std::printf("%-8s %6s %8s %9s %10s %9s\n", "kind", "links", "avg_deg", "range_m", "interf", "crossings");
    for (const auto& [name, topo] : {std::pair<const char*, const Topology*>{"original", &original},
                                     {"dt", &dt},
                                     {"dt_sd", &sd.topology}}) {
        const InterferenceReport r = interference_report(*topo);
        std::printf("%-8s %6zu %8.3f %9.2f %10.4f %9zu\n", name, topo->link_count(), r.average_degree, r.average_range_m,
                    r.average_interference_rate, count_crossings(*topo));
    }
    std::printf("pruned %zu links\n", sd.log.size());
}
