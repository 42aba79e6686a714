#pragma once

// Standard-deviation link pruning.
//
// Each endpoint classifies a link against the mean and population standard
// deviation of its own incident link lengths:
//
//   Level0: len < mu
//   Level1: mu <= len <= mu + sigma
//   Level2: mu + sigma < len <= mu + 2 sigma
//   Level3: len > mu + 2 sigma
//
// The two endpoint levels map to a pruning priority (1 is pruned first):
//
//   L3,L3 -> 1    L3,any -> 2    L2,L2 -> 3    L2,{L0,L1} -> 4    else -> 5
//
// Ties go to the link covering more nodes, then to the smaller link id.

#include "meshtopo/interference.hpp"
#include "meshtopo/spatial_index.hpp"
#include "meshtopo/topology.hpp"

#include <array>
#include <cmath>
#include <set>
#include <span>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace meshtopo {

struct NodeLinkStats {
    NodeId node = 0;
    double mean = 0.0;
    double sigma = 0.0;
};

enum class SdLevel { Level0 = 0, Level1 = 1, Level2 = 2, Level3 = 3 };

inline const char* to_string(SdLevel l)
{
    switch (l) {
    case SdLevel::Level0: return "level0";
    case SdLevel::Level1: return "level1";
    case SdLevel::Level2: return "level2";
    case SdLevel::Level3: return "level3";
    }
    return "?";
}

/// Mean and population standard deviation of a length sample.
inline NodeLinkStats length_stats(std::span<const double> lengths, NodeId node = 0)
{
    if (lengths.empty()) throw Error("length statistics need at least one link (node " + std::to_string(node) + ")");
    const auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
    if (*lo == *hi) return NodeLinkStats{node, *lo, 0.0};  // exact, no rounding drift
    long double sum = 0;
    for (double l : lengths) sum += l;
    const long double mean = sum / static_cast<long double>(lengths.size());
    long double sq = 0;
    for (double l : lengths) sq += (l - mean) * (l - mean);
    const long double var = sq / static_cast<long double>(lengths.size());
    return NodeLinkStats{node, static_cast<double>(mean), static_cast<double>(std::sqrt(var))};
}

inline NodeLinkStats node_link_stats(const Topology& topo, NodeId u)
{
    const Point& pu = topo.position(u);
    std::vector<double> lengths;
    for (NodeId v : topo.neighbors(u)) lengths.push_back(dist(pu, topo.position(v)));
    if (lengths.empty()) throw Error("node " + std::to_string(u) + " has no links");
    return length_stats(lengths, u);
}

/// Lengths within a relative 1e-12 of a band boundary count as on it. Exact
/// ties are common (the longer of a node's two links is always exactly
/// mu + sigma) and plain floating comparison would split them at random.
inline SdLevel sd_level(double length, const NodeLinkStats& s)
{
    const double tol = 1e-12 * (std::fabs(s.mean) + 2 * s.sigma + std::fabs(length));
    if (length < s.mean - tol) return SdLevel::Level0;
    if (length <= s.mean + s.sigma + tol) return SdLevel::Level1;
    if (length <= s.mean + 2 * s.sigma + tol) return SdLevel::Level2;
    return SdLevel::Level3;
}

inline int prune_priority(SdLevel a, SdLevel b)
{
    if (a == SdLevel::Level3 && b == SdLevel::Level3) return 1;
    if (a == SdLevel::Level3 || b == SdLevel::Level3) return 2;
    if (a == SdLevel::Level2 && b == SdLevel::Level2) return 3;
    if (a == SdLevel::Level2 || b == SdLevel::Level2) return 4;
    return 5;
}

struct LinkPruneKey {
    Edge link;
    SdLevel level_a = SdLevel::Level0;
    SdLevel level_b = SdLevel::Level0;
    int priority = 5;
    std::size_t covered = 0;

    /// Ranking: priority ascending, covered descending, link id ascending.
    friend bool operator<(const LinkPruneKey& l, const LinkPruneKey& r)
    {
        return std::tuple(l.priority, r.covered, l.link) < std::tuple(r.priority, l.covered, r.link);
    }
};

inline LinkPruneKey make_prune_key(const Edge& e, SdLevel level_a, SdLevel level_b, std::size_t covered)
{
    return LinkPruneKey{e, level_a, level_b, prune_priority(level_a, level_b), covered};
}

inline void rank_links(std::vector<LinkPruneKey>& keys)
{
    std::sort(keys.begin(), keys.end());
}

/// Nodes other than the endpoints within len(e) of either endpoint.
inline std::size_t covered_nodes(const Topology& topo, const Edge& e, const SpatialIndex* index = nullptr)
{
    if (!topo.has_link(e)) throw Error("unknown link " + std::to_string(e.a) + "-" + std::to_string(e.b));
    const Point& pa = topo.position(e.a);
    const Point& pb = topo.position(e.b);
    const i128 r2 = squared_distance(pa, pb);
    const auto nodes = topo.nodes();
    if (index == nullptr) {
        std::size_t count = 0;
        for (const Node& n : nodes) {
            if (n.id == e.a || n.id == e.b) continue;
            if (squared_distance(n.pos, pa) <= r2 || squared_distance(n.pos, pb) <= r2) ++count;
        }
        return count;
    }
    std::size_t count = 0;
    index->within(pa, r2, [&](std::size_t i) {
        if (nodes[i].id != e.a && nodes[i].id != e.b) ++count;
    });
    index->within(pb, r2, [&](std::size_t i) {
        if (nodes[i].id != e.a && nodes[i].id != e.b && squared_distance(nodes[i].pos, pa) > r2) ++count;
    });
    return count;
}

namespace detail {

inline LinkPruneKey current_key(const Topology& topo, const Edge& e, const std::unordered_map<NodeId, NodeLinkStats>& stats,
                                std::size_t covered)
{
    const double len = topo.length(e);
    return make_prune_key(e, sd_level(len, stats.at(e.a)), sd_level(len, stats.at(e.b)), covered);
}

/// True when removing e would disconnect its endpoints. Grows two BFS balls,
/// always expanding the smaller one, so the cost is bounded by the smaller side.
inline bool is_bridge(const Topology& topo, const Edge& e)
{
    std::unordered_map<NodeId, int> owner;
    std::array<std::vector<NodeId>, 2> frontier{std::vector<NodeId>{e.a}, std::vector<NodeId>{e.b}};
    std::array<std::size_t, 2> seen{1, 1};
    owner[e.a] = 0;
    owner[e.b] = 1;
    for (;;) {
        // One side exhausted without meeting the other: e is the only way across.
        if (frontier[0].empty() || frontier[1].empty()) return true;
        const int side = seen[1] < seen[0] ? 1 : 0;
        std::vector<NodeId> next;
        for (NodeId u : frontier[side]) {
            for (NodeId v : topo.neighbors(u)) {
                if (Edge(u, v) == e) continue;
                const auto [it, fresh] = owner.emplace(v, side);
                if (fresh) {
                    next.push_back(v);
                    ++seen[side];
                } else if (it->second != side) {
                    return false;
                }
            }
        }
        frontier[side] = std::move(next);
    }
}

}  // namespace detail

/// u's incident links in pruning order.
inline std::vector<LinkPruneKey> prune_order(const Topology& topo, NodeId u)
{
    if (topo.degree(u) == 0) throw Error("node " + std::to_string(u) + " has no links");
    std::unordered_map<NodeId, NodeLinkStats> stats;
    stats.emplace(u, node_link_stats(topo, u));
    for (NodeId v : topo.neighbors(u)) stats.emplace(v, node_link_stats(topo, v));
    std::vector<LinkPruneKey> keys;
    for (NodeId v : topo.neighbors(u)) {
        const Edge e(u, v);
        keys.push_back(detail::current_key(topo, e, stats, covered_nodes(topo, e)));
    }
    rank_links(keys);
    return keys;
}

struct PruneConfig {
    int max_priority_pruned = 4;
    bool preserve_connectivity = true;
};

struct PruneResult {
    Topology topology;
    std::vector<LinkPruneKey> log;  // removed links, in removal order, with their key at removal time
};

/// Greedy global pruning. Ties are fully resolved by link id, so the result
/// depends only on the input topology and the config.
inline PruneResult prune(const Topology& input, const PruneConfig& cfg = {})
{
    if (cfg.max_priority_pruned < 1 || cfg.max_priority_pruned > 5) throw Error("max_priority_pruned must be in 1..5");
    PruneResult out{input, {}};
    Topology& topo = out.topology;

    const SpatialIndex index(detail::positions_of(topo));
    std::map<Edge, std::size_t> covered;
    for (const Edge& e : topo.links()) covered.emplace(e, covered_nodes(topo, e, &index));

    std::unordered_map<NodeId, NodeLinkStats> stats;
    for (const Node& n : topo.nodes()) {
        if (topo.degree(n.id) > 0) stats.emplace(n.id, node_link_stats(topo, n.id));
    }

    std::set<LinkPruneKey> queue;
    std::map<Edge, LinkPruneKey> queued;
    std::set<Edge> bridges;
    auto refresh = [&](const Edge& e) {
        if (auto it = queued.find(e); it != queued.end()) {
            queue.erase(it->second);
            queued.erase(it);
        }
        if (!topo.has_link(e) || bridges.contains(e)) return;
        const LinkPruneKey k = detail::current_key(topo, e, stats, covered.at(e));
        if (k.priority > cfg.max_priority_pruned) return;
        queue.insert(k);
        queued.emplace(e, k);
    };
    for (const Edge& e : topo.links()) refresh(e);

    while (!queue.empty()) {
        const LinkPruneKey best = *queue.begin();
        queue.erase(queue.begin());
        queued.erase(best.link);
        if (cfg.preserve_connectivity && detail::is_bridge(topo, best.link)) {
            bridges.insert(best.link);  // stays a bridge as links only disappear
            continue;
        }
        topo.remove_link(best.link);
        out.log.push_back(best);
        std::vector<Edge> touched;
        for (NodeId end : {best.link.a, best.link.b}) {
            if (topo.degree(end) == 0) {
                stats.erase(end);
                continue;
            }
            stats[end] = node_link_stats(topo, end);
            for (NodeId v : topo.neighbors(end)) touched.emplace_back(end, v);
        }
        for (const Edge& e : touched) refresh(e);
    }
    return out;
}

/// Level fractions of a length sample classified against its own statistics.
inline std::array<double, 4> level_fractions(std::span<const double> lengths)
{
    const NodeLinkStats s = length_stats(lengths);
    std::array<double, 4> f{};
    for (double l : lengths) f[static_cast<int>(sd_level(l, s))] += 1.0;
    for (double& x : f) x /= static_cast<double>(lengths.size());
    return f;
}

/// Fraction of (link, endpoint) classifications at each level.
inline std::array<double, 4> level_occupancy(const Topology& topo)
{
    if (topo.link_count() == 0) throw Error("level_occupancy needs at least one link");
    std::array<double, 4> f{};
    for (const Node& n : topo.nodes()) {
        if (topo.degree(n.id) == 0) continue;
        const NodeLinkStats s = node_link_stats(topo, n.id);
        for (NodeId v : topo.neighbors(n.id)) f[static_cast<int>(sd_level(dist(n.pos, topo.position(v)), s))] += 1.0;
    }
    for (double& x : f) x /= static_cast<double>(2 * topo.link_count());
    return f;
}

}  // namespace meshtopo
