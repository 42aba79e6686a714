#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace meshtopo;

namespace {

Point P(double x, double y) { return point_from_meters(x, y); }

// The degree-9 worked example: link number -> (length, covered nodes).
const std::vector<std::pair<double, std::size_t>> kExample{{12, 2},  {250, 12}, {22, 4}, {210, 11}, {36, 7},
                                                           {30, 5},  {33, 6},   {120, 8}, {15, 3}};

Topology random_dt(std::uint64_t seed, std::size_t n)
{
    Rng rng(seed);
    std::vector<Node> nodes;
    std::set<Point> seen;
    while (nodes.size() < n) {
        const Point p = P(rng.uniform(0, 1000), rng.uniform(0, 1000));
        if (seen.insert(p).second) nodes.push_back(Node{static_cast<NodeId>(nodes.size()), p});
    }
    return build_delaunay(nodes).link_graph();
}

std::vector<Edge> removed_links(const PruneResult& r)
{
    std::vector<Edge> out;
    for (const LinkPruneKey& k : r.log) out.push_back(k.link);
    return out;
}

// Hub 1 at (0, 500) with five 10 m spokes and one 1000 m spoke to leaf 7.
Topology star()
{
    Topology t({Node{1, P(0, 500)}, Node{2, P(10, 500)}, Node{3, P(0, 510)}, Node{4, P(0, 490)}, Node{5, P(6, 508)},
                Node{6, P(6, 492)}, Node{7, P(1000, 500)}});
    for (NodeId v = 2; v <= 7; ++v) t.add_link(1, v);
    return t;
}

}  // namespace

TEST(Pruning, ExampleStatistics)
{
    std::vector<double> lengths;
    for (const auto& [len, covered] : kExample) lengths.push_back(len);
    const NodeLinkStats s = length_stats(lengths);
    EXPECT_NEAR(s.mean, 728.0 / 9, 1e-12);
    // Population deviation, computed by hand.
    double sq = 0;
    for (double l : lengths) sq += (l - 728.0 / 9) * (l - 728.0 / 9);
    EXPECT_NEAR(s.sigma, std::sqrt(sq / 9), 1e-9);
    EXPECT_NEAR(s.mean, 80.9, 0.05);
    EXPECT_NEAR(s.sigma, 85.8, 0.05);
}

TEST(Pruning, ExampleLevels)
{
    const NodeLinkStats s{0, 80.9, 85.8};
    EXPECT_EQ(sd_level(120, s), SdLevel::Level1);
    EXPECT_EQ(sd_level(12, s), SdLevel::Level0);
    EXPECT_EQ(sd_level(210, s), SdLevel::Level2);
    // mu + 2 sigma = 252.5, so 250 stays in Level2.
    EXPECT_EQ(sd_level(250, s), SdLevel::Level2);
    EXPECT_EQ(sd_level(253, s), SdLevel::Level3);
}

TEST(Pruning, LevelBoundariesGoToTheLowerBand)
{
    const NodeLinkStats s{0, 10.0, 2.0};
    EXPECT_EQ(sd_level(9.999, s), SdLevel::Level0);
    EXPECT_EQ(sd_level(10.0, s), SdLevel::Level1);
    EXPECT_EQ(sd_level(12.0, s), SdLevel::Level1);
    EXPECT_EQ(sd_level(14.0, s), SdLevel::Level2);
    EXPECT_EQ(sd_level(14.001, s), SdLevel::Level3);
}

TEST(Pruning, PriorityTable)
{
    using L = SdLevel;
    EXPECT_EQ(prune_priority(L::Level3, L::Level3), 1);
    EXPECT_EQ(prune_priority(L::Level3, L::Level0), 2);
    EXPECT_EQ(prune_priority(L::Level2, L::Level3), 2);
    EXPECT_EQ(prune_priority(L::Level2, L::Level2), 3);
    EXPECT_EQ(prune_priority(L::Level1, L::Level2), 4);
    EXPECT_EQ(prune_priority(L::Level2, L::Level0), 4);
    EXPECT_EQ(prune_priority(L::Level1, L::Level0), 5);
    EXPECT_EQ(prune_priority(L::Level0, L::Level0), 5);
}

TEST(Pruning, ExampleOrder)
{
    std::vector<double> lengths;
    for (const auto& [len, covered] : kExample) lengths.push_back(len);
    const NodeLinkStats s = length_stats(lengths);
    std::vector<LinkPruneKey> keys;
    for (std::size_t i = 0; i < kExample.size(); ++i) {
        const NodeId no = static_cast<NodeId>(i + 1);
        keys.push_back(make_prune_key(Edge(0, no), sd_level(kExample[i].first, s), SdLevel::Level0, kExample[i].second));
    }
    rank_links(keys);
    std::vector<NodeId> order;
    for (const auto& k : keys) order.push_back(k.link.b);
    EXPECT_EQ(order, (std::vector<NodeId>{2, 4, 8, 5, 7, 6, 3, 9, 1}));

    // Level counts over the example: six Level0, one Level1, two Level2.
    const auto f = level_fractions(lengths);
    EXPECT_NEAR(f[0], 6.0 / 9, 1e-12);
    EXPECT_NEAR(f[1], 1.0 / 9, 1e-12);
    EXPECT_NEAR(f[2], 2.0 / 9, 1e-12);
    EXPECT_NEAR(f[3], 0.0, 1e-12);
}

TEST(Pruning, TieBreakPrefersMoreCoveredThenLowerId)
{
    std::vector<LinkPruneKey> keys{make_prune_key(Edge(1, 3), SdLevel::Level1, SdLevel::Level1, 3),
                                   make_prune_key(Edge(1, 2), SdLevel::Level1, SdLevel::Level1, 5),
                                   make_prune_key(Edge(1, 4), SdLevel::Level1, SdLevel::Level1, 3)};
    rank_links(keys);
    EXPECT_EQ(keys[0].link, Edge(1, 2));
    EXPECT_EQ(keys[1].link, Edge(1, 3));
    EXPECT_EQ(keys[2].link, Edge(1, 4));
}

TEST(Pruning, SingleAndEqualLinks)
{
    const std::vector<double> one{42.0};
    const NodeLinkStats s = length_stats(one);
    EXPECT_EQ(s.mean, 42.0);
    EXPECT_EQ(s.sigma, 0.0);
    // Equal lengths sit exactly at the mean, which is Level1.
    const std::vector<double> same(7, 0.1 + 0.2);
    const auto f = level_fractions(same);
    EXPECT_EQ(f[1], 1.0);
    EXPECT_THROW(length_stats(std::span<const double>{}), Error);
}

TEST(Pruning, LevelFractionsOfNormalSample)
{
    Rng rng(10);
    std::vector<double> v;
    while (v.size() < 100000) {
        const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        v.push_back(100 + 15 * r * std::cos(2 * std::numbers::pi * u2));
        v.push_back(100 + 15 * r * std::sin(2 * std::numbers::pi * u2));
    }
    const auto f = level_fractions(v);
    EXPECT_NEAR(f[0], 0.5, 0.02);
    EXPECT_NEAR(f[1], 0.342, 0.02);
    EXPECT_NEAR(f[2], 0.136, 0.02);
    EXPECT_NEAR(f[3], 0.022, 0.02);
}

TEST(Pruning, CoveredNodes)
{
    // Hexagon of side 100 centred at (500, 500); the height is rounded up
    // so the slanted sides are never shorter than the horizontal ones.
    const std::int64_t s = 100 * kMicrometersPerMeter;
    const std::int64_t h = static_cast<std::int64_t>(std::ceil(static_cast<double>(s) * std::sqrt(3.0) / 2));
    const std::int64_t o = 500 * kMicrometersPerMeter;
    Topology t({Node{1, Point{o + s, o}}, Node{2, Point{o + s / 2, o + h}}, Node{3, Point{o - s / 2, o + h}},
                Node{4, Point{o - s, o}}, Node{5, Point{o - s / 2, o - h}}, Node{6, Point{o + s / 2, o - h}}});
    t.add_link(1, 4);
    t.add_link(1, 2);
    EXPECT_EQ(covered_nodes(t, Edge(1, 4)), 4u);
    EXPECT_EQ(covered_nodes(t, Edge(1, 2)), 2u);
    EXPECT_THROW(covered_nodes(t, Edge(2, 3)), Error);

    Topology pair({Node{1, P(0, 0)}, Node{2, P(5, 0)}});
    pair.add_link(1, 2);
    EXPECT_EQ(covered_nodes(pair, Edge(1, 2)), 0u);
}

TEST(Pruning, CoveredNodesWithIndexMatchesScan)
{
    const Topology t = random_dt(17, 150);
    const SpatialIndex index(detail::positions_of(t));
    for (const Edge& e : t.links()) EXPECT_EQ(covered_nodes(t, e, &index), covered_nodes(t, e)) << e;
}

TEST(Pruning, PruneOrderOfNode)
{
    const Topology t = star();
    const auto keys = prune_order(t, 1);
    ASSERT_EQ(keys.size(), 6u);
    EXPECT_EQ(keys[0].link, Edge(1, 7));
    EXPECT_EQ(keys[0].priority, 2);
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    EXPECT_THROW(prune_order(Topology({Node{1, P(0, 0)}}), 1), Error);
}

TEST(Pruning, BridgeIsKept)
{
    const Topology t = star();
    const PruneResult kept = prune(t);
    EXPECT_TRUE(kept.topology.has_link(Edge(1, 7)));
    EXPECT_EQ(kept.topology, t);

    const PruneResult cut = prune(t, PruneConfig{4, false});
    EXPECT_FALSE(cut.topology.has_link(Edge(1, 7)));
    ASSERT_EQ(cut.log.size(), 1u);
    EXPECT_EQ(cut.log[0].link, Edge(1, 7));
}

TEST(Pruning, NothingQualifiesLeavesTopologyUnchanged)
{
    // Square ring: every link has the same length at both ends.
    Topology t({Node{1, P(0, 0)}, Node{2, P(10, 0)}, Node{3, P(10, 10)}, Node{4, P(0, 10)}});
    for (NodeId v = 1; v <= 4; ++v) t.add_link(v, v % 4 + 1);
    EXPECT_EQ(prune(t).topology, t);
}

TEST(Pruning, MatchesFromScratchRecompute)
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Topology t = random_dt(seed, 60);
        for (int maxp : {1, 2, 3, 4}) {
            for (bool preserve : {true, false}) {
                const PruneResult r = prune(t, PruneConfig{maxp, preserve});
                EXPECT_EQ(removed_links(r), oracle::prune_from_scratch(t, maxp, preserve))
                    << "seed " << seed << " max_priority " << maxp << " preserve " << preserve;
            }
        }
    }
}

TEST(Pruning, OutputInvariants)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Topology t = random_dt(seed, 100);
        const PruneResult r = prune(t);
        EXPECT_TRUE(is_connected(r.topology));
        EXPECT_EQ(count_crossings(r.topology), 0u);
        EXPECT_LE(interference_rate(r.topology), interference_rate(t));
        for (const Node& n : t.nodes()) EXPECT_LE(transmission_range(r.topology, n.id), transmission_range(t, n.id));
        if (!r.log.empty()) {
            EXPECT_LT(average_transmission_range(r.topology), average_transmission_range(t));
        }
        EXPECT_EQ(r.topology.link_count() + r.log.size(), t.link_count());
        for (const LinkPruneKey& k : r.log) EXPECT_LE(k.priority, 4);
        // Deterministic.
        EXPECT_EQ(prune(t).topology, r.topology);
    }
}

TEST(Pruning, LevelOccupancyCountsBothEndpoints)
{
    const Topology t = star();
    const auto f = level_occupancy(t);
    // 12 classifications: five short spokes Level0 at the hub, long spoke
    // Level3 at the hub, and six single-link leaves at Level1.
    EXPECT_NEAR(f[0], 5.0 / 12, 1e-12);
    EXPECT_NEAR(f[1], 6.0 / 12, 1e-12);
    EXPECT_NEAR(f[2], 0.0, 1e-12);
    EXPECT_NEAR(f[3], 1.0 / 12, 1e-12);
}

TEST(Pruning, LongerOfTwoLinksIsExactlyOneSigma)
{
    // For two links the longer one sits at mu + sigma, which is Level1
    // whatever the rounding of the statistics.
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double a = rng.uniform(1, 1000), b = rng.uniform(1, 1000);
        const std::vector<double> l{a, b};
        const NodeLinkStats s = length_stats(l);
        EXPECT_EQ(sd_level(std::max(a, b), s), SdLevel::Level1);
        if (a != b) {
            EXPECT_EQ(sd_level(std::min(a, b), s), SdLevel::Level0);
        }
    }
}
