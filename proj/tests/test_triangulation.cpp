#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace meshtopo;

namespace {

Point P(double x, double y) { return point_from_meters(x, y); }

std::vector<Node> random_nodes(std::uint64_t seed, std::size_t n, double extent = 1000)
{
    Rng rng(seed);
    std::set<Point> seen;
    std::vector<Node> nodes;
    while (nodes.size() < n) {
        const Point p = P(rng.uniform(0, extent), rng.uniform(0, extent));
        if (seen.insert(p).second) nodes.push_back(Node{static_cast<NodeId>(nodes.size()), p});
    }
    return nodes;
}

// Small integer lattice: lots of cocircular quadruples.
std::vector<Node> lattice_nodes(int w, int h)
{
    std::vector<Node> nodes;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) nodes.push_back(Node{y * w + x, P(10.0 * x, 10.0 * y)});
    return nodes;
}

std::set<Edge> edge_set(const Triangulation& t)
{
    const auto e = t.edges();
    return {e.begin(), e.end()};
}

}  // namespace

TEST(Triangulation, EmptyCircleOnRandomInput)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto nodes = random_nodes(seed, 150);
        const Triangulation t = build_delaunay(nodes, seed);
        EXPECT_EQ(t.validate(), std::nullopt);
        EXPECT_EQ(oracle::empty_circle_violations(t), 0u);
        // Euler: 2n - 2 - h triangles, so between n - 2 and 2n - 5.
        EXPECT_GE(t.triangle_count(), nodes.size() - 2);
        EXPECT_LE(t.triangle_count(), 2 * nodes.size() - 5);
    }
}

TEST(Triangulation, LatticeWithCocircularPoints)
{
    const auto nodes = lattice_nodes(7, 6);
    const Triangulation t = build_delaunay(nodes);
    EXPECT_EQ(t.validate(), std::nullopt);
    EXPECT_EQ(oracle::empty_circle_violations(t), 0u);
    EXPECT_EQ(t.triangle_count(), 2u * 6 * 5);
}

TEST(Triangulation, LinksNeverCross)
{
    const auto nodes = random_nodes(9, 300);
    const Topology dt = build_delaunay(nodes).link_graph();
    EXPECT_EQ(count_crossings(dt), 0u);
    EXPECT_TRUE(is_connected(dt));
}

TEST(Triangulation, IncrementalMatchesBatch)
{
    // Random points are in general position with probability one, so the
    // Delaunay triangulation is unique and both paths must agree.
    const auto nodes = random_nodes(3, 200);
    const Triangulation batch = build_delaunay(nodes);
    Triangulation inc;
    for (const Node& n : nodes) inc.insert(n);
    EXPECT_EQ(inc.validate(), std::nullopt);
    EXPECT_EQ(edge_set(inc), edge_set(batch));
}

TEST(Triangulation, InsertThenRemoveRestoresEdges)
{
    const auto nodes = random_nodes(4, 120);
    Triangulation t = build_delaunay(nodes);
    const auto before = edge_set(t);
    Rng rng(8);
    for (int i = 0; i < 30; ++i) {
        const Node extra{1000 + i, P(rng.uniform(0, 1000), rng.uniform(0, 1000))};
        t.insert(extra);
        ASSERT_EQ(t.validate(), std::nullopt);
        t.remove(extra.id);
        ASSERT_EQ(t.validate(), std::nullopt);
        EXPECT_EQ(edge_set(t), before);
    }
}

TEST(Triangulation, RemovalKeepsDelaunayProperty)
{
    auto nodes = random_nodes(6, 100);
    Triangulation t = build_delaunay(nodes);
    Rng rng(12);
    rng.shuffle(std::span<Node>(nodes));
    for (std::size_t i = 0; i + 3 < nodes.size(); ++i) {
        t.remove(nodes[i].id);
        ASSERT_EQ(t.validate(), std::nullopt) << "after removing " << nodes[i].id;
        if (i % 10 == 0) {
            ASSERT_EQ(oracle::empty_circle_violations(t), 0u);
            const std::vector<Node> rest(nodes.begin() + static_cast<std::ptrdiff_t>(i) + 1, nodes.end());
            EXPECT_EQ(edge_set(t), edge_set(build_delaunay(rest)));
        }
    }
    EXPECT_EQ(t.triangle_count(), 1u);
}

TEST(Triangulation, CollinearInputIsAPath)
{
    std::vector<Node> nodes{{3, P(30, 30)}, {1, P(10, 10)}, {2, P(20, 20)}, {4, P(40, 40)}};
    Triangulation t = build_delaunay(nodes);
    EXPECT_TRUE(t.degenerate());
    EXPECT_EQ(t.triangle_count(), 0u);
    EXPECT_EQ(edge_set(t), (std::set<Edge>{{1, 2}, {2, 3}, {3, 4}}));
    // One point off the line turns it into a proper mesh.
    t.insert(Node{5, P(10, 40)});
    EXPECT_FALSE(t.degenerate());
    EXPECT_EQ(t.validate(), std::nullopt);
    t.remove(5);
    EXPECT_TRUE(t.degenerate());
    EXPECT_EQ(edge_set(t), (std::set<Edge>{{1, 2}, {2, 3}, {3, 4}}));
}

TEST(Triangulation, RejectsDuplicates)
{
    Triangulation t = build_delaunay(random_nodes(1, 10));
    EXPECT_THROW(t.insert(Node{3, P(999, 999)}), Error);
    EXPECT_THROW(t.insert(Node{50, t.position(3)}), Error);
    EXPECT_THROW(t.remove(77), Error);
    EXPECT_EQ(t.validate(), std::nullopt);
    EXPECT_EQ(t.size(), 10u);
}

TEST(Triangulation, FlipAndLegality)
{
    // Convex quadrilateral: the short diagonal is the Delaunay one.
    const std::vector<Node> nodes{{1, P(0, 0)}, {2, P(10, -1)}, {3, P(20, 0)}, {4, P(10, 1)}};
    Triangulation t = build_delaunay(nodes);
    ASSERT_TRUE(edge_set(t).contains(Edge(2, 4)));
    EXPECT_FALSE(t.is_illegal(Edge(2, 4)));
    t.flip(Edge(2, 4));
    EXPECT_TRUE(edge_set(t).contains(Edge(1, 3)));
    EXPECT_TRUE(t.is_illegal(Edge(1, 3)));
    EXPECT_EQ(t.validate(), std::nullopt);  // still a valid mesh, just not Delaunay
    EXPECT_GT(oracle::empty_circle_violations(t), 0u);
    t.flip(Edge(1, 3));
    EXPECT_EQ(oracle::empty_circle_violations(t), 0u);

    EXPECT_THROW(t.is_illegal(Edge(1, 2)), Error);  // hull edge
    EXPECT_THROW(t.flip(Edge(1, 3)), Error);        // not an edge
}

TEST(Triangulation, FlipOfNonConvexQuadIsDegenerate)
{
    // Vertex 4 sits inside triangle 1-2-3, so edge 1-4 has a reflex quad.
    const std::vector<Node> nodes{{1, P(0, 0)}, {2, P(20, 0)}, {3, P(10, 20)}, {4, P(10, 5)}};
    Triangulation t = build_delaunay(nodes);
    EXPECT_THROW(t.flip(Edge(1, 4)), DegenerateError);
}

TEST(Voronoi, AdjacencyMatchesIndependentOracle)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto nodes = random_nodes(seed, 60);
        const VoronoiDiagram v = voronoi_dual(build_delaunay(nodes), expanded_area(Area{}));
        EXPECT_EQ(std::set<Edge>(v.adjacency.begin(), v.adjacency.end()), oracle::voronoi_adjacency(nodes));
    }
}

TEST(Voronoi, CocircularLatticeDropsZeroLengthEdges)
{
    const auto nodes = lattice_nodes(5, 4);
    const VoronoiDiagram v = voronoi_dual(build_delaunay(nodes), Rect{-50, -50, 100, 100});
    const auto expect = oracle::voronoi_adjacency(nodes);
    EXPECT_EQ(std::set<Edge>(v.adjacency.begin(), v.adjacency.end()), expect);
    // A square lattice has only axis neighbours.
    EXPECT_EQ(expect.size(), 4u * 4 + 5u * 3);
}

TEST(Voronoi, CellsContainTheirSitesAndPartitionTheBox)
{
    const auto nodes = random_nodes(21, 40);
    const Rect box = expanded_area(Area{});
    const VoronoiDiagram v = voronoi_dual(build_delaunay(nodes), box);
    double total = 0;
    for (const VoronoiCell& c : v.cells) {
        EXPECT_TRUE(cell_contains(c.polygon, c.site_pos));
        double a = 0;
        for (std::size_t i = 0; i < c.polygon.size(); ++i) {
            const PointF& p = c.polygon[i];
            const PointF& q = c.polygon[(i + 1) % c.polygon.size()];
            a += p.x * q.y - q.x * p.y;
        }
        EXPECT_GT(a, 0.0);
        total += a / 2;
    }
    EXPECT_NEAR(total, (box.xmax - box.xmin) * (box.ymax - box.ymin), 1e-3);
}

TEST(Voronoi, TwoSites)
{
    const std::vector<Node> nodes{{1, P(100, 500)}, {2, P(900, 500)}};
    const VoronoiDiagram v = voronoi_dual(build_delaunay(nodes), expanded_area(Area{}));
    ASSERT_EQ(v.adjacency.size(), 1u);
    EXPECT_EQ(v.adjacency[0], Edge(1, 2));
    ASSERT_EQ(v.cells.size(), 2u);
    EXPECT_TRUE(cell_contains(v.cells[0].polygon, PointF{499, 0}));
    EXPECT_FALSE(cell_contains(v.cells[0].polygon, PointF{501, 0}));
}

TEST(Voronoi, NeedsTwoSites)
{
    const std::vector<Node> nodes{{1, P(100, 500)}};
    EXPECT_THROW(voronoi_dual(build_delaunay(nodes), expanded_area(Area{})), Error);
}
