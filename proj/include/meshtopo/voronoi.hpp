#pragma once

// Voronoi diagram as the dual of a Delaunay triangulation.
//
// Each cell is the bounding rectangle clipped by the bisector half-planes of
// the site's Delaunay neighbors; its interior vertices are the circumcenters
// of the incident triangles. Unbounded cells are cut at the rectangle.
// Adjacency lists the Delaunay edges whose dual Voronoi edge has positive
// length (an edge between two cocircular triangles has a point-sized dual).

#include "meshtopo/triangulation.hpp"

#include <unordered_map>
#include <vector>

namespace meshtopo {

struct Rect {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;
};

/// The deployment area grown by `fraction` of its size on every side.
inline Rect expanded_area(const Area& area, double fraction = 0.1)
{
    const double dx = area.width * fraction;
    const double dy = area.height * fraction;
    return Rect{-dx, -dy, area.width + dx, area.height + dy};
}

struct VoronoiCell {
    NodeId site = 0;
    PointF site_pos;
    std::vector<PointF> polygon;  // CCW, clipped to the bounding rectangle
};

struct VoronoiDiagram {
    std::vector<VoronoiCell> cells;
    std::vector<Edge> adjacency;  // sorted
};

namespace detail {

/// Keep the part of a convex polygon with n . (x - origin) <= c.
inline std::vector<PointF> clip_half_plane(const std::vector<PointF>& poly, PointF origin, PointF n, double c)
{
    std::vector<PointF> out;
    if (poly.empty()) return out;
    auto value = [&](const PointF& p) { return n.x * (p.x - origin.x) + n.y * (p.y - origin.y) - c; };
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const PointF& cur = poly[i];
        const PointF& nxt = poly[(i + 1) % poly.size()];
        const double vc = value(cur);
        const double vn = value(nxt);
        if (vc <= 0) out.push_back(cur);
        if ((vc < 0 && vn > 0) || (vc > 0 && vn < 0)) {
            const double t = vc / (vc - vn);
            out.push_back(PointF{cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
        }
    }
    return out;
}

}  // namespace detail

inline VoronoiDiagram voronoi_dual(const Triangulation& t, const Rect& bbox)
{
    const std::vector<Node> nodes = t.nodes();
    if (nodes.size() < 2) throw Error("voronoi_dual: at least two sites are required");

    std::unordered_map<NodeId, std::vector<NodeId>> neighbors;
    VoronoiDiagram out;
    for (const EdgeInfo& info : t.edge_infos()) {
        neighbors[info.edge.a].push_back(info.edge.b);
        neighbors[info.edge.b].push_back(info.edge.a);
        bool dual_has_length = true;
        if (info.left && info.right) {
            const Point a = t.position(info.edge.a), b = t.position(info.edge.b);
            dual_has_length = in_circle(a, b, t.position(*info.left), t.position(*info.right)) != CirclePosition::Cocircular;
        }
        if (dual_has_length) out.adjacency.push_back(info.edge);
    }
    std::sort(out.adjacency.begin(), out.adjacency.end());

    for (const Node& n : nodes) {
        const PointF s = to_meters(n.pos);
        std::vector<PointF> poly{{bbox.xmin, bbox.ymin}, {bbox.xmax, bbox.ymin}, {bbox.xmax, bbox.ymax}, {bbox.xmin, bbox.ymax}};
        for (NodeId q : neighbors[n.id]) {
            const PointF w = to_meters(t.position(q));
            const PointF d{w.x - s.x, w.y - s.y};
            // |x - s| <= |x - q|  <=>  2 (x - s) . d <= |d|^2
            poly = detail::clip_half_plane(poly, s, PointF{2 * d.x, 2 * d.y}, d.x * d.x + d.y * d.y);
        }
        out.cells.push_back(VoronoiCell{n.id, s, std::move(poly)});
    }
    return out;
}

/// True when p is inside or on the boundary of a convex CCW polygon.
inline bool cell_contains(const std::vector<PointF>& poly, const PointF& p, double tolerance = 1e-9)
{
    if (poly.size() < 3) return false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const PointF& a = poly[i];
        const PointF& b = poly[(i + 1) % poly.size()];
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (cross < -tolerance) return false;
    }
    return true;
}

}  // namespace meshtopo
