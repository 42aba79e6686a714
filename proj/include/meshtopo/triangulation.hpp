#pragma once

// Incremental Delaunay triangulation with legal-edge flipping.
//
// The mesh stores real triangles (CCW) plus ghost triangles that close the
// convex hull: every hull edge a->b (interior on its left) carries a ghost
// (b, a, ghost). A ghost's "circumcircle" is the open half-plane beyond its
// hull edge together with the open edge itself, which lets points outside
// the hull be inserted and legalized exactly like interior points.
//
// Construction inserts points in a randomized order (drawn from the seeded
// generator) refined by a Hilbert sort within doubling rounds, so point
// location by walking stays short. Insertion handles the three placement
// cases (inside a triangle, on an edge, outside the hull) and then flips
// illegal edges until the empty-circumcircle property holds. Deletion
// removes a vertex's star and refills the cavity with Delaunay ears.
//
// Fewer than three points, or all points collinear, is a documented
// degenerate mode: no triangles, and the link graph is the path through the
// points in sorted order.

#include "meshtopo/geometry.hpp"
#include "meshtopo/rng.hpp"
#include "meshtopo/topology.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace meshtopo {

/// A triangulation edge together with the vertices opposite it on each side
/// (empty on the outer side of a hull edge).
struct EdgeInfo {
    Edge edge;
    std::optional<NodeId> left;
    std::optional<NodeId> right;
};

class Triangulation {
public:
    using Index = std::uint32_t;
    static constexpr Index kGhost = 0xffffffffu;
    static constexpr Index kNone = 0xffffffffu;

    explicit Triangulation(std::uint64_t seed = 1) : rng_(seed) {}

    /// Delaunay triangulation of `nodes`. Duplicate ids or positions throw.
    static Triangulation build(std::span<const Node> nodes, std::uint64_t seed = 1)
    {
        Triangulation t(seed);
        t.reset_from(nodes);
        return t;
    }

    /// Insert a node and restore the Delaunay property.
    void insert(const Node& node)
    {
        if (!in_coordinate_range(node.pos)) {
            throw Error("node " + std::to_string(node.id) + " lies outside the supported coordinate range");
        }
        if (by_id_.contains(node.id)) throw Error("duplicate node id " + std::to_string(node.id));
        if (!has_mesh()) {
            for (Index v = 0; v < pts_.size(); ++v) {
                if (alive_[v] && pts_[v] == node.pos) throw Error("duplicate point for node " + std::to_string(node.id));
            }
            const Index v = add_vertex(node);
            (void)v;
            try_build_mesh();
            return;
        }
        const Index v = add_vertex(node);
        try {
            insert_vertex(v);
        } catch (...) {
            drop_vertex_record(v);
            throw;
        }
    }

    /// Remove a node and restore the Delaunay property.
    void remove(NodeId id)
    {
        const auto it = by_id_.find(id);
        if (it == by_id_.end()) throw Error("unknown node id " + std::to_string(id));
        const Index v = it->second;
        if (!has_mesh()) {
            drop_vertex_record(v);
            return;
        }
        delete_vertex(v);
        if (real_triangles_ == 0) {
            clear_mesh();
        }
    }

    /// True when the edge fails the empty-circumcircle test. Cocircular is legal.
    /// Throws for hull edges and edges that do not exist.
    bool is_illegal(const Edge& e) const
    {
        const auto [t, k] = require_internal_edge(e);
        const Tri& tri = tris_[t];
        const Index u = tri.n[k];
        const Index d = opposite_vertex(u, t);
        return in_circle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], pts_[d]) == CirclePosition::Inside;
    }

    /// Replace an internal edge by the other diagonal of its quadrilateral.
    /// Throws DegenerateError when the quadrilateral is not strictly convex.
    void flip(const Edge& e)
    {
        const auto [t, k] = require_internal_edge(e);
        const Tri& tri = tris_[t];
        const Index a = tri.v[(k + 1) % 3], b = tri.v[(k + 2) % 3], c = tri.v[k];
        const Index d = opposite_vertex(tri.n[k], t);
        if (orient2d(pts_[c], pts_[a], pts_[d]) != Orientation::CCW ||
            orient2d(pts_[d], pts_[b], pts_[c]) != Orientation::CCW) {
            throw DegenerateError("flip: quadrilateral around edge is not convex");
        }
        flip_edge(t, k);
    }

    std::size_t size() const { return by_id_.size(); }
    bool contains(NodeId id) const { return by_id_.contains(id); }
    bool degenerate() const { return !has_mesh(); }
    std::size_t triangle_count() const { return real_triangles_; }

    Point position(NodeId id) const
    {
        const auto it = by_id_.find(id);
        if (it == by_id_.end()) throw Error("unknown node id " + std::to_string(id));
        return pts_[it->second];
    }

    /// Alive nodes in insertion order.
    std::vector<Node> nodes() const
    {
        std::vector<Node> out;
        out.reserve(size());
        for (Index v = 0; v < pts_.size(); ++v) {
            if (alive_[v]) out.push_back(Node{ids_[v], pts_[v]});
        }
        return out;
    }

    /// Real triangles as CCW id triples.
    std::vector<std::array<NodeId, 3>> triangles() const
    {
        std::vector<std::array<NodeId, 3>> out;
        out.reserve(real_triangles_);
        for (Index t = 0; t < tris_.size(); ++t) {
            if (!tri_alive_[t] || is_ghost(t)) continue;
            const Tri& tri = tris_[t];
            out.push_back({ids_[tri.v[0]], ids_[tri.v[1]], ids_[tri.v[2]]});
        }
        return out;
    }

    std::vector<EdgeInfo> edge_infos() const
    {
        std::vector<EdgeInfo> out;
        if (!has_mesh()) {
            const auto path = degenerate_path();
            for (std::size_t i = 0; i + 1 < path.size(); ++i) out.push_back({Edge(path[i], path[i + 1]), {}, {}});
            return out;
        }
        for (Index t = 0; t < tris_.size(); ++t) {
            if (!tri_alive_[t] || is_ghost(t)) continue;
            const Tri& tri = tris_[t];
            for (int k = 0; k < 3; ++k) {
                const Index nb = tri.n[k];
                const bool hull = is_ghost(nb);
                if (!hull && nb < t) continue;
                const Index a = tri.v[(k + 1) % 3], b = tri.v[(k + 2) % 3];
                EdgeInfo info{Edge(ids_[a], ids_[b]), ids_[tri.v[k]], std::nullopt};
                if (!hull) info.right = ids_[opposite_vertex(nb, t)];
                out.push_back(info);
            }
        }
        return out;
    }

    std::vector<Edge> edges() const
    {
        std::vector<Edge> out;
        for (const EdgeInfo& info : edge_infos()) out.push_back(info.edge);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// The triangulation's edges as a link graph.
    Topology link_graph(Area area = {}) const
    {
        Topology topo(nodes(), area);
        for (const Edge& e : edges()) topo.add_link(e);
        return topo;
    }

    /// Structural self-check; returns a description of the first problem found.
    std::optional<std::string> validate() const
    {
        if (!has_mesh()) return std::nullopt;
        std::size_t real = 0;
        for (Index t = 0; t < tris_.size(); ++t) {
            if (!tri_alive_[t]) continue;
            const Tri& tri = tris_[t];
            if (!is_ghost(t)) {
                ++real;
                if (orient2d(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]]) != Orientation::CCW) {
                    return "triangle " + std::to_string(t) + " is not CCW";
                }
            }
            for (int k = 0; k < 3; ++k) {
                const Index nb = tri.n[k];
                if (nb >= tris_.size() || !tri_alive_[nb]) return "triangle " + std::to_string(t) + " has a dead neighbor";
                const Tri& other = tris_[nb];
                int back = -1;
                for (int j = 0; j < 3; ++j) {
                    if (other.n[j] == t) back = j;
                }
                if (back < 0) return "neighbor relation not symmetric at triangle " + std::to_string(t);
                const Index a = tri.v[(k + 1) % 3], b = tri.v[(k + 2) % 3];
                if (other.v[(back + 1) % 3] != b || other.v[(back + 2) % 3] != a) {
                    return "shared edge mismatch at triangle " + std::to_string(t);
                }
            }
        }
        if (real != real_triangles_) return "real triangle count out of sync";
        for (Index v = 0; v < pts_.size(); ++v) {
            if (!alive_[v]) continue;
            const Index t = vtri_[v];
            if (t == kNone || !tri_alive_[t]) return "vertex " + std::to_string(ids_[v]) + " has no incident triangle";
            const Tri& tri = tris_[t];
            if (tri.v[0] != v && tri.v[1] != v && tri.v[2] != v) return "vertex triangle does not contain vertex";
        }
        return std::nullopt;
    }

private:
    struct Tri {
        std::array<Index, 3> v{};  // CCW; v[k] may be kGhost
        std::array<Index, 3> n{};  // n[k] is across the edge opposite v[k]
    };

    enum class Where { Inside, OnEdge, OnVertex, Outside };

    struct Location {
        Where where = Where::Inside;
        Index tri = kNone;
        int k = 0;  // edge index for OnEdge, vertex index for OnVertex
    };

    // ---- vertex records ---------------------------------------------------

    Index add_vertex(const Node& node)
    {
        const Index v = static_cast<Index>(pts_.size());
        pts_.push_back(node.pos);
        ids_.push_back(node.id);
        alive_.push_back(1);
        vtri_.push_back(kNone);
        by_id_.emplace(node.id, v);
        return v;
    }

    void drop_vertex_record(Index v)
    {
        alive_[v] = 0;
        vtri_[v] = kNone;
        by_id_.erase(ids_[v]);
    }

    void reset_from(std::span<const Node> nodes)
    {
        std::unordered_map<Point, NodeId> seen;
        seen.reserve(nodes.size());
        for (const Node& n : nodes) {
            if (!in_coordinate_range(n.pos)) {
                throw Error("node " + std::to_string(n.id) + " lies outside the supported coordinate range");
            }
            if (by_id_.contains(n.id)) throw Error("duplicate node id " + std::to_string(n.id));
            if (auto [it, fresh] = seen.emplace(n.pos, n.id); !fresh) {
                throw Error("nodes " + std::to_string(it->second) + " and " + std::to_string(n.id) + " share a position");
            }
            add_vertex(n);
        }
        try_build_mesh();
    }

    bool has_mesh() const { return real_triangles_ > 0; }

    void clear_mesh()
    {
        tris_.clear();
        tri_alive_.clear();
        free_.clear();
        real_triangles_ = 0;
        last_ = kNone;
        std::fill(vtri_.begin(), vtri_.end(), kNone);
    }

    /// Alive vertices in degenerate mode, ordered along their common line.
    std::vector<NodeId> degenerate_path() const
    {
        std::vector<Index> vs;
        for (Index v = 0; v < pts_.size(); ++v) {
            if (alive_[v]) vs.push_back(v);
        }
        std::sort(vs.begin(), vs.end(), [this](Index a, Index b) { return pts_[a] < pts_[b]; });
        std::vector<NodeId> out;
        for (Index v : vs) out.push_back(ids_[v]);
        return out;
    }

    /// Builds the mesh over all alive vertices if they span a triangle.
    void try_build_mesh()
    {
        clear_mesh();
        std::vector<Index> order;
        for (Index v = 0; v < pts_.size(); ++v) {
            if (alive_[v]) order.push_back(v);
        }
        if (order.size() < 3) return;
        insertion_order(order);

        std::size_t third = 2;
        while (third < order.size() &&
               orient2d(pts_[order[0]], pts_[order[1]], pts_[order[third]]) == Orientation::Collinear) {
            ++third;
        }
        if (third == order.size()) return;  // all collinear
        std::swap(order[2], order[third]);
        make_first_triangle(order[0], order[1], order[2]);
        for (std::size_t i = 3; i < order.size(); ++i) insert_vertex(order[i]);
    }

    /// Randomized order refined by a Hilbert sort within doubling rounds.
    void insertion_order(std::vector<Index>& order)
    {
        rng_.shuffle(std::span<Index>(order));
        std::int64_t minx = pts_[order[0]].x, maxx = minx, miny = pts_[order[0]].y, maxy = miny;
        for (Index v : order) {
            minx = std::min(minx, pts_[v].x);
            maxx = std::max(maxx, pts_[v].x);
            miny = std::min(miny, pts_[v].y);
            maxy = std::max(maxy, pts_[v].y);
        }
        const double span = static_cast<double>(std::max({maxx - minx, maxy - miny, std::int64_t{1}}));
        constexpr std::uint32_t kSide = 1u << 16;
        std::vector<std::uint64_t> key(pts_.size(), 0);
        for (Index v : order) {
            const auto gx = static_cast<std::uint32_t>(std::min<double>(kSide - 1, (pts_[v].x - minx) / span * kSide));
            const auto gy = static_cast<std::uint32_t>(std::min<double>(kSide - 1, (pts_[v].y - miny) / span * kSide));
            key[v] = hilbert_key(gx, gy, kSide);
        }
        std::size_t end = order.size();
        while (end > 0) {
            const std::size_t begin = end < 64 ? 0 : end / 2;
            std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end),
                      [&key](Index a, Index b) { return key[a] != key[b] ? key[a] < key[b] : a < b; });
            end = begin;
        }
    }

    static std::uint64_t hilbert_key(std::uint32_t x, std::uint32_t y, std::uint32_t side)
    {
        std::uint64_t d = 0;
        for (std::uint32_t s = side / 2; s > 0; s /= 2) {
            const std::uint32_t rx = (x & s) ? 1 : 0;
            const std::uint32_t ry = (y & s) ? 1 : 0;
            d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
            if (ry == 0) {
                if (rx == 1) {
                    x = side - 1 - x;
                    y = side - 1 - y;
                }
                std::swap(x, y);
            }
        }
        return d;
    }

    // ---- triangle storage -------------------------------------------------

    bool is_ghost(Index t) const
    {
        const Tri& tri = tris_[t];
        return tri.v[0] == kGhost || tri.v[1] == kGhost || tri.v[2] == kGhost;
    }

    Index new_triangle(Index a, Index b, Index c)
    {
        Index t;
        if (!free_.empty()) {
            t = free_.back();
            free_.pop_back();
            tri_alive_[t] = 1;
        } else {
            t = static_cast<Index>(tris_.size());
            tris_.emplace_back();
            tri_alive_.push_back(1);
        }
        tris_[t].v = {a, b, c};
        tris_[t].n = {kNone, kNone, kNone};
        if (a != kGhost && b != kGhost && c != kGhost) ++real_triangles_;
        for (Index v : {a, b, c}) {
            if (v != kGhost) vtri_[v] = t;
        }
        return t;
    }

    void free_triangle(Index t)
    {
        if (!is_ghost(t)) --real_triangles_;
        tri_alive_[t] = 0;
        free_.push_back(t);
    }

    /// Overwrite a triangle in place (same slot), keeping counters right.
    void set_triangle(Index t, Index a, Index b, Index c)
    {
        const bool was_real = !is_ghost(t);
        tris_[t].v = {a, b, c};
        const bool now_real = !is_ghost(t);
        if (was_real && !now_real) --real_triangles_;
        if (!was_real && now_real) ++real_triangles_;
        for (Index v : {a, b, c}) {
            if (v != kGhost) vtri_[v] = t;
        }
    }

    void replace_neighbor(Index t, Index old_nb, Index new_nb)
    {
        if (t == kNone) return;
        for (Index& n : tris_[t].n) {
            if (n == old_nb) {
                n = new_nb;
                return;
            }
        }
    }

    /// Point t's neighbor slot for its directed edge a->b at nb.
    void link_across(Index t, Index a, Index b, Index nb)
    {
        for (int k = 0; k < 3; ++k) {
            if (tris_[t].v[(k + 1) % 3] == a && tris_[t].v[(k + 2) % 3] == b) {
                tris_[t].n[k] = nb;
                return;
            }
        }
    }

    int index_of_neighbor(Index t, Index nb) const
    {
        for (int k = 0; k < 3; ++k) {
            if (tris_[t].n[k] == nb) return k;
        }
        return -1;
    }

    int index_of_vertex(Index t, Index v) const
    {
        for (int k = 0; k < 3; ++k) {
            if (tris_[t].v[k] == v) return k;
        }
        return -1;
    }

    Index opposite_vertex(Index t, Index nb) const { return tris_[t].v[index_of_neighbor(t, nb)]; }

    /// Triangle holding directed edge a->b and the index of the vertex opposite it.
    std::optional<std::pair<Index, int>> find_directed_edge(Index a, Index b) const
    {
        const Index start = vtri_[a];
        Index t = start;
        do {
            const int i = index_of_vertex(t, a);
            if (tris_[t].v[(i + 1) % 3] == b) return std::pair{t, (i + 2) % 3};
            t = tris_[t].n[(i + 1) % 3];  // rotate CCW around a
        } while (t != start);
        return std::nullopt;
    }

    std::pair<Index, int> require_internal_edge(const Edge& e) const
    {
        if (!has_mesh()) throw Error("triangulation is degenerate; it has no internal edges");
        const auto ia = by_id_.find(e.a);
        const auto ib = by_id_.find(e.b);
        if (ia == by_id_.end() || ib == by_id_.end()) throw Error("edge references an unknown node");
        const auto found = find_directed_edge(ia->second, ib->second);
        if (!found) {
            throw Error("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " is not in the triangulation");
        }
        const auto [t, k] = *found;
        if (is_ghost(t) || is_ghost(tris_[t].n[k])) {
            throw Error("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " lies on the hull");
        }
        return *found;
    }

    // ---- construction -----------------------------------------------------

    void make_first_triangle(Index a, Index b, Index c)
    {
        if (orient2d(pts_[a], pts_[b], pts_[c]) == Orientation::CW) std::swap(b, c);
        const Index t = new_triangle(a, b, c);
        const Index gab = new_triangle(b, a, kGhost);
        const Index gbc = new_triangle(c, b, kGhost);
        const Index gca = new_triangle(a, c, kGhost);
        tris_[t].n = {gbc, gca, gab};
        tris_[gab].n = {gca, gbc, t};
        tris_[gbc].n = {gab, gca, t};
        tris_[gca].n = {gbc, gab, t};
        for (Index v : {a, b, c}) vtri_[v] = t;
        last_ = t;
    }

    Index real_start(Index t) const
    {
        if (t == kNone || t >= tris_.size() || !tri_alive_[t]) {
            for (Index s = 0; s < tris_.size(); ++s) {
                if (tri_alive_[s] && !is_ghost(s)) return s;
            }
            return kNone;
        }
        if (!is_ghost(t)) return t;
        const int g = index_of_vertex(t, kGhost);
        return tris_[t].n[g];
    }

    /// Visibility walk toward p.
    Location locate(const Point& p, Index start)
    {
        Index t = real_start(start);
        std::uint32_t turn = 0;
        for (;;) {
            const Tri& tri = tris_[t];
            bool moved = false;
            int zeros = 0;
            int zero_k = -1;
            ++turn;
            for (int j = 0; j < 3; ++j) {
                const int k = static_cast<int>((j + turn) % 3);
                const Orientation o = orient2d(pts_[tri.v[(k + 1) % 3]], pts_[tri.v[(k + 2) % 3]], p);
                if (o == Orientation::CW) {
                    const Index nb = tri.n[k];
                    if (is_ghost(nb)) return {Where::Outside, nb, 0};
                    t = nb;
                    moved = true;
                    break;
                }
                if (o == Orientation::Collinear) {
                    ++zeros;
                    zero_k = k;
                }
            }
            if (moved) continue;
            if (zeros == 0) return {Where::Inside, t, 0};
            if (zeros == 1) return {Where::OnEdge, t, zero_k};
            for (int k = 0; k < 3; ++k) {
                if (pts_[tri.v[k]] == p) return {Where::OnVertex, t, k};
            }
            return {Where::Inside, t, 0};  // unreachable for a valid triangle
        }
    }

    void insert_vertex(Index v)
    {
        const Point& p = pts_[v];
        const Location loc = locate(p, last_);
        stack_.clear();
        switch (loc.where) {
        case Where::OnVertex:
            throw Error("node " + std::to_string(ids_[v]) + " duplicates the position of node " +
                        std::to_string(ids_[tris_[loc.tri].v[loc.k]]));
        case Where::Inside:
        case Where::Outside:
            split_triangle(loc.tri, v);
            break;
        case Where::OnEdge:
            split_edge(loc.tri, loc.k, v);
            break;
        }
        legalize(v);
        last_ = vtri_[v];
    }

    /// 1 -> 3 split; the new triangles are pushed for legalization.
    void split_triangle(Index t, Index p)
    {
        const Tri old = tris_[t];
        const Index a = old.v[0], b = old.v[1], c = old.v[2];
        const Index na = old.n[0], nb = old.n[1], nc = old.n[2];
        set_triangle(t, a, b, p);
        const Index t1 = new_triangle(b, c, p);
        const Index t2 = new_triangle(c, a, p);
        tris_[t].n = {t1, t2, nc};
        tris_[t1].n = {t2, t, na};
        tris_[t2].n = {t, t1, nb};
        replace_neighbor(na, t, t1);
        replace_neighbor(nb, t, t2);
        vtri_[p] = t;
        stack_.insert(stack_.end(), {t, t1, t2});
    }

    /// 2 -> 4 split of the edge opposite vertex k of triangle t.
    void split_edge(Index t, int k, Index p)
    {
        const Tri tt = tris_[t];
        const Index c = tt.v[k], a = tt.v[(k + 1) % 3], b = tt.v[(k + 2) % 3];
        const Index u = tt.n[k];
        const Index ta_out = tt.n[(k + 1) % 3];  // across c-a... opposite a is edge b-c
        const Index na_t = tt.n[(k + 1) % 3];    // opposite a: edge b-c
        const Index nb_t = tt.n[(k + 2) % 3];    // opposite b: edge c-a
        (void)ta_out;
        const Tri uu = tris_[u];
        const int j = index_of_neighbor(u, t);
        const Index d = uu.v[j];
        // u = (b, a, d) rotated so that d = v[j]; opposite b is edge a-d, opposite a is edge d-b.
        const Index nb_u = uu.n[(j + 1) % 3];  // opposite v[j+1] = b
        const Index na_u = uu.n[(j + 2) % 3];  // opposite v[j+2] = a

        set_triangle(t, c, a, p);     // A1
        const Index a2 = new_triangle(b, c, p);
        set_triangle(u, a, d, p);     // B1
        const Index b2 = new_triangle(d, b, p);
        tris_[t].n = {u, a2, nb_t};
        tris_[a2].n = {t, b2, na_t};
        tris_[u].n = {b2, t, nb_u};
        tris_[b2].n = {a2, u, na_u};
        replace_neighbor(na_t, t, a2);
        replace_neighbor(na_u, u, b2);
        vtri_[p] = t;
        stack_.insert(stack_.end(), {t, a2, u, b2});
    }

    /// Flip the edge opposite vertex k of triangle t.
    /// With t = (c, a, b) rotated so c = v[k] and neighbor u = (b, a, d),
    /// the result is t = (c, a, d) and u = (d, b, c).
    void flip_edge(Index t, int k)
    {
        const Tri tt = tris_[t];
        const Index c = tt.v[k], a = tt.v[(k + 1) % 3], b = tt.v[(k + 2) % 3];
        const Index u = tt.n[k];
        const Index na_t = tt.n[(k + 1) % 3];  // edge b-c
        const Index nb_t = tt.n[(k + 2) % 3];  // edge c-a
        const Tri uu = tris_[u];
        const int j = index_of_neighbor(u, t);
        const Index d = uu.v[j];
        const Index nb_u = uu.n[(j + 1) % 3];  // edge a-d
        const Index na_u = uu.n[(j + 2) % 3];  // edge d-b

        set_triangle(t, c, a, d);
        set_triangle(u, d, b, c);
        tris_[t].n = {nb_u, u, nb_t};
        tris_[u].n = {na_t, t, na_u};
        replace_neighbor(nb_u, u, t);
        replace_neighbor(na_t, t, u);
    }

    /// True when p lies strictly inside t's circumcircle (ghost rule for ghosts).
    bool encroaches(Index t, const Point& p) const
    {
        const Tri& tri = tris_[t];
        const int g = index_of_vertex(t, kGhost);
        if (g < 0) {
            return detail::incircle_sign(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], p) > 0;
        }
        const Point& x = pts_[tri.v[(g + 1) % 3]];
        const Point& y = pts_[tri.v[(g + 2) % 3]];
        const Orientation o = orient2d(x, y, p);
        if (o == Orientation::CCW) return true;
        return o == Orientation::Collinear && detail::within_box(x, y, p) && p != x && p != y;
    }

    /// Lawson flips around the freshly inserted vertex p.
    void legalize(Index p)
    {
        while (!stack_.empty()) {
            const Index t = stack_.back();
            stack_.pop_back();
            if (!tri_alive_[t]) continue;
            const int ip = index_of_vertex(t, p);
            if (ip < 0) continue;
            const Index u = tris_[t].n[ip];
            if (!encroaches(u, pts_[p])) continue;
            flip_edge(t, ip);
            // Both results contain p: t = (p, a, d), u = (d, b, p).
            stack_.push_back(t);
            stack_.push_back(u);
        }
    }

    // ---- deletion ---------------------------------------------------------

    struct LinkEdge {
        Index from;
        Index to;
        Index outer;  // triangle across the edge, outside the star
    };

    void delete_vertex(Index v)
    {
        // Walk the star CCW, recording the link polygon.
        std::vector<LinkEdge> link;
        std::vector<Index> star;
        const Index start = vtri_[v];
        Index t = start;
        do {
            const int i = index_of_vertex(t, v);
            const Tri& tri = tris_[t];
            link.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], tri.n[i]});
            star.push_back(t);
            t = tri.n[(i + 1) % 3];
        } while (t != start);

        // Rotate so that, on the hull, the ghost closes the chain.
        auto ghost_at = std::find_if(link.begin(), link.end(), [](const LinkEdge& e) { return e.from == kGhost; });
        const bool on_hull = ghost_at != link.end();
        if (on_hull) std::rotate(link.begin(), ghost_at + 1, link.end());

        std::vector<Index> poly;
        for (const LinkEdge& e : link) {
            if (e.from != kGhost) poly.push_back(e.from);
        }
        std::vector<std::array<Index, 3>> fill;
        if (on_hull) {
            // Chain u_0 .. u_m ends with (u_m -> ghost), (ghost -> u_0).
            clip_ears(poly, false, fill);
            for (std::size_t i = 0; i + 1 < poly.size(); ++i) fill.push_back({poly[i], poly[i + 1], kGhost});
        } else {
            clip_ears(poly, true, fill);
        }

        for (Index s : star) free_triangle(s);
        drop_vertex_record(v);

        std::vector<Index> made;
        made.reserve(fill.size());
        for (const auto& f : fill) made.push_back(new_triangle(f[0], f[1], f[2]));
        for (Index m : made) {
            for (int k = 0; k < 3; ++k) {
                const Index x = tris_[m].v[(k + 1) % 3];
                const Index y = tris_[m].v[(k + 2) % 3];
                Index nb = kNone;
                for (Index o : made) {
                    if (o == m) continue;
                    const Tri& ot = tris_[o];
                    for (int q = 0; q < 3; ++q) {
                        if (ot.v[(q + 1) % 3] == y && ot.v[(q + 2) % 3] == x) nb = o;
                    }
                }
                if (nb == kNone) {
                    for (const LinkEdge& e : link) {
                        if (e.from == x && e.to == y) {
                            nb = e.outer;
                            link_across(nb, y, x, m);
                        }
                    }
                }
                tris_[m].n[k] = nb;
            }
        }
        last_ = made.empty() ? kNone : made.front();
    }

    /// Ear clipping with Delaunay ears: convex, and no polygon vertex strictly
    /// inside the ear's circumcircle. A closed polygon is reduced to one
    /// triangle; an open chain (hull case) is clipped while ears remain.
    void clip_ears(std::vector<Index>& poly, bool closed, std::vector<std::array<Index, 3>>& out) const
    {
        auto is_ear = [&](std::size_t i) {
            const std::size_t n = poly.size();
            const Index a = poly[(i + n - 1) % n], b = poly[i], c = poly[(i + 1) % n];
            if (orient2d(pts_[a], pts_[b], pts_[c]) != Orientation::CCW) return false;
            for (Index w : poly) {
                if (w == a || w == b || w == c) continue;
                if (detail::incircle_sign(pts_[a], pts_[b], pts_[c], pts_[w]) > 0) return false;
            }
            return true;
        };
        for (;;) {
            const std::size_t n = poly.size();
            if (closed && n == 3) {
                out.push_back({poly[0], poly[1], poly[2]});
                poly.clear();
                return;
            }
            if (n < 3) return;
            const std::size_t lo = closed ? 0 : 1;
            const std::size_t hi = closed ? n : n - 1;
            bool clipped = false;
            for (std::size_t i = lo; i < hi; ++i) {
                if (!is_ear(i)) continue;
                out.push_back({poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]});
                poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
                break;
            }
            if (!clipped) {
                if (closed) throw Error("vertex deletion: no Delaunay ear found in cavity");
                return;
            }
        }
    }

    Rng rng_;
    std::vector<Point> pts_;
    std::vector<NodeId> ids_;
    std::vector<char> alive_;
    std::vector<Index> vtri_;
    std::unordered_map<NodeId, Index> by_id_;

    std::vector<Tri> tris_;
    std::vector<char> tri_alive_;
    std::vector<Index> free_;
    std::size_t real_triangles_ = 0;
    Index last_ = kNone;
    std::vector<Index> stack_;
};

/// Delaunay triangulation of a node set with a seeded insertion order.
inline Triangulation build_delaunay(std::span<const Node> nodes, std::uint64_t seed = 1)
{
    return Triangulation::build(nodes, seed);
}

inline Triangulation build_delaunay(const Topology& topo, std::uint64_t seed = 1)
{
    return Triangulation::build(topo.nodes(), seed);
}

}  // namespace meshtopo
