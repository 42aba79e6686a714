#pragma once

// Bentley-Ottmann sweep reporting every proper crossing among a set of
// segments in O((n + I) log n).
//
// The sweep line moves from top to bottom; events are ordered by
// (y descending, x ascending). A horizontal segment's left endpoint is its
// upper endpoint. Intersection events are exact rationals, so queue and
// status ordering never depend on rounding.

#include "meshtopo/geometry.hpp"
#include "meshtopo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace meshtopo {

/// Exact point (x / d, y / d) in micrometers, d > 0.
struct RationalPoint {
    i128 x = 0;
    i128 y = 0;
    i128 d = 1;

    static RationalPoint from(const Point& p) { return {p.x, p.y, 1}; }

    bool equals(const Point& p) const { return x == static_cast<i128>(p.x) * d && y == static_cast<i128>(p.y) * d; }

    PointF to_meters() const
    {
        const long double s = static_cast<long double>(d) * static_cast<long double>(kMicrometersPerMeter);
        return PointF{static_cast<double>(static_cast<long double>(x) / s),
                      static_cast<double>(static_cast<long double>(y) / s)};
    }
};

namespace detail {

/// sign(an / ad - bn / bd) for positive denominators.
inline int compare_ratio(i128 an, i128 ad, i128 bn, i128 bd)
{
    if (ad == bd) return sign_of(an - bn);
    const long double a = static_cast<long double>(an) / static_cast<long double>(ad);
    const long double b = static_cast<long double>(bn) / static_cast<long double>(bd);
    const long double bound = (std::fabs(a) + std::fabs(b)) * 0x1p-58L;
    if (a - b > bound) return 1;
    if (b - a > bound) return -1;
    return sign_of(i256(an) * i256(bd) - i256(bn) * i256(ad));
}

}  // namespace detail

/// Strict weak order of the sweep: larger y first, then smaller x.
struct SweepOrder {
    bool operator()(const RationalPoint& p, const RationalPoint& q) const
    {
        const int cy = detail::compare_ratio(p.y, p.d, q.y, q.d);
        if (cy != 0) return cy > 0;
        return detail::compare_ratio(p.x, p.d, q.x, q.d) < 0;
    }
};

struct Crossing {
    std::size_t first = 0;   // segment index, first < second
    std::size_t second = 0;
    PointF point;            // meters, rounded from the exact crossing
};

struct SegmentPair {
    std::size_t first = 0;
    std::size_t second = 0;
    friend auto operator<=>(const SegmentPair&, const SegmentPair&) = default;
};

struct CrossingSet {
    std::vector<Crossing> crossings;    // sorted by (first, second)
    std::vector<SegmentPair> overlaps;  // collinear overlaps, diagnostics only

    std::size_t size() const { return crossings.size(); }
};

/// What the sweep saw at one event point; used for tracing.
struct SweepEvent {
    RationalPoint point;
    std::size_t upper = 0;     // segments starting here
    std::size_t lower = 0;     // segments ending here
    std::size_t interior = 0;  // segments passing through
};

using SweepObserver = std::function<void(const SweepEvent&)>;

namespace detail {

class Sweep {
public:
    explicit Sweep(std::span<const Segment> input) : segs_(input.size())
    {
        for (std::size_t i = 0; i < input.size(); ++i) {
            const Segment& s = input[i];
            if (s.a == s.b) {
                throw Error("segment " + std::to_string(i) + " is degenerate (both endpoints equal)");
            }
            if (!in_coordinate_range(s.a) || !in_coordinate_range(s.b)) {
                throw Error("segment " + std::to_string(i) + " lies outside the supported coordinate range");
            }
            const bool a_first = s.a.y > s.b.y || (s.a.y == s.b.y && s.a.x < s.b.x);
            Seg& g = segs_[i];
            g.upper = a_first ? s.a : s.b;
            g.lower = a_first ? s.b : s.a;
            g.dx = g.lower.x - g.upper.x;
            g.dy = g.upper.y - g.lower.y;
            g.horizontal = g.dy == 0;
        }
    }

    CrossingSet run(const SweepObserver& observer)
    {
        Queue queue;
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            queue[RationalPoint::from(segs_[i].upper)].push_back(i);
            queue.try_emplace(RationalPoint::from(segs_[i].lower));
        }

        Status status(StatusLess{this});
        std::vector<std::size_t> lower, interior, inserted;
        while (!queue.empty()) {
            auto node = queue.extract(queue.begin());
            current_ = node.key();
            current_px_ = static_cast<long double>(current_.x) / static_cast<long double>(current_.d);
            current_py_ = static_cast<long double>(current_.y) / static_cast<long double>(current_.d);
            const std::vector<std::size_t>& upper = node.mapped();

            lower.clear();
            interior.clear();
            auto [lo, hi] = status.equal_range(Probe{});
            for (auto it = lo; it != hi; ++it) {
                (current_.equals(segs_[*it].lower) ? lower : interior).push_back(*it);
            }
            if (observer) observer(SweepEvent{current_, upper.size(), lower.size(), interior.size()});

            report(upper, lower, interior);

            auto hint = status.erase(lo, hi);
            inserted.assign(upper.begin(), upper.end());
            inserted.insert(inserted.end(), interior.begin(), interior.end());
            std::sort(inserted.begin(), inserted.end(), [this](std::size_t a, std::size_t b) { return below_less(a, b); });

            if (inserted.empty()) {
                if (hint != status.end() && hint != status.begin()) find_new_event(*std::prev(hint), *hint, queue);
                continue;
            }
            auto first = status.end();
            auto last = status.end();
            for (std::size_t s : inserted) {
                last = status.insert(hint, s);
                if (first == status.end()) first = last;
            }
            if (first != status.begin()) find_new_event(*std::prev(first), *first, queue);
            if (std::next(last) != status.end()) find_new_event(*last, *std::next(last), queue);
        }

        std::sort(result_.crossings.begin(), result_.crossings.end(), [](const Crossing& l, const Crossing& r) {
            return std::tie(l.first, l.second) < std::tie(r.first, r.second);
        });
        result_.overlaps.assign(overlaps_.begin(), overlaps_.end());
        return std::move(result_);
    }

private:
    struct Seg {
        Point upper;
        Point lower;
        std::int64_t dx = 0;  // lower.x - upper.x
        std::int64_t dy = 0;  // upper.y - lower.y, >= 0
        bool horizontal = false;
    };

    struct Probe {};

    using Queue = std::map<RationalPoint, std::vector<std::size_t>, SweepOrder>;

    /// Position of segment s relative to the current event point along the
    /// sweep line: -1 left, 0 through it, +1 right. Horizontal segments in
    /// the status always contain the event point.
    int side(std::size_t s) const
    {
        const Seg& g = segs_[s];
        if (g.horizontal) return 0;
        const RationalPoint& p = current_;
        const long double px = current_px_;
        const auto [x, err] = x_at_line(g);
        if (x - px > err + std::fabs(px) * 0x1p-58L) return 1;
        if (px - x > err + std::fabs(px) * 0x1p-58L) return -1;
        if (p.d == 1) {
            const i128 v = static_cast<i128>(g.upper.x) * g.dy + static_cast<i128>(g.dx) * (g.upper.y - static_cast<i128>(p.y)) -
                           p.x * g.dy;
            return sign_of(v);
        }
        // x(s, y) = ux + dx * (uy - y) / dy with y = p.y / p.d; compare to p.x / p.d.
        const i256 lhs = i256(g.upper.x) * i256(g.dy) * i256(p.d) +
                         i256(g.dx) * (i256(g.upper.y) * i256(p.d) - i256(p.y));
        const i256 rhs = i256(p.x) * i256(g.dy);
        return sign_of(lhs - rhs);
    }

    /// Approximate x of a non-horizontal segment at the sweep line, with an
    /// upper bound on its absolute error.
    std::pair<long double, long double> x_at_line(const Seg& g) const
    {
        const long double py = current_py_;
        const long double dx = static_cast<long double>(g.dx);
        const long double dy = static_cast<long double>(g.dy);
        const long double x = static_cast<long double>(g.upper.x) + dx * (static_cast<long double>(g.upper.y) - py) / dy;
        const long double mag = std::fabs(static_cast<long double>(g.upper.x)) +
                                std::fabs(dx) * (std::fabs(static_cast<long double>(g.upper.y)) + std::fabs(py)) / dy;
        return {x, mag * 0x1p-58L};
    }

    /// Left-to-right order just below a point shared by both segments.
    bool below_less(std::size_t a, std::size_t b) const
    {
        const Seg& ga = segs_[a];
        const Seg& gb = segs_[b];
        if (ga.horizontal != gb.horizontal) return gb.horizontal;
        if (!ga.horizontal) {
            const int c = sign_of(static_cast<i128>(ga.dx) * gb.dy - static_cast<i128>(gb.dx) * ga.dy);
            if (c != 0) return c < 0;
        }
        return a < b;
    }

    /// Exact comparison of two segments' x at the sweep line, for pairs that
    /// do not pass through the event point.
    int compare_at_line(std::size_t a, std::size_t b) const
    {
        const Seg& ga = segs_[a];
        const Seg& gb = segs_[b];
        const auto [xa, ea] = x_at_line(ga);
        const auto [xb, eb] = x_at_line(gb);
        if (xa - xb > ea + eb) return 1;
        if (xb - xa > ea + eb) return -1;
        const RationalPoint& p = current_;
        auto numerator = [&p](const Seg& g) {
            return i512(g.upper.x) * i512(g.dy) * i512(p.d) + i512(g.dx) * (i512(g.upper.y) * i512(p.d) - i512(p.y));
        };
        // x_a = na / (dy_a d), x_b = nb / (dy_b d)
        return sign_of(numerator(ga) * i512(gb.dy) - numerator(gb) * i512(ga.dy));
    }

    struct StatusLess {
        using is_transparent = void;
        const Sweep* sweep;

        bool operator()(std::size_t a, std::size_t b) const
        {
            if (a == b) return false;
            const int sa = sweep->side(a);
            const int sb = sweep->side(b);
            if (sa != sb) return sa < sb;
            if (sa == 0) return sweep->below_less(a, b);
            const int c = sweep->compare_at_line(a, b);
            if (c != 0) return c < 0;
            // They meet on the sweep line away from the event point: already
            // swapped if that point was processed (left of it), not yet otherwise.
            return sa < 0 ? sweep->below_less(a, b) : sweep->below_less(b, a);
        }
        bool operator()(std::size_t a, Probe) const { return sweep->side(a) < 0; }
        bool operator()(Probe, std::size_t b) const { return sweep->side(b) > 0; }
    };

    using Status = std::set<std::size_t, StatusLess>;

    void find_new_event(std::size_t a, std::size_t b, Queue& queue) const
    {
        const Seg& ga = segs_[a];
        const Seg& gb = segs_[b];
        const Point &p = ga.upper, &q = ga.lower, &r = gb.upper, &s = gb.lower;
        const int o1 = sign_of(orient_det(p, q, r));
        const int o2 = sign_of(orient_det(p, q, s));
        if (o1 == 0 && o2 == 0) return;  // collinear: handled at shared endpoint events
        if (o1 * o2 > 0) return;
        const int o3 = sign_of(orient_det(r, s, p));
        const int o4 = sign_of(orient_det(r, s, q));
        if (o3 * o4 > 0) return;

        i128 den = cross(q.x - p.x, q.y - p.y, s.x - r.x, s.y - r.y);
        i128 num = cross(r.x - p.x, r.y - p.y, s.x - r.x, s.y - r.y);
        if (den < 0) {
            den = -den;
            num = -num;
        }
        const RationalPoint hit{static_cast<i128>(p.x) * den + static_cast<i128>(q.x - p.x) * num,
                                static_cast<i128>(p.y) * den + static_cast<i128>(q.y - p.y) * num, den};
        if (SweepOrder{}(current_, hit)) queue.try_emplace(hit);
    }

    void report(std::span<const std::size_t> upper, std::span<const std::size_t> lower,
                std::span<const std::size_t> interior)
    {
        // Two segments containing the event point in their interiors cross
        // there properly unless they are parallel (then they overlap).
        for (std::size_t i = 0; i < interior.size(); ++i) {
            for (std::size_t j = i + 1; j < interior.size(); ++j) {
                const std::size_t a = std::min(interior[i], interior[j]);
                const std::size_t b = std::max(interior[i], interior[j]);
                if (parallel(a, b)) continue;
                result_.crossings.push_back(Crossing{a, b, current_.to_meters()});
            }
        }

        const std::size_t total = upper.size() + lower.size() + interior.size();
        if (total < 2) return;
        group_.clear();
        for (auto part : {upper, lower, interior}) {
            for (std::size_t s : part) group_.emplace_back(direction(s), s);
        }
        std::sort(group_.begin(), group_.end());
        for (std::size_t i = 0; i < group_.size();) {
            std::size_t j = i + 1;
            while (j < group_.size() && group_[j].first == group_[i].first) ++j;
            for (std::size_t x = i; x < j; ++x) {
                for (std::size_t y = x + 1; y < j; ++y) {
                    const std::size_t a = std::min(group_[x].second, group_[y].second);
                    const std::size_t b = std::max(group_[x].second, group_[y].second);
                    const Seg& ga = segs_[a];
                    const Seg& gb = segs_[b];
                    const auto hit = segment_intersection(Segment{ga.upper, ga.lower}, Segment{gb.upper, gb.lower});
                    if (hit.kind == IntersectionKind::Overlap) overlaps_.insert(SegmentPair{a, b});
                }
            }
            i = j;
        }
    }

    bool parallel(std::size_t a, std::size_t b) const
    {
        const Seg& ga = segs_[a];
        const Seg& gb = segs_[b];
        return static_cast<i128>(ga.dx) * gb.dy == static_cast<i128>(gb.dx) * ga.dy;
    }

    std::pair<std::int64_t, std::int64_t> direction(std::size_t s) const
    {
        const Seg& g = segs_[s];
        const std::int64_t k = std::gcd(g.dx, g.dy);
        return {g.dx / k, g.dy / k};
    }

    std::vector<Seg> segs_;
    RationalPoint current_;
    long double current_px_ = 0;
    long double current_py_ = 0;
    CrossingSet result_;
    std::set<SegmentPair> overlaps_;
    std::vector<std::pair<std::pair<std::int64_t, std::int64_t>, std::size_t>> group_;
};

}  // namespace detail

/// Every pair of segments whose interiors cross at exactly one point.
/// Shared endpoints and T-junctions are not crossings; collinear overlaps
/// are listed separately in `overlaps`.
inline CrossingSet find_crossings(std::span<const Segment> segments, const SweepObserver& observer = {})
{
    return detail::Sweep(segments).run(observer);
}

struct LinkCrossing {
    Edge first;
    Edge second;
    PointF point;
};

/// Crossings among the links of a topology, reported by link.
inline std::vector<LinkCrossing> find_link_crossings(const Topology& topo)
{
    std::vector<Edge> edges(topo.links().begin(), topo.links().end());
    std::vector<Segment> segments;
    segments.reserve(edges.size());
    for (const Edge& e : edges) segments.push_back(topo.segment(e));
    const CrossingSet set = find_crossings(segments);
    std::vector<LinkCrossing> out;
    out.reserve(set.size());
    for (const Crossing& c : set.crossings) out.push_back(LinkCrossing{edges[c.first], edges[c.second], c.point});
    return out;
}

inline std::size_t count_crossings(const Topology& topo)
{
    std::vector<Segment> segments;
    segments.reserve(topo.link_count());
    for (const Edge& e : topo.links()) segments.push_back(topo.segment(e));
    return find_crossings(segments).size();
}

}  // namespace meshtopo
