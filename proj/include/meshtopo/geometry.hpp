#pragma once

// Exact planar primitives over micrometer-snapped integer coordinates.
//
// Every coordinate is an int64 count of micrometers with magnitude at most
// kMaxCoordinate (2^40 um, roughly 1100 km). Under that bound:
//   - orient2d fits in 128-bit products,
//   - in_circle fits in 256-bit products,
//   - segment intersection points are rationals with 128-bit numerators.
// All predicates are therefore exact; no rounding can flip a sign.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace meshtopo {

__extension__ typedef __int128 i128;
using i256 = boost::multiprecision::int256_t;
using i512 = boost::multiprecision::int512_t;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A geometric query was made on input with no defined answer
/// (collinear circumcircle, flip of a non-convex quad, ...).
class DegenerateError : public Error {
public:
    using Error::Error;
};

inline constexpr std::int64_t kMicrometersPerMeter = 1'000'000;
inline constexpr std::int64_t kMaxCoordinate = std::int64_t{1} << 40;

struct Point {
    std::int64_t x = 0;  // micrometers
    std::int64_t y = 0;  // micrometers

    friend constexpr bool operator==(const Point&, const Point&) = default;
    friend constexpr auto operator<=>(const Point&, const Point&) = default;
};

/// Floating point location in meters, used for derived (non-snapped) output.
struct PointF {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const PointF&, const PointF&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Point& p)
{
    return os << '(' << p.x << "um, " << p.y << "um)";
}

inline std::ostream& operator<<(std::ostream& os, const PointF& p)
{
    return os << '(' << p.x << ", " << p.y << ')';
}

/// Snap a decimal meter value onto the micrometer grid.
inline std::int64_t snap_meters(double meters)
{
    if (!std::isfinite(meters)) {
        throw Error("coordinate is not finite");
    }
    const double um = std::round(meters * static_cast<double>(kMicrometersPerMeter));
    if (std::fabs(um) > static_cast<double>(kMaxCoordinate)) {
        throw Error("coordinate " + std::to_string(meters) + " m exceeds the supported range");
    }
    return static_cast<std::int64_t>(um);
}

inline double to_meters(std::int64_t um)
{
    return static_cast<double>(um) / static_cast<double>(kMicrometersPerMeter);
}

inline Point point_from_meters(double x, double y)
{
    return Point{snap_meters(x), snap_meters(y)};
}

inline PointF to_meters(const Point& p)
{
    return PointF{to_meters(p.x), to_meters(p.y)};
}

inline bool in_coordinate_range(const Point& p)
{
    return p.x >= -kMaxCoordinate && p.x <= kMaxCoordinate && p.y >= -kMaxCoordinate &&
           p.y <= kMaxCoordinate;
}

struct Segment {
    Point a;
    Point b;

    friend constexpr bool operator==(const Segment&, const Segment&) = default;
};

enum class Orientation : int { CW = -1, Collinear = 0, CCW = 1 };

enum class CirclePosition : int { Outside = -1, Cocircular = 0, Inside = 1 };

enum class IntersectionKind { None, Proper, EndpointTouch, Overlap };

inline const char* to_string(IntersectionKind k)
{
    switch (k) {
    case IntersectionKind::None: return "none";
    case IntersectionKind::Proper: return "proper";
    case IntersectionKind::EndpointTouch: return "endpoint_touch";
    case IntersectionKind::Overlap: return "overlap";
    }
    return "?";
}

struct SegmentIntersection {
    IntersectionKind kind = IntersectionKind::None;
    std::optional<PointF> point;  // set for Proper and EndpointTouch
};

namespace detail {

template <class T>
constexpr int sign_of(const T& v)
{
    return (v > 0) - (v < 0);
}

inline i128 cross(std::int64_t ax, std::int64_t ay, std::int64_t bx, std::int64_t by)
{
    return static_cast<i128>(ax) * by - static_cast<i128>(ay) * bx;
}

/// Twice the signed area of abc, exact.
inline i128 orient_det(const Point& a, const Point& b, const Point& c)
{
    return cross(b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
}

inline long double to_long_double(i128 v)
{
    return static_cast<long double>(v);
}

/// Sign of the incircle determinant for a CCW triangle abc; positive when d
/// lies inside. Floating filter first, 256-bit fallback.
inline int incircle_sign(const Point& a, const Point& b, const Point& c, const Point& d)
{
    const std::int64_t adx = a.x - d.x, ady = a.y - d.y;
    const std::int64_t bdx = b.x - d.x, bdy = b.y - d.y;
    const std::int64_t cdx = c.x - d.x, cdy = c.y - d.y;

    {
        // Differences are exact in double (|v| <= 2^41 < 2^53).
        const double fadx = adx, fady = ady, fbdx = bdx, fbdy = bdy, fcdx = cdx, fcdy = cdy;
        const double bdxcdy = fbdx * fcdy, cdxbdy = fcdx * fbdy;
        const double alift = fadx * fadx + fady * fady;
        const double cdxady = fcdx * fady, adxcdy = fadx * fcdy;
        const double blift = fbdx * fbdx + fbdy * fbdy;
        const double adxbdy = fadx * fbdy, bdxady = fbdx * fady;
        const double clift = fcdx * fcdx + fcdy * fcdy;
        const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                           clift * (adxbdy - bdxady);
        const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                                 (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                                 (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
        constexpr double eps = 1.1102230246251565e-16;  // 2^-53
        constexpr double errbound = (10.0 + 96.0 * eps) * eps;
        if (det > errbound * permanent) return 1;
        if (-det > errbound * permanent) return -1;
    }

    const i256 alift = i256(static_cast<i128>(adx) * adx + static_cast<i128>(ady) * ady);
    const i256 blift = i256(static_cast<i128>(bdx) * bdx + static_cast<i128>(bdy) * bdy);
    const i256 clift = i256(static_cast<i128>(cdx) * cdx + static_cast<i128>(cdy) * cdy);
    const i256 det = alift * i256(cross(bdx, bdy, cdx, cdy)) +
                     blift * i256(cross(cdx, cdy, adx, ady)) +
                     clift * i256(cross(adx, ady, bdx, bdy));
    return sign_of(det);
}

/// True when p lies on the closed segment ab, given that a, b, p are collinear.
inline bool within_box(const Point& a, const Point& b, const Point& p)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

}  // namespace detail

inline Orientation orient2d(const Point& a, const Point& b, const Point& c)
{
    return static_cast<Orientation>(detail::sign_of(detail::orient_det(a, b, c)));
}

/// Position of d relative to the circumcircle of abc. Accepts either winding.
/// Throws DegenerateError when abc is collinear.
inline CirclePosition in_circle(const Point& a, const Point& b, const Point& c, const Point& d)
{
    const Orientation o = orient2d(a, b, c);
    if (o == Orientation::Collinear) {
        throw DegenerateError("in_circle: collinear triangle has no circumcircle");
    }
    const int s = o == Orientation::CCW ? detail::incircle_sign(a, b, c, d)
                                        : detail::incircle_sign(a, c, b, d);
    return static_cast<CirclePosition>(s);
}

inline i128 squared_distance(const Point& a, const Point& b)
{
    const i128 dx = a.x - b.x;
    const i128 dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Euclidean distance in meters.
inline double dist(const Point& a, const Point& b)
{
    const long double um = std::sqrt(detail::to_long_double(squared_distance(a, b)));
    return static_cast<double>(um / static_cast<long double>(kMicrometersPerMeter));
}

/// Length of a squared micrometer distance in meters.
inline double squared_um_to_meters(i128 sq)
{
    return static_cast<double>(std::sqrt(detail::to_long_double(sq)) /
                               static_cast<long double>(kMicrometersPerMeter));
}

/// Circumcenter of abc in meters (not snapped). Throws on collinear input.
inline PointF circumcenter(const Point& a, const Point& b, const Point& c)
{
    const std::int64_t bx = b.x - a.x, by = b.y - a.y;
    const std::int64_t cx = c.x - a.x, cy = c.y - a.y;
    const i128 d = 2 * detail::cross(bx, by, cx, cy);
    if (d == 0) {
        throw DegenerateError("circumcenter: collinear points");
    }
    const i128 blift = static_cast<i128>(bx) * bx + static_cast<i128>(by) * by;
    const i128 clift = static_cast<i128>(cx) * cx + static_cast<i128>(cy) * cy;
    const i128 ux = blift * cy - clift * by;
    const i128 uy = clift * bx - blift * cx;
    const long double scale = static_cast<long double>(kMicrometersPerMeter);
    const long double dd = detail::to_long_double(d);
    return PointF{static_cast<double>((static_cast<long double>(a.x) + detail::to_long_double(ux) / dd) / scale),
                  static_cast<double>((static_cast<long double>(a.y) + detail::to_long_double(uy) / dd) / scale)};
}

/// Classify how two closed segments meet.
///
/// Proper: the open interiors cross at exactly one point.
/// EndpointTouch: a single common point that is an endpoint of at least one
///   of them (shared vertex or T-junction).
/// Overlap: collinear with a common sub-segment of positive length.
inline SegmentIntersection segment_intersection(const Segment& s1, const Segment& s2)
{
    const Point &a = s1.a, &b = s1.b, &c = s2.a, &d = s2.b;
    const int o1 = detail::sign_of(detail::orient_det(a, b, c));
    const int o2 = detail::sign_of(detail::orient_det(a, b, d));
    const int o3 = detail::sign_of(detail::orient_det(c, d, a));
    const int o4 = detail::sign_of(detail::orient_det(c, d, b));

    if (o1 == 0 && o2 == 0) {
        // Collinear: project onto the dominant axis.
        const bool use_x = a.x != b.x;
        auto key = [use_x](const Point& p) { return use_x ? p.x : p.y; };
        const std::int64_t lo1 = std::min(key(a), key(b)), hi1 = std::max(key(a), key(b));
        const std::int64_t lo2 = std::min(key(c), key(d)), hi2 = std::max(key(c), key(d));
        const std::int64_t lo = std::max(lo1, lo2), hi = std::min(hi1, hi2);
        if (lo > hi) return {};
        if (lo < hi) return {IntersectionKind::Overlap, std::nullopt};
        // Single shared point; find which endpoint it is.
        for (const Point* p : {&a, &b, &c, &d}) {
            if (key(*p) == lo) return {IntersectionKind::EndpointTouch, to_meters(*p)};
        }
        return {};
    }

    if (o1 * o2 > 0 || o3 * o4 > 0) return {};

    if (o1 == 0) return {IntersectionKind::EndpointTouch, to_meters(c)};
    if (o2 == 0) return {IntersectionKind::EndpointTouch, to_meters(d)};
    if (o3 == 0) return {IntersectionKind::EndpointTouch, to_meters(a)};
    if (o4 == 0) return {IntersectionKind::EndpointTouch, to_meters(b)};

    // Proper crossing: a + t (b - a), t = cross(c - a, d - c) / cross(b - a, d - c).
    const i128 den = detail::cross(b.x - a.x, b.y - a.y, d.x - c.x, d.y - c.y);
    const i128 num = detail::cross(c.x - a.x, c.y - a.y, d.x - c.x, d.y - c.y);
    const long double t = detail::to_long_double(num) / detail::to_long_double(den);
    const long double scale = static_cast<long double>(kMicrometersPerMeter);
    const long double x = (static_cast<long double>(a.x) + t * static_cast<long double>(b.x - a.x)) / scale;
    const long double y = (static_cast<long double>(a.y) + t * static_cast<long double>(b.y - a.y)) / scale;
    return {IntersectionKind::Proper, PointF{static_cast<double>(x), static_cast<double>(y)}};
}

}  // namespace meshtopo

template <>
struct std::hash<meshtopo::Point> {
    std::size_t operator()(const meshtopo::Point& p) const noexcept
    {
        const auto h1 = std::hash<std::int64_t>{}(p.x);
        const auto h2 = std::hash<std::int64_t>{}(p.y);
        return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
    }
};
