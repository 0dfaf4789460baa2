#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polywave/error.hpp"

namespace polywave {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 a);
double distance(Point2 a, Point2 b);

/// Twice the signed area of triangle (a, b, c); positive when counterclockwise.
double orient(Point2 a, Point2 b, Point2 c);

/// Planar polygonal domain. The outer ring is counterclockwise, holes are
/// clockwise, so the domain always lies to the left of a traversed edge.
struct PolygonSpec {
    std::vector<Point2> outer;
    std::vector<std::vector<Point2>> holes;
    std::string name;

    std::size_t vertex_count() const;
    /// Outer ring first, then holes in order.
    std::vector<std::span<const Point2>> rings() const;
};

/// A vertex of the polygon seen as a cone point of the doubled surface.
struct ConePoint {
    Point2 location;
    double alpha = 0.0; ///< interior angle of the polygon at the vertex
    double rho = 0.0;   ///< cone radius alpha/pi; the double has cone angle 2*alpha
    std::size_t ring = 0;
    std::size_t index = 0; ///< position within its ring
};

struct SurfaceSpec {
    PolygonSpec base;
    std::vector<ConePoint> cone_points;
    double total_area = 0.0;

    std::size_t hole_count() const { return base.holes.size(); }
    /// chi(X) = 2 - 2 * genus, and doubling a domain with h holes gives genus h.
    int euler_characteristic() const { return 2 - 2 * static_cast<int>(base.holes.size()); }
    /// Sum over cone points of (2*pi - 2*alpha).
    double curvature_sum() const;
    double max_rho() const;
};

/// Signed area (shoelace); positive for counterclockwise rings.
double signed_area(std::span<const Point2> ring);
double polygon_area(const PolygonSpec& poly);

/// Interior angle in (0, 2*pi) at every vertex of a ring, with the domain on
/// the left of the traversal.
std::vector<double> interior_angles(std::span<const Point2> ring);

/// Point-in-domain test (outer minus holes). Points on the boundary are
/// reported as inside when `closed` is true.
bool contains(const PolygonSpec& poly, Point2 p, bool closed = false);

/// Euclidean distance from `p` to the polygon boundary.
double boundary_distance(const PolygonSpec& poly, Point2 p);

bool is_convex(const PolygonSpec& poly);

/// Checks every PolygonSpec invariant; throws InputError naming the ring and
/// vertex index of the first violation.
void validate(const PolygonSpec& poly);

/// Parses the line-oriented polygon format:
///
///     # comment
///     name <label>
///     outer <n>
///     x y            (n lines)
///     hole <m>       (optional, repeated)
///     x y            (m lines)
PolygonSpec parse_polygon(std::string_view text);
PolygonSpec load_polygon(const std::string& path);
std::string format_polygon(const PolygonSpec& poly);

/// The doubling construction: glue the polygon to its mirror image along the
/// boundary. Every polygon vertex becomes a cone point with rho = alpha/pi.
SurfaceSpec double_polygon(const PolygonSpec& poly);

} // namespace polywave
