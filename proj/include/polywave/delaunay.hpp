#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "polywave/geometry.hpp"

namespace polywave {

/// Triangulation of one copy of the polygon.
struct PlanarMesh {
    std::vector<Point2> points;
    std::vector<std::array<std::uint32_t, 3>> triangles; ///< counterclockwise
    std::vector<std::uint8_t> on_boundary;               ///< per point
    std::vector<std::int32_t> corner;                    ///< polygon vertex index (flattened rings) or -1
    std::vector<std::array<std::uint32_t, 2>> boundary_edges;
};

struct RefinementOptions {
    /// Target edge length as a function of position.
    std::function<double(Point2)> size;
    /// Spacing of the seed lattice; 0 disables seeding. Lattice points are
    /// only placed where size(p) is at least 0.95 of the spacing.
    double lattice_spacing = 0.0;
    double min_angle_deg = 25.0;
    std::size_t max_vertices = 2'000'000;
    std::uint64_t seed = 0x5eed;
};

/// Conforming Delaunay refinement (Ruppert): boundary sampled by the size
/// function, optional lattice seeding, then circumcenter insertion until every
/// interior triangle meets the angle and size bounds. Segments are kept
/// Gabriel by splitting any segment whose diametral circle a candidate point
/// would enter.
///
/// Throws InputError if the vertex budget is exhausted, NumericalError if the
/// angle bound cannot be reached.
PlanarMesh refine_polygon(const PolygonSpec& poly, const RefinementOptions& options);

/// Smallest interior angle of a triangle, in degrees.
double min_angle_deg(Point2 a, Point2 b, Point2 c);

} // namespace polywave
