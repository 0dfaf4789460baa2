#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "polywave/geometry.hpp"

namespace polywave {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct MeshParams {
    double h = 0.05;
    /// Grading exponent in (0, 1]; unset means clamp(1/rho_max, 1/2, 1).
    std::optional<double> grade;
    double min_angle = 25.0;
    std::size_t max_vertices = 2'000'000; ///< per sheet
    bool lattice_seed = true;
    std::uint64_t seed = 0x5eed;

    void validate() const;
    double grade_for(const SurfaceSpec& spec) const;
};

enum class Parity { odd, even };

/// Triangulation of the doubled surface. Both sheets share the coordinates of
/// the base polygon: a vertex on sheet 1 sits at the same (x, y) as its mirror
/// image on sheet 0, and sheet-1 triangles are listed clockwise in those
/// coordinates, which is counterclockwise in the reflected chart (x, -y).
struct SurfaceMesh {
    std::vector<Point2> vertices;
    std::vector<std::uint8_t> sheet;          ///< 0 or 1; seam vertices are on sheet 0
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<std::uint8_t> triangle_sheet;
    std::vector<std::uint32_t> involution;    ///< sigma as a vertex permutation
    std::vector<std::uint32_t> cone_vertex_ids; ///< one per polygon vertex, flattened ring order
    std::vector<std::array<std::uint32_t, 2>> boundary_edge_ids; ///< seam edges
    double total_area = 0.0;

    std::size_t vertex_count() const { return vertices.size(); }
    bool on_seam(std::uint32_t v) const { return involution[v] == v; }
    /// Position in the chart of the given sheet (sheet 1 is reflected).
    Point2 chart_position(std::uint32_t v, int chart) const {
        return chart == 0 ? vertices[v] : Point2{vertices[v].x, -vertices[v].y};
    }
    /// Twice the signed area of a triangle in the chart of its sheet.
    double chart_orient(std::size_t t) const;

    /// Rebuilds sheet tags, triangle sheets, seam edges and total area from
    /// vertices, triangles, involution and cone ids.
    void rebuild_derived();
    /// Throws NumericalError if any invariant (orientation, order-2 involution
    /// mapping triangles to triangles, fixed seam) fails.
    void check() const;
};

SurfaceMesh triangulate(const SurfaceSpec& spec, const MeshParams& params);

struct DiscreteOperators {
    SparseMatrix stiffness;
    SparseMatrix mass;
    bool dirichlet_at_cones = false;
    /// Degree of freedom for each mesh vertex, -1 where eliminated.
    std::vector<std::int64_t> dof_of_vertex;
    std::vector<std::uint32_t> vertex_of_dof;

    Eigen::Index size() const { return stiffness.rows(); }
};

/// P1 stiffness and consistent mass. With `dirichlet_at_cones`, the rows and
/// columns of the cone vertices are removed.
DiscreteOperators assemble(const SurfaceMesh& mesh, bool dirichlet_at_cones = false);

/// Element stiffness of one triangle (counterclockwise a, b, c).
std::array<std::array<double, 3>, 3> element_stiffness(Point2 a, Point2 b, Point2 c);

/// Restriction of the operators to the functions of one parity under sigma.
/// `prolong` has orthonormal columns in the Euclidean sense:
/// odd basis (e_v - e_sv)/sqrt2 for each off-seam pair, even basis
/// (e_v + e_sv)/sqrt2 plus e_s for seam vertices.
struct ParityBlock {
    Parity parity = Parity::odd;
    SparseMatrix stiffness;
    SparseMatrix mass;
    SparseMatrix prolong; ///< full dofs x reduced dofs
};

ParityBlock parity_block(const SurfaceMesh& mesh, const DiscreteOperators& ops, Parity parity);

/// Nodal parity projection (u -/+ u o sigma) / 2 of a vertex field.
std::vector<std::complex<double>> parity_split(const SurfaceMesh& mesh, const std::vector<std::complex<double>>& field,
                                               Parity parity);

struct MeshStats {
    std::size_t vertices = 0;
    std::size_t triangles = 0;
    std::size_t seam_vertices = 0;
    double min_angle_deg = 0.0;
    double max_edge = 0.0;
    double min_edge = 0.0;
    double total_area = 0.0;
};

MeshStats mesh_stats(const SurfaceMesh& mesh);

/// Binary cache (magic "ESCSMESH").
void save_mesh(const SurfaceMesh& mesh, const std::string& path);
SurfaceMesh load_mesh(const std::string& path);
/// FNV-1a hash of the cache file contents.
std::uint64_t file_hash(const std::string& path);

} // namespace polywave
