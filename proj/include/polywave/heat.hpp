#pragma once

#include <ostream>
#include <vector>

#include "polywave/cone_kernel.hpp"
#include "polywave/geometry.hpp"
#include "polywave/spectral.hpp"

namespace polywave {

/// Smallest t at which the Weyl-law estimate of the heat trace beyond the
/// trusted modes, about 2 exp(-t Lambda^2) relative to the kernel, stays below
/// `relative_tail` (Lambda = largest trusted frequency).
double min_trusted_time(const SpectralBasis& basis, double relative_tail = 1e-8);

/// sum_j exp(-t lambda_j^2) phi_j(x) phi_j(y) over the trusted modes, x and y
/// mesh vertices. Throws InputError (with the minimal admissible t) when t is
/// below min_trusted_time.
double spectral_heat(const SpectralBasis& basis, double t, Eigen::Index x, Eigen::Index y);
/// P(t, x, .) at every vertex.
Eigen::VectorXd spectral_heat_row(const SpectralBasis& basis, double t, Eigen::Index x);

/// Intrinsic distances from vertex x on the doubled surface. Exact for convex
/// polygons without holes (straight segments, one seam crossing between
/// sheets); otherwise shortest paths along mesh edges, which overestimate.
std::vector<double> surface_distances(const SurfaceMesh& mesh, const PolygonSpec& base, Eigen::Index x,
                                      const std::vector<Eigen::Index>& targets, bool* exact = nullptr);

struct GaussianBoundRow {
    Eigen::Index x = 0, y = 0;
    double t = 0.0;
    double distance = 0.0;
    double kernel = 0.0;
    double ratio = 0.0; ///< kernel / (max(1/t, 1) exp(-b d^2 / t))
};

struct GaussianBoundReport {
    double b = 0.0;
    double c_emp = 0.0; ///< largest ratio over the sample set
    bool exact_distances = true;
    std::vector<GaussianBoundRow> rows;
};

/// Empirical constant in P(t, x, y) <= C max(1/t, 1) exp(-b d(x, y)^2 / t) over
/// all pairs of sample vertices (x = y included) and the given times.
GaussianBoundReport gaussian_bound_check(const SpectralBasis& basis, const SurfaceMesh& mesh, const PolygonSpec& base,
                                         const std::vector<Eigen::Index>& points, const std::vector<double>& times,
                                         double b);

struct HeatComparisonRow {
    double rho = 0.0;
    double r = 0.0;
    double t = 0.0;
    double cone_value = 0.0;
    double spectral_value = 0.0;
    double abs_dev = 0.0;
    double rel_dev = 0.0;
    Eigen::Index vertex = 0;
};

/// Sheet-0 vertex nearest to a point of the base polygon.
Eigen::Index nearest_vertex(const SurfaceMesh& mesh, Point2 target);

/// Spectral diagonal kernel at a vertex against the cone kernel of radius rho at distance r.
HeatComparisonRow compare_at_vertex(const SpectralBasis& basis, Eigen::Index vertex, const ConeParams& cone, double r,
                                    double t, PointMassRule rule);

/// Diagonal comparison near cone point `cone_index` of the surface: for each
/// radius, the vertex nearest the interior bisector at that distance (its
/// actual distance is used), against the cone kernel at each time. Throws
/// InputError if a radius leaves half the distance to the other cone points.
std::vector<HeatComparisonRow> cheeger_compare(const SpectralBasis& basis, const SurfaceMesh& mesh,
                                               const SurfaceSpec& spec, std::size_t cone_index,
                                               const std::vector<double>& radii, const std::vector<double>& times,
                                               PointMassRule rule = PointMassRule::averaged);

/// rho, r, t, cone_value, spectral_value, abs_dev, rel_dev
void write_heat_csv(std::ostream& out, const std::vector<HeatComparisonRow>& rows);

} // namespace polywave
