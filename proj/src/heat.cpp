#include "polywave/heat.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "polywave/csv.hpp"

namespace polywave {

namespace {

using Eigen::Index;

Index trusted(const SpectralBasis& basis) {
    if (basis.trusted_count == 0) throw InputError("basis has no trusted modes");
    return static_cast<Index>(basis.trusted_count);
}

void check_window(const SpectralBasis& basis, double t) {
    if (!(t > 0.0)) throw InputError("heat kernel needs t > 0");
    const double t_min = min_trusted_time(basis);
    if (t < t_min) {
        std::ostringstream msg;
        msg << "t = " << t << " is too small for the resolved spectrum; minimal admissible t is " << t_min;
        throw InputError(msg.str());
    }
}

/// Shortest seam-crossing path from a to b: min over boundary edges of |a - s| + |s - b|.
double crossing_distance(const PolygonSpec& poly, Point2 a, Point2 b) {
    double best = INFINITY;
    for (auto ring : poly.rings()) {
        const std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 p = ring[i], q = ring[(i + 1) % n];
            const Point2 e = q - p;
            const double len2 = dot(e, e);
            // Reflect b across the edge line; the optimum is where a -> b' meets the line.
            const Point2 foot = p + (dot(b - p, e) / len2) * e;
            const Point2 bref = 2.0 * foot - b;
            const double da = cross(e, a - p), db = cross(e, bref - p);
            double local = std::min(distance(a, p) + distance(p, b), distance(a, q) + distance(q, b));
            if (da * db <= 0.0 && da != db) {
                const double s = da / (da - db);
                const Point2 x = a + s * (bref - a);
                const double u = dot(x - p, e) / len2;
                if (u >= 0.0 && u <= 1.0) local = std::min(local, distance(a, bref));
            }
            best = std::min(best, local);
        }
    }
    return best;
}

} // namespace

double min_trusted_time(const SpectralBasis& basis, double relative_tail) {
    const double lambda = basis.max_trusted_frequency();
    if (!(lambda > 0.0)) throw InputError("basis has no trusted nonzero frequency");
    return std::log(2.0 / relative_tail) / (lambda * lambda);
}

double spectral_heat(const SpectralBasis& basis, double t, Index x, Index y) {
    check_window(basis, t);
    const Index n = trusted(basis);
    if (x < 0 || y < 0 || x >= basis.vertex_count() || y >= basis.vertex_count())
        throw InputError("vertex index outside the mesh");
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) sum += std::exp(-t * basis.eigenvalues[j]) * (basis.modes(x, j) * basis.modes(y, j));
    return sum;
}

Eigen::VectorXd spectral_heat_row(const SpectralBasis& basis, double t, Index x) {
    check_window(basis, t);
    const Index n = trusted(basis);
    Eigen::VectorXd w(n);
    for (Index j = 0; j < n; ++j) w[j] = std::exp(-t * basis.eigenvalues[j]) * basis.modes(x, j);
    return basis.modes.leftCols(n) * w;
}

std::vector<double> surface_distances(const SurfaceMesh& mesh, const PolygonSpec& base, Index x,
                                      const std::vector<Index>& targets, bool* exact) {
    const bool convex = base.holes.empty() && is_convex(base);
    if (exact) *exact = convex;
    std::vector<double> out;
    out.reserve(targets.size());
    if (convex) {
        const Point2 a = mesh.vertices[x];
        for (Index y : targets) {
            const Point2 b = mesh.vertices[y];
            const bool same = mesh.sheet[x] == mesh.sheet[y] || mesh.on_seam(static_cast<std::uint32_t>(x)) ||
                              mesh.on_seam(static_cast<std::uint32_t>(y));
            out.push_back(same ? distance(a, b) : crossing_distance(base, a, b));
        }
        return out;
    }
    // Graph distance along mesh edges.
    const std::size_t nv = mesh.vertex_count();
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(nv);
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t a = t[k], b = t[(k + 1) % 3];
            const double len = distance(mesh.vertices[a], mesh.vertices[b]);
            adj[a].push_back({b, len});
            adj[b].push_back({a, len});
        }
    std::vector<double> dist(nv, INFINITY);
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[x] = 0.0;
    heap.push({0.0, static_cast<std::uint32_t>(x)});
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (const auto& [w, len] : adj[v])
            if (d + len < dist[w]) {
                dist[w] = d + len;
                heap.push({dist[w], w});
            }
    }
    for (Index y : targets) out.push_back(dist[y]);
    return out;
}

GaussianBoundReport gaussian_bound_check(const SpectralBasis& basis, const SurfaceMesh& mesh, const PolygonSpec& base,
                                         const std::vector<Index>& points, const std::vector<double>& times, double b) {
    if (!(b > 0.0)) throw InputError("Gaussian bound needs b > 0");
    if (points.empty() || times.empty()) throw InputError("Gaussian bound needs sample points and times");
    GaussianBoundReport rep;
    rep.b = b;
    for (double t : times) check_window(basis, t);
    for (Index x : points) {
        bool exact = true;
        const auto d = surface_distances(mesh, base, x, points, &exact);
        rep.exact_distances = rep.exact_distances && exact;
        for (double t : times) {
            const Eigen::VectorXd row = spectral_heat_row(basis, t, x);
            for (std::size_t i = 0; i < points.size(); ++i) {
                GaussianBoundRow r;
                r.x = x;
                r.y = points[i];
                r.t = t;
                r.distance = d[i];
                r.kernel = row[points[i]];
                r.ratio = r.kernel / (std::max(1.0 / t, 1.0) * std::exp(-b * d[i] * d[i] / t));
                rep.c_emp = std::max(rep.c_emp, r.ratio);
                rep.rows.push_back(r);
            }
        }
    }
    return rep;
}

Index nearest_vertex(const SurfaceMesh& mesh, Point2 target) {
    Index best = -1;
    double best_d = INFINITY;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        if (mesh.sheet[v] != 0) continue;
        const double d = distance(mesh.vertices[v], target);
        if (d < best_d) {
            best_d = d;
            best = static_cast<Index>(v);
        }
    }
    if (best < 0) throw InputError("mesh has no vertices");
    return best;
}

HeatComparisonRow compare_at_vertex(const SpectralBasis& basis, Index vertex, const ConeParams& cone, double r, double t,
                                    PointMassRule rule) {
    HeatComparisonRow row;
    row.rho = cone.rho;
    row.r = r;
    row.t = t;
    row.vertex = vertex;
    row.spectral_value = spectral_heat(basis, t, vertex, vertex);
    row.cone_value = cone_diagonal_heat(cone, r, t, rule);
    row.abs_dev = std::abs(row.spectral_value - row.cone_value);
    row.rel_dev = row.abs_dev / std::abs(row.cone_value);
    return row;
}

std::vector<HeatComparisonRow> cheeger_compare(const SpectralBasis& basis, const SurfaceMesh& mesh,
                                               const SurfaceSpec& spec, std::size_t cone_index,
                                               const std::vector<double>& radii, const std::vector<double>& times,
                                               PointMassRule rule) {
    if (cone_index >= spec.cone_points.size()) throw InputError("cone index out of range");
    const ConePoint& cp = spec.cone_points[cone_index];
    double reach = INFINITY;
    for (std::size_t i = 0; i < spec.cone_points.size(); ++i)
        if (i != cone_index) reach = std::min(reach, distance(cp.location, spec.cone_points[i].location));
    const auto ring = spec.base.rings()[cp.ring];
    const std::size_t n = ring.size();
    const Point2 prev = ring[(cp.index + n - 1) % n], next = ring[(cp.index + 1) % n];
    const Point2 u = (1.0 / distance(prev, cp.location)) * (prev - cp.location);
    const Point2 w = (1.0 / distance(next, cp.location)) * (next - cp.location);
    Point2 dir = u + w;
    if (norm(dir) < 1e-12) dir = {-w.y, w.x}; // straight vertex: inward normal
    dir = (1.0 / norm(dir)) * dir;
    if (cp.alpha > M_PI) dir = -1.0 * dir;

    const ConeParams cone{cp.rho};
    std::vector<HeatComparisonRow> rows;
    for (double r : radii) {
        if (!(r > 0.0) || r >= 0.5 * reach) {
            std::ostringstream msg;
            msg << "radius " << r << " leaves the isometric neighbourhood of the cone point (limit " << 0.5 * reach
                << ")";
            throw InputError(msg.str());
        }
        const Index v = nearest_vertex(mesh, cp.location + r * dir);
        const double rv = distance(mesh.vertices[v], cp.location);
        if (rv >= 0.5 * reach) throw InputError("nearest mesh vertex leaves the isometric neighbourhood");
        for (double t : times) rows.push_back(compare_at_vertex(basis, v, cone, rv, t, rule));
    }
    return rows;
}

void write_heat_csv(std::ostream& out, const std::vector<HeatComparisonRow>& rows) {
    CsvWriter w(out, "heat", 1, {"rho", "r", "t", "cone_value", "spectral_value", "abs_dev", "rel_dev"});
    for (const auto& r : rows) w.row({r.rho, r.r, r.t, r.cone_value, r.spectral_value, r.abs_dev, r.rel_dev});
}

} // namespace polywave
