#include "polywave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "polywave/delaunay.hpp"

namespace polywave {

void MeshParams::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw InputError("mesh: h must be positive");
    if (grade && !(*grade > 0.0 && *grade <= 1.0)) throw InputError("mesh: grade must lie in (0, 1]");
    if (!(min_angle >= 10.0 && min_angle <= 30.0)) throw InputError("mesh: min_angle must lie in [10, 30] degrees");
    if (max_vertices < 3) throw InputError("mesh: vertex budget too small");
}

double MeshParams::grade_for(const SurfaceSpec& spec) const {
    if (grade) return *grade;
    return std::clamp(1.0 / spec.max_rho(), 0.5, 1.0);
}

double SurfaceMesh::chart_orient(std::size_t t) const {
    const auto& tri = triangles[t];
    const int c = triangle_sheet[t];
    return orient(chart_position(tri[0], c), chart_position(tri[1], c), chart_position(tri[2], c));
}

void SurfaceMesh::rebuild_derived() {
    const std::size_t n = vertices.size();
    sheet.assign(n, 0);
    for (std::uint32_t v = 0; v < n; ++v)
        if (involution[v] < v) sheet[v] = 1;
    triangle_sheet.resize(triangles.size());
    total_area = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        const double o = orient(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
        triangle_sheet[t] = o > 0.0 ? 0 : 1;
        total_area += 0.5 * std::abs(o);
    }
    // Seam edges bound exactly one sheet-0 triangle. An interior chord between two seam
    // vertices (next to a corner) bounds two, and its mirror is a distinct edge with the
    // same endpoints.
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> count;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        if (triangle_sheet[t] != 0) continue;
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t a = triangles[t][k], b = triangles[t][(k + 1) % 3];
            if (on_seam(a) && on_seam(b)) ++count[{std::min(a, b), std::max(a, b)}];
        }
    }
    boundary_edge_ids.clear();
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        if (triangle_sheet[t] != 0) continue;
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t a = triangles[t][k], b = triangles[t][(k + 1) % 3];
            if (on_seam(a) && on_seam(b) && count[{std::min(a, b), std::max(a, b)}] == 1)
                boundary_edge_ids.push_back({a, b});
        }
    }
    std::sort(boundary_edge_ids.begin(), boundary_edge_ids.end());
}

void SurfaceMesh::check() const {
    const std::size_t n = vertices.size();
    if (involution.size() != n || sheet.size() != n) throw NumericalError("mesh", "inconsistent vertex arrays");
    for (std::uint32_t v = 0; v < n; ++v) {
        if (involution[v] >= n || involution[involution[v]] != v)
            throw NumericalError("mesh", "involution is not an order-2 permutation");
    }
    std::map<std::array<std::uint32_t, 3>, std::size_t> index;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        auto key = triangles[t];
        std::sort(key.begin(), key.end());
        index[key] = t;
        if (!(chart_orient(t) > 0.0)) {
            std::ostringstream msg;
            msg << "triangle " << t << " is not positively oriented";
            throw NumericalError("mesh", msg.str());
        }
    }
    for (const auto& tri : triangles) {
        std::array<std::uint32_t, 3> img{involution[tri[0]], involution[tri[1]], involution[tri[2]]};
        std::sort(img.begin(), img.end());
        if (!index.count(img)) throw NumericalError("mesh", "involution does not map triangles to triangles");
    }
    for (std::uint32_t c : cone_vertex_ids)
        if (c >= n || involution[c] != c) throw NumericalError("mesh", "cone vertex off the seam");
}

SurfaceMesh triangulate(const SurfaceSpec& spec, const MeshParams& params) {
    params.validate();
    validate(spec.base);
    const double h = params.h;
    const double grade = params.grade_for(spec);

    double diam = 0.0;
    for (Point2 a : spec.base.outer)
        for (Point2 b : spec.base.outer) diam = std::max(diam, distance(a, b));
    std::vector<Point2> reentrant;
    for (const auto& c : spec.cone_points)
        if (c.rho > 1.0) reentrant.push_back(c.location);

    RefinementOptions opt;
    if (grade < 1.0 && !reentrant.empty()) {
        const double floor_ratio = std::pow(h / diam, 1.0 / grade);
        opt.size = [=](Point2 p) {
            double r = std::numeric_limits<double>::infinity();
            for (Point2 c : reentrant) r = std::min(r, distance(p, c));
            return h * std::pow(std::max(r / diam, floor_ratio), 1.0 - grade);
        };
    } else {
        opt.size = [h](Point2) { return h; };
    }
    opt.lattice_spacing = params.lattice_seed ? h : 0.0;
    opt.min_angle_deg = params.min_angle;
    opt.max_vertices = params.max_vertices;
    opt.seed = params.seed;
    const PlanarMesh base = refine_polygon(spec.base, opt);

    SurfaceMesh mesh;
    const auto n0 = static_cast<std::uint32_t>(base.points.size());
    mesh.vertices = base.points;
    mesh.involution.resize(n0);
    std::vector<std::uint32_t> mirror(n0);
    for (std::uint32_t v = 0; v < n0; ++v) {
        if (base.on_boundary[v]) {
            mirror[v] = v;
        } else {
            mirror[v] = static_cast<std::uint32_t>(mesh.vertices.size());
            mesh.vertices.push_back(base.points[v]);
        }
        mesh.involution[v] = mirror[v];
    }
    mesh.involution.resize(mesh.vertices.size());
    for (std::uint32_t v = 0; v < n0; ++v) mesh.involution[mirror[v]] = v;

    mesh.triangles = base.triangles;
    for (const auto& t : base.triangles) mesh.triangles.push_back({mirror[t[2]], mirror[t[1]], mirror[t[0]]});

    mesh.cone_vertex_ids.assign(spec.base.vertex_count(), 0);
    std::size_t found = 0;
    for (std::uint32_t v = 0; v < n0; ++v) {
        if (base.corner[v] >= 0) {
            mesh.cone_vertex_ids[static_cast<std::size_t>(base.corner[v])] = v;
            ++found;
        }
    }
    if (found != spec.base.vertex_count()) throw NumericalError("mesh", "polygon corners missing from the mesh");
    mesh.rebuild_derived();
    mesh.check();
    return mesh;
}

std::array<std::array<double, 3>, 3> element_stiffness(Point2 a, Point2 b, Point2 c) {
    // Edge vectors opposite each vertex; K_ij = (e_i . e_j) / (4 |T|).
    const std::array<Point2, 3> e{c - b, a - c, b - a};
    const double area = 0.5 * std::abs(orient(a, b, c));
    std::array<std::array<double, 3>, 3> k{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k[i][j] = dot(e[i], e[j]) / (4.0 * area);
    return k;
}

DiscreteOperators assemble(const SurfaceMesh& mesh, bool dirichlet_at_cones) {
    const std::size_t n = mesh.vertex_count();
    DiscreteOperators ops;
    ops.dirichlet_at_cones = dirichlet_at_cones;
    ops.dof_of_vertex.assign(n, 0);
    if (dirichlet_at_cones)
        for (std::uint32_t c : mesh.cone_vertex_ids) ops.dof_of_vertex[c] = -1;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (ops.dof_of_vertex[v] < 0) continue;
        ops.dof_of_vertex[v] = static_cast<std::int64_t>(ops.vertex_of_dof.size());
        ops.vertex_of_dof.push_back(v);
    }
    const auto dofs = static_cast<Eigen::Index>(ops.vertex_of_dof.size());

    std::vector<Eigen::Triplet<double>> kt, mt;
    kt.reserve(mesh.triangles.size() * 9);
    mt.reserve(mesh.triangles.size() * 9);
    // Each sheet-0 element is scattered to itself and to its mirror image, so both
    // sheets receive bit-identical contributions in the same order.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& tri : mesh.triangles) {
            const Point2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
            const double o = orient(a, b, c);
            if (o < 0.0) continue; // sheet-1 elements are generated from their mirror
            if (o == 0.0) throw NumericalError("mesh", "degenerate (zero-area) triangle");
            const auto ke = element_stiffness(a, b, c);
            const double area = 0.5 * o;
            std::array<std::int64_t, 3> d{};
            for (int i = 0; i < 3; ++i) {
                const std::uint32_t v = pass == 0 ? tri[i] : mesh.involution[tri[i]];
                d[i] = ops.dof_of_vertex[v];
            }
            for (int i = 0; i < 3; ++i) {
                if (d[i] < 0) continue;
                for (int j = 0; j < 3; ++j) {
                    if (d[j] < 0) continue;
                    const auto r = static_cast<int>(d[i]), s = static_cast<int>(d[j]);
                    kt.emplace_back(r, s, ke[i][j]);
                    mt.emplace_back(r, s, area / 12.0 * (i == j ? 2.0 : 1.0));
                }
            }
        }
    }
    ops.stiffness.resize(dofs, dofs);
    ops.mass.resize(dofs, dofs);
    ops.stiffness.setFromTriplets(kt.begin(), kt.end());
    ops.mass.setFromTriplets(mt.begin(), mt.end());
    ops.stiffness.makeCompressed();
    ops.mass.makeCompressed();
    return ops;
}

ParityBlock parity_block(const SurfaceMesh& mesh, const DiscreteOperators& ops, Parity parity) {
    const double s = std::sqrt(0.5);
    std::vector<Eigen::Triplet<double>> pt;
    int col = 0;
    for (std::uint32_t v = 0; v < mesh.vertex_count(); ++v) {
        const std::uint32_t w = mesh.involution[v];
        if (w == v) {
            if (parity == Parity::even && ops.dof_of_vertex[v] >= 0)
                pt.emplace_back(static_cast<int>(ops.dof_of_vertex[v]), col++, 1.0);
            continue;
        }
        if (w < v) continue;
        pt.emplace_back(static_cast<int>(ops.dof_of_vertex[v]), col, s);
        pt.emplace_back(static_cast<int>(ops.dof_of_vertex[w]), col, parity == Parity::odd ? -s : s);
        ++col;
    }
    ParityBlock block;
    block.parity = parity;
    block.prolong.resize(ops.size(), col);
    block.prolong.setFromTriplets(pt.begin(), pt.end());
    const SparseMatrix pt_mat = block.prolong.transpose();
    block.stiffness = pt_mat * ops.stiffness * block.prolong;
    block.mass = pt_mat * ops.mass * block.prolong;
    // Symmetrize away the rounding of the triple products.
    const SparseMatrix kt_mat = block.stiffness.transpose(), mt_mat = block.mass.transpose();
    block.stiffness = 0.5 * (block.stiffness + kt_mat);
    block.mass = 0.5 * (block.mass + mt_mat);
    block.stiffness.makeCompressed();
    block.mass.makeCompressed();
    return block;
}

std::vector<std::complex<double>> parity_split(const SurfaceMesh& mesh, const std::vector<std::complex<double>>& field,
                                               Parity parity) {
    if (mesh.involution.size() != mesh.vertex_count() || mesh.involution.empty())
        throw InputError("parity_split: mesh carries no involution");
    if (field.size() != mesh.vertex_count()) throw InputError("parity_split: field size does not match the mesh");
    std::vector<std::complex<double>> out(field.size());
    const double sign = parity == Parity::even ? 1.0 : -1.0;
    for (std::size_t v = 0; v < field.size(); ++v) out[v] = 0.5 * (field[v] + sign * field[mesh.involution[v]]);
    return out;
}

MeshStats mesh_stats(const SurfaceMesh& mesh) {
    MeshStats st;
    st.vertices = mesh.vertex_count();
    st.triangles = mesh.triangles.size();
    for (std::uint32_t v = 0; v < st.vertices; ++v) st.seam_vertices += mesh.on_seam(v);
    st.min_angle_deg = 180.0;
    st.min_edge = std::numeric_limits<double>::infinity();
    for (const auto& t : mesh.triangles) {
        const Point2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
        st.min_angle_deg = std::min(st.min_angle_deg, min_angle_deg(a, b, c));
        for (double l : {distance(a, b), distance(b, c), distance(c, a)}) {
            st.max_edge = std::max(st.max_edge, l);
            st.min_edge = std::min(st.min_edge, l);
        }
    }
    st.total_area = mesh.total_area;
    return st;
}

} // namespace polywave
