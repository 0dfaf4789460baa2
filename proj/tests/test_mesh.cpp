#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "polywave/mesh.hpp"
#include "support.hpp"

using namespace polywave;

namespace {

SurfaceMesh square_mesh(double h) {
    MeshParams mp;
    mp.h = h;
    mp.grade = 1.0;
    return triangulate(double_polygon(parse_polygon(test::kSquare)), mp);
}

double smallest_angle_deg(const SurfaceMesh& m) {
    double worst = 180.0;
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            const Point2 a = m.vertices[t[k]], b = m.vertices[t[(k + 1) % 3]], c = m.vertices[t[(k + 2) % 3]];
            const Point2 u = b - a, v = c - a;
            worst = std::min(worst, std::acos(dot(u, v) / (norm(u) * norm(v))) * 180.0 / M_PI);
        }
    return worst;
}

} // namespace

TEST(MeshParams, Validation) {
    MeshParams p;
    p.h = 0.0;
    EXPECT_THROW(p.validate(), InputError);
    p = {};
    p.grade = 1.5;
    EXPECT_THROW(p.validate(), InputError);
    p = {};
    p.min_angle = 35.0;
    EXPECT_THROW(p.validate(), InputError);
    p = {};
    EXPECT_NO_THROW(p.validate());
}

TEST(MeshParams, DefaultGradeFromConeRadii) {
    MeshParams p;
    EXPECT_DOUBLE_EQ(p.grade_for(double_polygon(parse_polygon(test::kSquare))), 1.0);
    EXPECT_NEAR(p.grade_for(double_polygon(parse_polygon(test::kLShape))), 2.0 / 3.0, 1e-15);
}

TEST(Triangulate, UnitSquareTriangleCount) {
    const SurfaceMesh m = square_mesh(0.1);
    const double nominal = 2.0 * 2.0 / (0.1 * 0.1);
    EXPECT_GE(m.triangles.size(), 0.5 * nominal);
    EXPECT_LE(m.triangles.size(), 2.0 * nominal);
}

TEST(Triangulate, RespectsMinimumAngle) {
    for (const char* text : {test::kSquare, test::kLShape, test::kHoled}) {
        MeshParams mp;
        mp.h = 0.08;
        const SurfaceMesh m = triangulate(double_polygon(parse_polygon(text)), mp);
        EXPECT_GE(smallest_angle_deg(m), mp.min_angle - 1e-9) << text;
    }
}

TEST(Triangulate, InvolutionIsOrderTwoAndMapsTriangles) {
    MeshParams mp;
    mp.h = 0.1;
    const SurfaceMesh m = triangulate(double_polygon(parse_polygon(test::kLShape)), mp);
    EXPECT_NO_THROW(m.check());
    std::set<std::array<std::uint32_t, 3>> tris;
    for (auto t : m.triangles) {
        std::sort(t.begin(), t.end());
        tris.insert(t);
    }
    for (std::size_t v = 0; v < m.vertex_count(); ++v) EXPECT_EQ(m.involution[m.involution[v]], v);
    for (const auto& t : m.triangles) {
        std::array<std::uint32_t, 3> s{m.involution[t[0]], m.involution[t[1]], m.involution[t[2]]};
        std::sort(s.begin(), s.end());
        EXPECT_TRUE(tris.count(s));
    }
    for (auto id : m.cone_vertex_ids) EXPECT_TRUE(m.on_seam(id));
}

TEST(Triangulate, TrianglesPositivelyOrientedInTheirCharts) {
    MeshParams mp;
    mp.h = 0.1;
    const SurfaceMesh m = triangulate(double_polygon(parse_polygon(test::kHoled)), mp);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) EXPECT_GT(m.chart_orient(t), 0.0);
}

TEST(Triangulate, GradesTowardReentrantCorner) {
    MeshParams mp;
    mp.h = 0.1;
    const SurfaceMesh m = triangulate(double_polygon(parse_polygon(test::kLShape)), mp);
    // Longest edge touching the re-entrant vertex (1, 1) against a convex corner.
    auto longest_at = [&](Point2 p) {
        double best = 0.0;
        for (const auto& t : m.triangles)
            for (int k = 0; k < 3; ++k)
                if (m.vertices[t[k]] == p)
                    for (int l = 1; l < 3; ++l) best = std::max(best, distance(p, m.vertices[t[(k + l) % 3]]));
        return best;
    };
    EXPECT_LT(longest_at({1, 1}), 0.5 * longest_at({2, 0}));
}

TEST(Triangulate, VertexBudget) {
    MeshParams mp;
    mp.h = 0.01;
    mp.max_vertices = 500;
    EXPECT_THROW(triangulate(double_polygon(parse_polygon(test::kSquare)), mp), InputError);
}

TEST(Assemble, ReferenceElementStiffness) {
    const auto k = element_stiffness({0, 0}, {1, 0}, {0, 1});
    const double expect[3][3] = {{1, -0.5, -0.5}, {-0.5, 0.5, 0}, {-0.5, 0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(k[i][j], expect[i][j], 1e-15);
}

TEST(Assemble, ConstantsAreHarmonicAndMassIntegratesOne) {
    for (const char* text : {test::kSquare, test::kLShape, test::kHoled}) {
        MeshParams mp;
        mp.h = 0.1;
        const SurfaceSpec s = double_polygon(parse_polygon(text));
        const SurfaceMesh m = triangulate(s, mp);
        const DiscreteOperators ops = assemble(m);
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(ops.size());
        EXPECT_LE((ops.stiffness * one).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(one.dot(ops.mass * one), s.total_area, 1e-10 * s.total_area);
    }
}

TEST(Assemble, ExactSymmetryAndNonnegativity) {
    const SurfaceMesh m = square_mesh(0.1);
    const DiscreteOperators ops = assemble(m);
    const SparseMatrix kt = ops.stiffness.transpose(), mt = ops.mass.transpose();
    EXPECT_EQ((SparseMatrix(ops.stiffness - kt)).norm(), 0.0);
    EXPECT_EQ((SparseMatrix(ops.mass - mt)).norm(), 0.0);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int i = 0; i < 1000; ++i) {
        Eigen::VectorXd x(ops.size());
        for (auto& v : x) v = g(rng);
        EXPECT_GE(x.dot(ops.stiffness * x), -1e-12 * x.squaredNorm());
        EXPECT_GT(x.dot(ops.mass * x), 0.0);
    }
}

TEST(Assemble, MirrorSymmetry) {
    MeshParams mp;
    mp.h = 0.1;
    const SurfaceMesh m = triangulate(double_polygon(parse_polygon(test::kLShape)), mp);
    const DiscreteOperators ops = assemble(m);
    const Eigen::Index n = ops.size();
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p(n);
    for (Eigen::Index v = 0; v < n; ++v) p.indices()[v] = static_cast<int>(m.involution[v]);
    const SparseMatrix permuted = p * ops.stiffness * p.transpose();
    const SparseMatrix diff = permuted - ops.stiffness;
    EXPECT_LE(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(diff.valuePtr(), diff.nonZeros())).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Assemble, DirichletAtConesEliminatesConeVertices) {
    const SurfaceMesh m = square_mesh(0.1);
    const DiscreteOperators full = assemble(m), cut = assemble(m, true);
    EXPECT_EQ(cut.size(), full.size() - static_cast<Eigen::Index>(m.cone_vertex_ids.size()));
    for (auto id : m.cone_vertex_ids) EXPECT_EQ(cut.dof_of_vertex[id], -1);
    EXPECT_TRUE(cut.dirichlet_at_cones);
}

TEST(ParityBlocks, DimensionsAddUp) {
    const SurfaceMesh m = square_mesh(0.1);
    const DiscreteOperators ops = assemble(m);
    const ParityBlock odd = parity_block(m, ops, Parity::odd), even = parity_block(m, ops, Parity::even);
    EXPECT_EQ(odd.stiffness.rows() + even.stiffness.rows(), ops.size());
    const SparseMatrix gram = SparseMatrix(odd.prolong.transpose()) * odd.prolong;
    const Eigen::MatrixXd dense = Eigen::MatrixXd(gram);
    EXPECT_LE((dense - Eigen::MatrixXd::Identity(dense.rows(), dense.cols())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MeshCache, RoundTripAndMagic) {
    const SurfaceMesh m = square_mesh(0.2);
    const auto path = std::filesystem::temp_directory_path() / "polywave_mesh_roundtrip.bin";
    save_mesh(m, path.string());
    std::ifstream in(path, std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    EXPECT_EQ(std::string(magic, 8), "ESCSMESH");
    const SurfaceMesh r = load_mesh(path.string());
    EXPECT_EQ(r.vertices, m.vertices);
    EXPECT_EQ(r.triangles, m.triangles);
    EXPECT_EQ(r.involution, m.involution);
    EXPECT_EQ(r.cone_vertex_ids, m.cone_vertex_ids);
    EXPECT_EQ(file_hash(path.string()), file_hash(path.string()));
    std::filesystem::remove(path);
}

TEST(MeshStats, CountsMatchMesh) {
    const SurfaceMesh m = square_mesh(0.1);
    const MeshStats s = mesh_stats(m);
    EXPECT_EQ(s.vertices, m.vertex_count());
    EXPECT_EQ(s.triangles, m.triangles.size());
    EXPECT_NEAR(s.total_area, 2.0, 1e-12);
    EXPECT_GT(s.seam_vertices, 0u);
}
