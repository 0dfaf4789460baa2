#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "polywave/spectral.hpp"

namespace polywave::test {

inline constexpr const char* kSquare = "name square\nouter 4\n0 0\n1 0\n1 1\n0 1\n";
inline constexpr const char* kLShape = "name lshape\nouter 6\n0 0\n2 0\n2 1\n1 1\n1 2\n0 2\n";
inline constexpr const char* kHoled =
    "name frame\nouter 4\n0 0\n3 0\n3 3\n0 3\nhole 4\n1 1\n1 2\n2 2\n2 1\n";

/// Doubled unit square with a trusted basis, built once per test binary.
struct SquareFixture {
    SurfaceSpec spec;
    SurfaceMesh mesh;
    DiscreteOperators ops;
    SpectralBasis basis;
};

inline SquareFixture make_square(double h, int count, BasisParity parity = BasisParity::split) {
    SquareFixture f;
    f.spec = double_polygon(parse_polygon(kSquare));
    MeshParams mp;
    mp.h = h;
    f.mesh = triangulate(f.spec, mp);
    f.ops = assemble(f.mesh);
    EigenbasisOptions eo;
    eo.parity = parity;
    f.basis = eigenbasis(f.mesh, f.ops, count, eo);
    MeshParams mc;
    mc.h = h * std::sqrt(2.0);
    const SurfaceMesh coarse = triangulate(f.spec, mc);
    mark_trusted(f.basis, eigenbasis(coarse, assemble(coarse), count, eo), mp.h, mc.h);
    return f;
}

inline const SquareFixture& square() {
    static const SquareFixture f = make_square(0.04, 120);
    return f;
}

/// Sorted eigenvalues pi^2 (m^2 + n^2) of the unit square, m, n >= first.
inline std::vector<double> square_eigenvalues(int first, std::size_t count) {
    std::vector<double> v;
    for (int m = first; m < 40; ++m)
        for (int n = first; n < 40; ++n) v.push_back(M_PI * M_PI * (m * m + n * n));
    std::sort(v.begin(), v.end());
    v.resize(count);
    return v;
}

inline Eigen::VectorXcd random_coeffs(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXcd c(n);
    for (Eigen::Index j = 0; j < n; ++j) c[j] = cplx(g(rng), g(rng));
    return c;
}

} // namespace polywave::test
