#include "polywave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace polywave {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr char kMagic[8] = {'E', 'S', 'C', 'S', 'B', 'A', 'S', 'E'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv(std::uint64_t h, const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t content_hash(const SurfaceMesh& mesh) {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv(h, mesh.vertices.data(), mesh.vertices.size() * sizeof(Point2));
    h = fnv(h, mesh.triangles.data(), mesh.triangles.size() * sizeof(mesh.triangles[0]));
    h = fnv(h, mesh.involution.data(), mesh.involution.size() * sizeof(std::uint32_t));
    return h;
}

const char* parity_name(BasisParity p) {
    switch (p) {
    case BasisParity::full: return "full";
    case BasisParity::odd: return "odd";
    case BasisParity::even: return "even";
    case BasisParity::split: return "split";
    }
    return "?";
}

/// Relative gap below which neighbouring eigenvalues are treated as one cluster.
constexpr double kClusterGap = 1e-6;

bool same_cluster(double a, double b) { return std::abs(b - a) <= kClusterGap * std::max({std::abs(a), std::abs(b), 1.0}); }

/// Dof vectors of a solve lifted to vertex fields (eliminated vertices are zero).
MatrixXd lift(const DiscreteOperators& ops, const MatrixXd& dof_vectors, Index nvert) {
    if (static_cast<std::size_t>(dof_vectors.rows()) == static_cast<std::size_t>(nvert) && !ops.dirichlet_at_cones)
        return dof_vectors;
    MatrixXd out = MatrixXd::Zero(nvert, dof_vectors.cols());
    for (Index d = 0; d < dof_vectors.rows(); ++d) out.row(ops.vertex_of_dof[d]) = dof_vectors.row(d);
    return out;
}

MatrixXd apply_sigma(const SurfaceMesh& mesh, const MatrixXd& fields) {
    MatrixXd out(fields.rows(), fields.cols());
    for (Index v = 0; v < fields.rows(); ++v) out.row(v) = fields.row(mesh.involution[v]);
    return out;
}

/// Rotates each cluster of (numerically) degenerate modes onto eigenvectors of
/// sigma and records the parity. Modes of different parity inside a cluster
/// come out of the solver as arbitrary mixtures.
void adapt_to_symmetry(const SurfaceMesh& mesh, const SparseMatrix& mass, const VectorXd& mu, MatrixXd& modes,
                       std::vector<std::int8_t>& parity) {
    const Index c = modes.cols();
    parity.assign(c, 0);
    Index start = 0;
    while (start < c) {
        Index end = start + 1;
        while (end < c && same_cluster(mu[end - 1], mu[end])) ++end;
        const Index w = end - start;
        const MatrixXd block = modes.middleCols(start, w);
        const MatrixXd S0 = block.transpose() * (mass * apply_sigma(mesh, block));
        const MatrixXd S = 0.5 * (S0 + S0.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
        if (w > 1) modes.middleCols(start, w) = block * es.eigenvectors();
        for (Index j = 0; j < w; ++j) parity[start + j] = es.eigenvalues()[j] >= 0.0 ? 1 : -1;
        start = end;
    }
}

struct Solved {
    VectorXd mu;
    MatrixXd vectors; ///< full dof space
    VectorXd residuals;
};

Solved solve_block(const SurfaceMesh& mesh, const DiscreteOperators& ops, Parity parity, int count,
                   const EigenbasisOptions& opt) {
    const ParityBlock pb = parity_block(mesh, ops, parity);
    if (count > pb.stiffness.rows()) {
        std::ostringstream msg;
        msg << "eigenbasis: requested " << count << " modes but the " << (parity == Parity::odd ? "odd" : "even")
            << " subspace has dimension " << pb.stiffness.rows();
        throw InputError(msg.str());
    }
    const EigenPairs ep = lowest_eigenpairs(pb.stiffness, pb.mass, count, opt.lanczos);
    if (opt.verify_inertia) {
        const double last = ep.values[count - 1];
        const double below = last - 1e-9 * std::max(last, 1.0);
        if (below > 0.0) {
            const int expected = static_cast<int>((ep.values.array() < below).count());
            const int actual = count_below(pb.stiffness, pb.mass, below);
            if (actual != expected) {
                std::ostringstream msg;
                msg << "inertia check failed: " << actual << " eigenvalues below " << below << " but " << expected
                    << " computed";
                throw NumericalError("spectral", msg.str());
            }
        }
    }
    return {ep.values, pb.prolong * ep.vectors, ep.residuals};
}

void check_invariants(const SpectralBasis& b) {
    for (Index j = 0; j < b.count(); ++j) {
        if (!(b.residuals[j] <= 1e-8)) {
            std::ostringstream msg;
            msg << "mode " << j << " has relative residual " << b.residuals[j];
            throw NumericalError("spectral", msg.str());
        }
        if (j > 0 && b.frequencies[j] < b.frequencies[j - 1])
            throw NumericalError("spectral", "frequencies are not sorted");
    }
    const MatrixXd gram = b.modes.transpose() * (b.mass * b.modes);
    const double dev = (gram - MatrixXd::Identity(b.count(), b.count())).cwiseAbs().maxCoeff();
    if (!(dev <= 1e-10)) {
        std::ostringstream msg;
        msg << "modes are not mass-orthonormal (max deviation " << dev << ")";
        throw NumericalError("spectral", msg.str());
    }
}

void check_state(const SpectralBasis& basis, const SpectralState& state) {
    if (state.coeffs.size() != basis.count())
        throw InputError("state has " + std::to_string(state.coeffs.size()) + " coefficients, basis has " +
                         std::to_string(basis.count()));
    if (!state.basis_ref.empty() && state.basis_ref != basis.provenance())
        throw InputError("state belongs to basis " + state.basis_ref + ", not " + basis.provenance());
}

/// Phi^T M f for a complex vertex field, without forming complex copies of Phi.
Eigen::VectorXcd project(const SpectralBasis& basis, const Eigen::VectorXcd& field) {
    const VectorXd mr = basis.mass * field.real(), mi = basis.mass * field.imag();
    Eigen::VectorXcd out(basis.count());
    out.real() = basis.modes.transpose() * mr;
    out.imag() = basis.modes.transpose() * mi;
    return out;
}

} // namespace

double SpectralBasis::max_trusted_frequency() const {
    return trusted_count == 0 ? 0.0 : frequencies[static_cast<Index>(trusted_count) - 1];
}

std::string SpectralBasis::provenance() const {
    std::ostringstream s;
    s << "mesh=" << std::hex << std::setw(16) << std::setfill('0') << mesh_hash << std::dec
      << ";bc=" << (dirichlet_at_cones ? "cones" : "free") << ";parity=" << parity_name(kind) << ";count=" << count();
    return s.str();
}

SpectralBasis eigenbasis(const SurfaceMesh& mesh, const DiscreteOperators& ops, int count,
                         const EigenbasisOptions& opt) {
    if (count <= 0) throw InputError("eigenbasis: count must be positive");
    const Index nvert = static_cast<Index>(mesh.vertex_count());
    SpectralBasis b;
    b.kind = opt.parity;
    b.dirichlet_at_cones = ops.dirichlet_at_cones;
    b.mesh_hash = content_hash(mesh);
    b.mass = ops.dirichlet_at_cones ? assemble(mesh, false).mass : ops.mass;

    VectorXd mu;
    MatrixXd vectors;
    switch (opt.parity) {
    case BasisParity::full: {
        const EigenPairs ep = lowest_eigenpairs(ops.stiffness, ops.mass, count, opt.lanczos);
        mu = ep.values;
        vectors = ep.vectors;
        b.residuals = ep.residuals;
        if (opt.verify_inertia) {
            const double last = mu[count - 1];
            const double below = last - 1e-9 * std::max(last, 1.0);
            if (below > 0.0) {
                const int expected = static_cast<int>((mu.array() < below).count());
                const int actual = count_below(ops.stiffness, ops.mass, below);
                if (actual != expected)
                    throw NumericalError("spectral", "inertia check failed: " + std::to_string(actual) +
                                                         " eigenvalues below the last computed one, " +
                                                         std::to_string(expected) + " computed");
            }
        }
        break;
    }
    case BasisParity::odd:
    case BasisParity::even: {
        const Parity p = opt.parity == BasisParity::odd ? Parity::odd : Parity::even;
        Solved s = solve_block(mesh, ops, p, count, opt);
        mu = s.mu;
        vectors = std::move(s.vectors);
        b.residuals = s.residuals;
        b.parity.assign(count, p == Parity::odd ? -1 : 1);
        break;
    }
    case BasisParity::split: {
        // Solve both subspaces with a margin, then grow whichever one runs out
        // before the merged list reaches `count` modes.
        int want[2] = {count / 2 + std::max(16, count / 10), count / 2 + std::max(16, count / 10)};
        Solved s[2];
        const ParityBlock probe_odd = parity_block(mesh, ops, Parity::odd);
        const int dim[2] = {static_cast<int>(probe_odd.stiffness.rows()),
                            static_cast<int>(ops.size() - probe_odd.stiffness.rows())};
        if (count > dim[0] + dim[1]) throw InputError("eigenbasis: count exceeds the problem dimension");
        bool solved[2] = {false, false};
        for (int round = 0; round < 8; ++round) {
            for (int i = 0; i < 2; ++i) {
                want[i] = std::min(want[i], dim[i]);
                if (!solved[i] || s[i].mu.size() < want[i]) {
                    s[i] = solve_block(mesh, ops, i == 0 ? Parity::odd : Parity::even, want[i], opt);
                    solved[i] = true;
                }
            }
            // The merged prefix is complete up to the smaller of the two block maxima.
            const double cap0 = s[0].mu.size() == dim[0] ? INFINITY : s[0].mu[s[0].mu.size() - 1];
            const double cap1 = s[1].mu.size() == dim[1] ? INFINITY : s[1].mu[s[1].mu.size() - 1];
            const double cap = std::min(cap0, cap1);
            const int usable = static_cast<int>((s[0].mu.array() <= cap).count() + (s[1].mu.array() <= cap).count());
            if (usable >= count) break;
            if (round == 7) throw NumericalError("spectral", "split solve could not cover the requested count");
            const int grow = std::max(16, (count - usable) + count / 10);
            if (cap0 <= cap1) want[0] += grow;
            if (cap1 <= cap0) want[1] += grow;
        }
        std::vector<std::pair<double, std::pair<int, Index>>> order;
        for (int i = 0; i < 2; ++i)
            for (Index j = 0; j < s[i].mu.size(); ++j) order.push_back({s[i].mu[j], {i, j}});
        std::stable_sort(order.begin(), order.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        mu.resize(count);
        vectors.resize(ops.size(), count);
        b.residuals.resize(count);
        b.parity.resize(count);
        for (int j = 0; j < count; ++j) {
            const auto [i, col] = order[j].second;
            mu[j] = order[j].first;
            vectors.col(j) = s[i].vectors.col(col);
            b.residuals[j] = s[i].residuals[col];
            b.parity[j] = i == 0 ? -1 : 1;
        }
        break;
    }
    }

    b.eigenvalues = mu;
    b.frequencies = mu.array().max(0.0).sqrt();
    b.modes = lift(ops, vectors, nvert);
    if (opt.parity == BasisParity::full) adapt_to_symmetry(mesh, b.mass, mu, b.modes, b.parity);
    b.trusted_count = static_cast<std::size_t>(count);
    check_invariants(b);
    return b;
}

std::vector<double> frequency_error_estimate(const SpectralBasis& fine, const SpectralBasis& coarse, double h_fine,
                                             double h_coarse) {
    if (!(h_coarse > h_fine && h_fine > 0.0)) throw InputError("trust marking needs h_coarse > h_fine > 0");
    const double factor = (h_coarse / h_fine) * (h_coarse / h_fine) - 1.0;
    const Index n = std::min(fine.count(), coarse.count());
    std::vector<double> err(n);
    if (n == 0) return err;
    // Constant modes come out of the shift-invert solve at roundoff level, not exactly zero.
    const double zero = 1e-4 * std::max(fine.frequencies[n - 1], coarse.frequencies[n - 1]);
    for (Index j = 0; j < n; ++j) {
        const double lf = fine.frequencies[j], lc = coarse.frequencies[j];
        const double diff = std::abs(lc - lf) / factor;
        if (lf < zero || lc < zero) err[j] = lf < zero && lc < zero ? 0.0 : INFINITY;
        else err[j] = diff / lf;
    }
    return err;
}

void mark_trusted(SpectralBasis& fine, const SpectralBasis& coarse, double h_fine, double h_coarse, double tolerance) {
    const auto err = frequency_error_estimate(fine, coarse, h_fine, h_coarse);
    std::size_t n = 0;
    while (n < err.size() && err[n] < tolerance) ++n;
    // Either list may cut a degenerate cluster; drop the cluster touching the end.
    const Index last = std::min(fine.count(), coarse.count()) - 1;
    const double edge = fine.frequencies[last];
    while (n > 0 && std::abs(fine.frequencies[static_cast<Index>(n) - 1] - edge) <= 1e-3 * edge) --n;
    fine.trusted_count = n;
}

SpectralState make_state(const SpectralBasis& basis, Eigen::VectorXcd coeffs) {
    if (coeffs.size() != basis.count()) throw InputError("coefficient count does not match the basis");
    return {std::move(coeffs), basis.provenance()};
}

SpectralState analyze(const SpectralBasis& basis, const Eigen::VectorXcd& field) {
    if (field.size() != basis.vertex_count()) throw InputError("field size does not match the mesh");
    return {project(basis, field), basis.provenance()};
}

Eigen::VectorXcd evaluate_on_mesh(const SpectralBasis& basis, const SpectralState& state) {
    check_state(basis, state);
    const VectorXd re = basis.modes * state.coeffs.real();
    const VectorXd im = basis.modes * state.coeffs.imag();
    Eigen::VectorXcd out(re.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

SpectralState apply_multiplier(const SpectralBasis& basis, const MultiplierProfile& F, const SpectralState& state) {
    check_state(basis, state);
    if (basis.count() > 0 && basis.frequencies[basis.count() - 1] > F.valid_up_to) {
        std::ostringstream msg;
        msg << "multiplier " << F.label << " is only valid up to frequency " << F.valid_up_to << ", basis reaches "
            << basis.frequencies[basis.count() - 1];
        throw InputError(msg.str());
    }
    SpectralState out = state;
    for (Index j = 0; j < basis.count(); ++j) out.coeffs[j] *= F(basis.frequencies[j]);
    return out;
}

double sobolev_norm(const SpectralBasis& basis, const SpectralState& state, double s) {
    check_state(basis, state);
    double sum = 0.0;
    for (Index j = 0; j < basis.count(); ++j) {
        const double w = s == 0.0 ? 1.0 : std::pow(1.0 + basis.eigenvalues[j] * (basis.eigenvalues[j] > 0.0), s);
        sum += w * std::norm(state.coeffs[j]);
    }
    return std::sqrt(sum);
}

double l2_norm(const SpectralState& state) { return state.coeffs.norm(); }

namespace {

// Symmetric 6-point rule on the reference triangle, exact for degree 4.
constexpr double kW1 = 0.223381589678011466, kA1 = 0.445948490915964886;
constexpr double kW2 = 0.109951743655321868, kA2 = 0.091576213509770743;

inline double power_half(double s, double q) {
    if (q == 2.0) return s;
    if (q == 4.0) return s * s;
    if (q == 6.0) return s * s * s;
    return std::pow(s, 0.5 * q);
}

/// Squared moduli at the six nodes from three vertex values (re, im).
template <class Acc>
inline void nodes(const double r[3], const double i[3], Acc&& acc) {
    const double b1 = 1.0 - 2.0 * kA1, b2 = 1.0 - 2.0 * kA2;
    for (int k = 0; k < 3; ++k) {
        const int k1 = (k + 1) % 3, k2 = (k + 2) % 3;
        const double r1 = b1 * r[k] + kA1 * (r[k1] + r[k2]), i1 = b1 * i[k] + kA1 * (i[k1] + i[k2]);
        const double r2 = b2 * r[k] + kA2 * (r[k1] + r[k2]), i2 = b2 * i[k] + kA2 * (i[k1] + i[k2]);
        acc(kW1, r1 * r1 + i1 * i1);
        acc(kW2, r2 * r2 + i2 * i2);
    }
}

} // namespace

LqQuadrature::LqQuadrature(const SurfaceMesh& mesh) : tris_(mesh.triangles), nvert_(mesh.vertex_count()) {
    area_weight_.resize(tris_.size());
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        area_weight_[t] = 0.5 * std::abs(mesh.chart_orient(t));
        area_ += area_weight_[t];
    }
}

double LqQuadrature::integral(const double* re, const double* im, double q) const {
    double total = 0.0;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        const auto& tri = tris_[t];
        const double r[3] = {re[tri[0]], re[tri[1]], re[tri[2]]};
        const double i[3] = {im[tri[0]], im[tri[1]], im[tri[2]]};
        double local = 0.0;
        nodes(r, i, [&](double w, double s) { local += w * power_half(s, q); });
        total += area_weight_[t] * local;
    }
    return total;
}

double LqQuadrature::integral(const Eigen::Ref<const Eigen::VectorXcd>& field, double q) const {
    if (static_cast<std::size_t>(field.size()) != nvert_) throw InputError("field size does not match the mesh");
    const VectorXd re = field.real(), im = field.imag();
    return integral(re.data(), im.data(), q);
}

double LqQuadrature::norm(const Eigen::Ref<const Eigen::VectorXcd>& field, double q) const {
    if (static_cast<std::size_t>(field.size()) != nvert_) throw InputError("field size does not match the mesh");
    if (std::isinf(q)) return field.size() == 0 ? 0.0 : field.cwiseAbs().maxCoeff();
    if (!(q >= 1.0)) throw InputError("L^q norm needs q >= 1");
    return std::pow(integral(field, q), 1.0 / q);
}

double LqQuadrature::integral_of_sum_squares(const std::vector<Eigen::VectorXcd>& fields, double q) const {
    for (const auto& f : fields)
        if (static_cast<std::size_t>(f.size()) != nvert_) throw InputError("field size does not match the mesh");
    double total = 0.0;
    std::vector<double> acc(6);
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        const auto& tri = tris_[t];
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const auto& f : fields) {
            const double r[3] = {f[tri[0]].real(), f[tri[1]].real(), f[tri[2]].real()};
            const double i[3] = {f[tri[0]].imag(), f[tri[1]].imag(), f[tri[2]].imag()};
            int n = 0;
            nodes(r, i, [&](double, double s) { acc[n++] += s; });
        }
        double local = 0.0;
        for (int n = 0; n < 6; ++n) local += (n % 2 == 0 ? kW1 : kW2) * power_half(acc[n], q);
        total += area_weight_[t] * local;
    }
    return total;
}

double lq_norm(const SurfaceMesh& mesh, const Eigen::VectorXcd& field, double q) {
    return LqQuadrature(mesh).norm(field, q);
}

double weyl_ratio(const SpectralBasis& basis, double area, double lambda) {
    const auto n = (basis.frequencies.array() <= lambda).count();
    return static_cast<double>(n) / (area * lambda * lambda / (4.0 * M_PI));
}

SpectralState parity_split(const SpectralBasis& basis, const SurfaceMesh& mesh, const SpectralState& state,
                           Parity parity) {
    check_state(basis, state);
    if (mesh.involution.size() != static_cast<std::size_t>(basis.vertex_count()))
        throw InputError("parity_split: mesh has no involution matching the basis");
    const Eigen::VectorXcd u = evaluate_on_mesh(basis, state);
    Eigen::VectorXcd su(u.size());
    for (Index v = 0; v < u.size(); ++v) su[v] = u[mesh.involution[v]];
    const Eigen::VectorXcd reflected = project(basis, su);
    const double sign = parity == Parity::odd ? -1.0 : 1.0;
    SpectralState out = state;
    out.coeffs = 0.5 * (state.coeffs + sign * reflected);
    return out;
}

// Cache layout: magic, version, frequencies, modes (rows, cols, column-major),
// mesh hash, then eigenvalues, residuals, parity tags, trusted count, flags and
// the vertex mass matrix in compressed-column form.
namespace {

template <class T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void put_array(std::ofstream& out, const T* data, std::uint64_t n) {
    put(out, n);
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw InputError("truncated basis cache " + path);
    return v;
}

template <class T>
std::vector<T> get_array(std::ifstream& in, const std::string& path) {
    const auto n = get<std::uint64_t>(in, path);
    if (n > (1ull << 36) / sizeof(T)) throw InputError("corrupt basis cache " + path);
    std::vector<T> v(n);
    if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))))
        throw InputError("truncated basis cache " + path);
    return v;
}

} // namespace

void save_basis(const SpectralBasis& b, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write basis cache " + path);
    out.write(kMagic, sizeof kMagic);
    put(out, kVersion);
    put_array(out, b.frequencies.data(), b.frequencies.size());
    put<std::uint64_t>(out, b.modes.rows());
    put_array(out, b.modes.data(), b.modes.size());
    put(out, b.mesh_hash);
    put_array(out, b.eigenvalues.data(), b.eigenvalues.size());
    put_array(out, b.residuals.data(), b.residuals.size());
    put_array(out, b.parity.data(), b.parity.size());
    put<std::uint64_t>(out, b.trusted_count);
    put<std::uint8_t>(out, b.dirichlet_at_cones);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(b.kind));
    SparseMatrix m = b.mass;
    m.makeCompressed();
    put<std::uint64_t>(out, m.rows());
    put_array(out, m.outerIndexPtr(), m.outerSize() + 1);
    put_array(out, m.innerIndexPtr(), m.nonZeros());
    put_array(out, m.valuePtr(), m.nonZeros());
    if (!out) throw InputError("failed writing basis cache " + path);
}

SpectralBasis load_basis(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open basis cache " + path);
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw InputError("not a basis cache: " + path);
    if (get<std::uint32_t>(in, path) != kVersion) throw InputError("unsupported basis cache version in " + path);
    SpectralBasis b;
    const auto freq = get_array<double>(in, path);
    const auto rows = get<std::uint64_t>(in, path);
    const auto modes = get_array<double>(in, path);
    if (rows == 0 || modes.size() != rows * freq.size()) throw InputError("inconsistent basis cache " + path);
    b.frequencies = Eigen::Map<const VectorXd>(freq.data(), freq.size());
    b.modes = Eigen::Map<const MatrixXd>(modes.data(), rows, freq.size());
    b.mesh_hash = get<std::uint64_t>(in, path);
    const auto mu = get_array<double>(in, path);
    const auto res = get_array<double>(in, path);
    const auto par = get_array<std::int8_t>(in, path);
    if (mu.size() != freq.size() || res.size() != freq.size() || (par.size() != freq.size() && !par.empty()))
        throw InputError("inconsistent basis cache " + path);
    b.eigenvalues = Eigen::Map<const VectorXd>(mu.data(), mu.size());
    b.residuals = Eigen::Map<const VectorXd>(res.data(), res.size());
    b.parity = par;
    b.trusted_count = get<std::uint64_t>(in, path);
    b.dirichlet_at_cones = get<std::uint8_t>(in, path) != 0;
    const auto kind = get<std::uint8_t>(in, path);
    if (kind > 3 || b.trusted_count > freq.size()) throw InputError("corrupt basis cache " + path);
    b.kind = static_cast<BasisParity>(kind);
    const auto n = get<std::uint64_t>(in, path);
    const auto outer = get_array<int>(in, path);
    const auto inner = get_array<int>(in, path);
    const auto values = get_array<double>(in, path);
    if (n != rows || outer.size() != n + 1 || inner.size() != values.size() ||
        static_cast<std::size_t>(outer.back()) != values.size())
        throw InputError("inconsistent mass matrix in basis cache " + path);
    for (int i : inner)
        if (i < 0 || static_cast<std::uint64_t>(i) >= n) throw InputError("corrupt mass matrix in " + path);
    b.mass = Eigen::Map<const SparseMatrix>(n, n, values.size(), outer.data(), inner.data(), values.data());
    return b;
}

} // namespace polywave
