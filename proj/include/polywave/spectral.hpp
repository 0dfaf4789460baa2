#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polywave/lanczos.hpp"
#include "polywave/mesh.hpp"

namespace polywave {

using cplx = std::complex<double>;

/// Which part of the spectrum of the doubled surface to compute. `odd` and
/// `even` solve on one parity subspace (Dirichlet and Neumann problems on the
/// polygon); `split` solves both subspaces and merges them, which equals the
/// full spectrum at half the cost; `full` solves the unreduced problem and
/// then classifies every mode by its parity.
enum class BasisParity { full, odd, even, split };

struct EigenbasisOptions {
    BasisParity parity = BasisParity::full;
    LanczosOptions lanczos;
    /// Confirm with an inertia count that no eigenvalue below the last one was missed.
    bool verify_inertia = true;
};

struct SpectralBasis {
    Eigen::VectorXd frequencies; ///< lambda_j, nondecreasing
    Eigen::VectorXd eigenvalues; ///< lambda_j^2 as computed
    Eigen::MatrixXd modes;       ///< vertex values, one column per mode, M-orthonormal
    Eigen::VectorXd residuals;
    std::vector<std::int8_t> parity; ///< +1 even, -1 odd under sigma
    /// Modes [0, trusted_count) passed the discretization-error check.
    std::size_t trusted_count = 0;
    SparseMatrix mass; ///< full vertex mass matrix (no elimination)
    std::uint64_t mesh_hash = 0;
    bool dirichlet_at_cones = false;
    BasisParity kind = BasisParity::full;

    Eigen::Index count() const { return frequencies.size(); }
    Eigen::Index vertex_count() const { return modes.rows(); }
    double max_trusted_frequency() const;
    /// Identifier combining the mesh hash and solver options, used to tie states to bases.
    std::string provenance() const;
};

/// Lowest `count` eigenpairs of the assembled operators. Throws InputError if
/// count exceeds the problem size, NumericalError if the solver fails or the
/// residual or orthonormality invariants are violated.
SpectralBasis eigenbasis(const SurfaceMesh& mesh, const DiscreteOperators& ops, int count,
                         const EigenbasisOptions& options = {});

/// Trusted-mode ceiling from two meshes: with h-extrapolation of the O(h^2)
/// frequency error, modes whose estimated relative error is below `tolerance`
/// are trusted, up to the first failure. A trailing degenerate cluster that
/// may be cut off by `count` is never trusted.
void mark_trusted(SpectralBasis& fine, const SpectralBasis& coarse, double h_fine, double h_coarse,
                  double tolerance = 0.01);
/// Estimated relative frequency error per mode (index matched), as used by mark_trusted.
std::vector<double> frequency_error_estimate(const SpectralBasis& fine, const SpectralBasis& coarse, double h_fine,
                                             double h_coarse);

struct SpectralState {
    Eigen::VectorXcd coeffs;
    std::string basis_ref;
};

SpectralState make_state(const SpectralBasis& basis, Eigen::VectorXcd coeffs);
/// Coefficients <f, phi_j> in the mass inner product.
SpectralState analyze(const SpectralBasis& basis, const Eigen::VectorXcd& field);
/// Synthesis sum_j c_j phi_j at the mesh vertices.
Eigen::VectorXcd evaluate_on_mesh(const SpectralBasis& basis, const SpectralState& state);

/// Scalar function of frequency. The support hint is an interval outside of
/// which eval vanishes; `valid_up_to` is the largest frequency the profile can
/// be evaluated at (profiles built from finitely many dyadic pieces).
struct MultiplierProfile {
    std::function<double(double)> eval;
    double support_lo = 0.0;
    double support_hi = std::numeric_limits<double>::infinity();
    double valid_up_to = std::numeric_limits<double>::infinity();
    std::string label;

    double operator()(double lambda) const { return eval(lambda); }
};

/// c_j -> F(lambda_j) c_j. Throws InputError if F is not valid up to the largest frequency.
SpectralState apply_multiplier(const SpectralBasis& basis, const MultiplierProfile& F, const SpectralState& state);

/// (sum_j (1 + lambda_j^2)^s |c_j|^2)^(1/2).
double sobolev_norm(const SpectralBasis& basis, const SpectralState& state, double s);
double l2_norm(const SpectralState& state);

/// Per-triangle quadrature (6-point rule, exact for degree 4) of |u|^q for the
/// piecewise-linear interpolant of vertex values. q = infinity gives the
/// largest vertex magnitude.
class LqQuadrature {
public:
    explicit LqQuadrature(const SurfaceMesh& mesh);
    double norm(const Eigen::Ref<const Eigen::VectorXcd>& field, double q) const;
    /// Integral of |u|^q (q finite).
    double integral(const Eigen::Ref<const Eigen::VectorXcd>& field, double q) const;
    /// Same for a real-and-imaginary split field (used by the batched evolution).
    double integral(const double* re, const double* im, double q) const;
    /// Integral of (sum_b |u_b|^2)^(q/2) for several fields at once (square functions).
    double integral_of_sum_squares(const std::vector<Eigen::VectorXcd>& fields, double q) const;

    std::size_t vertex_count() const { return nvert_; }
    double area() const { return area_; }

private:
    std::vector<std::array<std::uint32_t, 3>> tris_;
    std::vector<double> area_weight_;
    std::size_t nvert_ = 0;
    double area_ = 0.0;
};

double lq_norm(const SurfaceMesh& mesh, const Eigen::VectorXcd& field, double q);

/// Binary cache (magic "ESCSBASE").
void save_basis(const SpectralBasis& basis, const std::string& path);
SpectralBasis load_basis(const std::string& path);

/// Weyl counting check: ratio N(lambda) / (Area lambda^2 / (4 pi)) at lambda.
double weyl_ratio(const SpectralBasis& basis, double area, double lambda);

/// Parity projection of a state through the coefficient representation of sigma:
/// S_ij = phi_i^T M (phi_j o sigma), result (c +/- S c) / 2.
SpectralState parity_split(const SpectralBasis& basis, const SurfaceMesh& mesh, const SpectralState& state,
                           Parity parity);

} // namespace polywave
