#include "polywave/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace polywave {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

using Factor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

bool factor_shifted(Factor& f, const SparseMatrix& K, const SparseMatrix& M, double shift) {
    const SparseMatrix a = K - shift * M;
    f.compute(a);
    if (f.info() != Eigen::Success) return false;
    const auto& d = f.vectorD();
    for (Index i = 0; i < d.size(); ++i)
        if (!(std::abs(d[i]) > 0.0) || !std::isfinite(d[i])) return false;
    return true;
}

/// Two rounds of block classical Gram-Schmidt of W against V in the M inner product.
void project_out(Eigen::Ref<MatrixXd> W, const Eigen::Ref<const MatrixXd>& V, const SparseMatrix& M) {
    if (V.cols() == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const MatrixXd mw = M * W;
        W.noalias() -= V * (V.transpose() * mw);
    }
}

/// M-orthonormalizes the columns of W, which are already M-orthogonal to V.
/// Uses Cholesky QR twice; a rank-deficient block falls back to column-wise
/// Gram-Schmidt with random replacement of collapsed columns.
void orthonormalize_block(Eigen::Ref<MatrixXd> W, const Eigen::Ref<const MatrixXd>& V, const SparseMatrix& M,
                          std::mt19937_64& rng) {
    bool ok = true;
    for (int pass = 0; pass < 2 && ok; ++pass) {
        const MatrixXd G = W.transpose() * (M * W);
        Eigen::LLT<MatrixXd> llt(G);
        if (llt.info() != Eigen::Success) {
            ok = false;
            break;
        }
        const auto d = MatrixXd(llt.matrixL()).diagonal();
        if (d.minCoeff() < 1e-6 * d.maxCoeff()) {
            ok = false;
            break;
        }
        llt.matrixU().solveInPlace<Eigen::OnTheRight>(W);
    }
    if (ok) return;

    std::normal_distribution<double> normal;
    for (Index j = 0; j < W.cols(); ++j) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            const double before = std::sqrt(W.col(j).dot(M * W.col(j)));
            for (int pass = 0; pass < 2; ++pass) {
                const VectorXd mw = M * W.col(j);
                if (V.cols() > 0) W.col(j) -= V * (V.transpose() * mw);
                if (j > 0) W.col(j) -= W.leftCols(j) * (W.leftCols(j).transpose() * mw);
            }
            const double after = std::sqrt(W.col(j).dot(M * W.col(j)));
            if (after > 1e-8 * before && after > 0.0) {
                W.col(j) /= after;
                break;
            }
            for (Index i = 0; i < W.rows(); ++i) W(i, j) = normal(rng);
        }
    }
}

EigenPairs dense_solve(const SparseMatrix& K, const SparseMatrix& M, int count) {
    const MatrixXd k(K), m(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(k, m);
    if (es.info() != Eigen::Success) throw NumericalError("spectral", "dense generalized eigensolver failed");
    EigenPairs out;
    out.values = es.eigenvalues().head(count);
    out.vectors = es.eigenvectors().leftCols(count);
    out.shift = -1.0; // only sets the scale of the reported residuals
    return out;
}

void fill_residuals(EigenPairs& out, const SparseMatrix& K, const SparseMatrix& M) {
    const Index c = out.values.size();
    out.residuals.resize(c);
    const MatrixXd kv = K * out.vectors, mv = M * out.vectors;
    for (Index j = 0; j < c; ++j) {
        const double mu = out.values[j];
        out.residuals[j] = (kv.col(j) - mu * mv.col(j)).norm() / ((std::abs(mu) + std::abs(out.shift)) * mv.col(j).norm());
    }
}

} // namespace

int count_below(const SparseMatrix& K, const SparseMatrix& M, double mu) {
    Factor f;
    if (!factor_shifted(f, K, M, mu)) throw NumericalError("spectral", "inertia count: singular shifted matrix");
    const auto& d = f.vectorD();
    return static_cast<int>((d.array() < 0.0).count());
}

EigenPairs lowest_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, int count, const LanczosOptions& opt) {
    const Index n = K.rows();
    if (count <= 0) throw InputError("eigenbasis: count must be positive");
    if (count > n) {
        std::ostringstream msg;
        msg << "eigenbasis: requested " << count << " modes but the problem has dimension " << n;
        throw InputError(msg.str());
    }
    if (n <= 600) {
        EigenPairs out = dense_solve(K, M, count);
        fill_residuals(out, K, M);
        return out;
    }

    double shift = opt.shift;
    Factor factor;
    bool ok = false;
    for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
        ok = factor_shifted(factor, K, M, shift);
        if (!ok) shift = shift * 1.37 - 1e-3;
    }
    if (!ok) throw NumericalError("spectral", "factorization of the shifted matrix failed (singular after perturbation)");

    const Index b = std::max(1, opt.block);
    Index m = opt.basis > 0 ? opt.basis : count + std::max<Index>(64, count);
    m = std::min<Index>(m, n);
    m = std::max<Index>(m, std::min<Index>(n, count + 2 * b));
    m -= m % b;
    if (m <= count) throw InputError("eigenbasis: basis too small for the requested count");

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    MatrixXd V(n, m), H = MatrixXd::Zero(m, m);
    MatrixXd W(n, b), F(n, b);
    for (Index j = 0; j < b; ++j)
        for (Index i = 0; i < n; ++i) W(i, j) = normal(rng);
    orthonormalize_block(W, V.leftCols(0), M, rng);

    // Invariant (Krylov-Schur): Op V = V H + F E^T, with F the residual block of the
    // newest block of V. Ritz residuals are then F times the trailing components of
    // the Ritz coefficient vectors.
    Index k = 0;
    EigenPairs result;
    result.shift = shift;
    MatrixXd Zb(n, b);
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        for (;;) {
            V.middleCols(k, b) = W;
            const Index c = k;
            k += b;
            const MatrixXd mw = M * W;
            for (Index j = 0; j < b; ++j) Zb.col(j) = factor.solve(mw.col(j));
            const MatrixXd hcol = V.leftCols(k).transpose() * (M * Zb);
            H.block(0, c, k, b) = hcol;
            H.block(c, 0, b, c) = hcol.topRows(c).transpose();
            H.block(c, c, b, b) = 0.5 * (hcol.bottomRows(b) + hcol.bottomRows(b).transpose());
            F = Zb;
            project_out(F, V.leftCols(k), M);
            if (k + b > m) break;
            W = F;
            orthonormalize_block(W, V.leftCols(k), M, rng);
        }

        Eigen::SelfAdjointEigenSolver<MatrixXd> es(H.topLeftCorner(k, k));
        if (es.info() != Eigen::Success) throw NumericalError("spectral", "Rayleigh-Ritz eigensolver failed");
        const VectorXd theta = es.eigenvalues().reverse();
        const MatrixXd S = es.eigenvectors().rowwise().reverse();

        const MatrixXd G = F.transpose() * (M * F);
        Index converged = 0;
        for (Index j = 0; j < std::min<Index>(k, count); ++j) {
            const VectorXd tail = S.col(j).tail(b);
            const double r = std::sqrt(std::max(0.0, tail.dot(G * tail)));
            if (!(theta[j] > 0.0 && r <= opt.tolerance * theta[j])) break;
            ++converged;
        }
        result.restarts = restart;
        if (std::getenv("POLYWAVE_TRACE_LANCZOS"))
            std::fprintf(stderr, "lanczos restart %d: basis %ld converged %ld\n", restart, static_cast<long>(k),
                         static_cast<long>(converged));
        if (converged >= count) {
            result.values.resize(count);
            for (Index j = 0; j < count; ++j) result.values[j] = shift + 1.0 / theta[j];
            result.vectors = V.leftCols(k) * S.leftCols(count);
            break;
        }
        if (restart == opt.max_restarts) {
            std::ostringstream msg;
            msg << "Lanczos did not converge: " << converged << " of " << count << " eigenpairs after "
                << opt.max_restarts << " restarts";
            throw NumericalError("spectral", msg.str());
        }

        // Thick restart: keep the leading Ritz vectors and continue from F.
        const Index keep = std::min<Index>(k - b, std::max<Index>(count + (k - count) / 2, count + b));
        const MatrixXd Y = V.leftCols(k) * S.leftCols(keep);
        V.leftCols(keep) = Y;
        H.setZero();
        H.topLeftCorner(keep, keep).diagonal() = theta.head(keep);
        W = F;
        project_out(W, V.leftCols(keep), M);
        orthonormalize_block(W, V.leftCols(keep), M, rng);
        k = keep;
    }

    // Ritz values come out sorted by theta descending, i.e. mu ascending.
    fill_residuals(result, K, M);
    return result;
}

} // namespace polywave
