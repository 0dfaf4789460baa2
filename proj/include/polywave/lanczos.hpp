#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "polywave/mesh.hpp"

namespace polywave {

struct LanczosOptions {
    /// Shift below the wanted part of the spectrum (K is semidefinite, so any
    /// negative value works; it is perturbed if the factorization fails).
    double shift = -1.0;
    int block = 8;
    /// Basis size; 0 means count + max(64, count).
    int basis = 0;
    /// Convergence threshold on ||Op y - theta y||_M / theta.
    double tolerance = 1e-11;
    int max_restarts = 200;
    std::uint64_t seed = 0x1a2b3c;
};

struct EigenPairs {
    Eigen::VectorXd values;   ///< generalized eigenvalues mu (= lambda^2), ascending
    Eigen::MatrixXd vectors;  ///< M-orthonormal columns
    Eigen::VectorXd residuals; ///< ||K v - mu M v|| / ((|mu| + |shift|) ||M v||)
    int restarts = 0;
    double shift = 0.0;
};

/// Lowest `count` eigenpairs of K v = mu M v (K symmetric positive semidefinite,
/// M symmetric positive definite) by shift-invert block Lanczos with thick
/// restarts and full M-orthogonalization. Small problems go to a dense solver.
EigenPairs lowest_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, int count, const LanczosOptions& options = {});

/// Number of generalized eigenvalues strictly below mu (Sylvester inertia of K - mu M).
int count_below(const SparseMatrix& K, const SparseMatrix& M, double mu);

} // namespace polywave
