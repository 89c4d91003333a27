#pragma once

#include "te/operators.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace te {

struct EigenOptions {
    /// Dense direct solve up to this many nodes; blocked iteration above.
    int dense_threshold = 3000;
    /// Route through the iterative path regardless of size (testing hook).
    bool force_iterative = false;
    /// Seed for the iterative start block.
    std::uint64_t seed = 0;
    /// Iteration budget = restart_factor * (m+1); block size = m+1+block_extra.
    int restart_factor = 10;
    int block_extra = 8;
    /// Per-pair convergence tolerance for the iterative path.
    double tol = 1e-10;
    /// Hard error when the metric-weighted operator is more asymmetric than this.
    double asymmetry_tol = 1e-10;
};

/// Smallest end of the pencil T u = lambda D u. Eigenvalues ascending;
/// eigenvectors have unit X*D norm with the entry of largest magnitude made
/// positive. residuals[k] = ||T u - lambda D u|| / (||T u|| + ||lambda D u||),
/// with the denominator floored at ||T||_F ||u|| (the plain ratio is
/// 0/0-shaped for the kernel pair).
struct EigenResult {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;   // n x (m+1)
    Eigen::VectorXd residuals;
};

/// Generalized eigenpairs with the m+1 smallest eigenvalues. Works on the
/// equivalent symmetric-definite pencil (X T, X D): with M = X D positive
/// diagonal, the standard problem M^{-1/2} sym(XT) M^{-1/2} y = lambda y is
/// solved and u = M^{-1/2} y mapped back.
EigenResult smallest_pairs(const OperatorMatrix& op, int m, const EigenOptions& options = {});

} // namespace te
