#include "te/eigensolve.hpp"

#include "te/errors.hpp"
#include "te/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace te {

namespace {

/// Connectivity of the off-diagonal sparsity pattern of T.
bool pattern_connected(const Eigen::SparseMatrix<double>& t) {
    const int n = static_cast<int>(t.rows());
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (Eigen::SparseMatrix<double>::InnerIterator it(t, u); it; ++it) {
            const int v = static_cast<int>(it.row());
            if (v != u && it.value() != 0.0 && !seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
                ++count;
            }
        }
    }
    return count == n;
}

/// Symmetric half-sum of XT after validating the asymmetry tolerance.
Eigen::SparseMatrix<double> symmetrized_xt(const OperatorMatrix& op, double tol) {
    const double asym = operator_asymmetry(op);
    if (asym > tol)
        throw SolverError("metric-weighted operator asymmetry " + std::to_string(asym) +
                          " exceeds tolerance; operator construction is inconsistent");
    const Eigen::SparseMatrix<double> xt = op.X.asDiagonal() * op.T;
    return 0.5 * (xt + Eigen::SparseMatrix<double>(xt.transpose()));
}

/// Drop near-dependent columns and return an orthonormal basis (SVD based).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& v) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] <= 0.0) return Eigen::MatrixXd(v.rows(), 0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-12 * sv[0]) ++rank;
    return svd.matrixU().leftCols(rank);
}

struct StandardProblem {
    Eigen::SparseMatrix<double> s;   // sym(X T)
    Eigen::VectorXd minv_sqrt;       // (X D)^{-1/2}

    Eigen::MatrixXd apply(const Eigen::MatrixXd& v) const {
        return minv_sqrt.asDiagonal() * (s * (minv_sqrt.asDiagonal() * v)).eval();
    }
};

/// Block preconditioned steepest-descent iteration (LOBPCG) for the smallest
/// eigenpairs of the standard symmetric problem. Shift-free; a Jacobi
/// preconditioner built from the operator diagonal accelerates the smallest
/// end. Returns eigenvalue/vector estimates sorted ascending.
void lobpcg_smallest(const StandardProblem& problem, int want, const EigenOptions& options,
                     Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    const int n = static_cast<int>(problem.s.rows());
    const int block = std::min(n, want + options.block_extra);
    const int budget = std::max(1, options.restart_factor * want);

    Eigen::VectorXd diag(n);
    for (int i = 0; i < n; ++i) {
        const double d = problem.s.coeff(i, i) * problem.minv_sqrt[i] * problem.minv_sqrt[i];
        diag[i] = d > 1e-300 ? d : 1.0;
    }

    Rng rng(derive_seed(options.seed, 0x10b9c6));
    Eigen::MatrixXd x(n, block);
    for (int c = 0; c < block; ++c)
        for (int r = 0; r < n; ++r) x(r, c) = rng.normal();
    x = orthonormalize(x);

    auto rayleigh_ritz = [&](const Eigen::MatrixXd& basis, Eigen::MatrixXd& ax_out,
                             Eigen::VectorXd& theta, Eigen::MatrixXd& ritz) {
        const Eigen::MatrixXd abasis = problem.apply(basis);
        const Eigen::MatrixXd h = basis.transpose() * abasis;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()));
        const int keep = std::min<int>(block, static_cast<int>(basis.cols()));
        theta = es.eigenvalues().head(keep);
        ritz = basis * es.eigenvectors().leftCols(keep);
        ax_out = abasis * es.eigenvectors().leftCols(keep);
    };

    Eigen::MatrixXd ax, p;
    Eigen::VectorXd theta;
    {
        Eigen::MatrixXd basis = x;
        rayleigh_ritz(basis, ax, theta, x);
    }

    const double opscale = std::max(1e-300, problem.s.coeffs().abs().maxCoeff());
    Eigen::VectorXd best_residuals = Eigen::VectorXd::Constant(want, 1.0);
    auto block_converged = [&]() {
        const Eigen::MatrixXd r = ax - x * theta.asDiagonal();
        bool ok = true;
        for (int k = 0; k < want; ++k) {
            const double num = r.col(k).norm();
            const double den = (std::abs(theta[k]) + opscale) * x.col(k).norm();
            best_residuals[k] = num / den;
            if (best_residuals[k] > options.tol) ok = false;
        }
        return ok;
    };

    bool converged = false;
    for (int iter = 0; iter < budget; ++iter) {
        converged = block_converged();
        if (converged) break;

        const Eigen::MatrixXd r = ax - x * theta.asDiagonal();
        const Eigen::MatrixXd w = diag.cwiseInverse().asDiagonal() * r;
        Eigen::MatrixXd stacked(n, x.cols() + w.cols() + p.cols());
        stacked.leftCols(x.cols()) = x;
        stacked.middleCols(x.cols(), w.cols()) = w;
        if (p.cols() > 0) stacked.rightCols(p.cols()) = p;
        const Eigen::MatrixXd basis = orthonormalize(stacked);

        const Eigen::MatrixXd x_prev = x;
        rayleigh_ritz(basis, ax, theta, x);
        // New conjugate directions: the part of the update orthogonal to the
        // previous block.
        p = orthonormalize(x - x_prev * (x_prev.transpose() * x));
    }
    if (!converged && !block_converged())
        throw SolverError("eigensolver did not converge within " + std::to_string(budget) +
                          " iterations; best residuals reached " +
                          std::to_string(best_residuals.minCoeff()) + " .. " +
                          std::to_string(best_residuals.maxCoeff()));

    values = theta.head(want);
    vectors = x.leftCols(want);
}

} // namespace

EigenResult smallest_pairs(const OperatorMatrix& op, int m, const EigenOptions& options) {
    const int n = static_cast<int>(op.T.rows());
    const int want = m + 1;
    if (want > n)
        throw ParameterError("m+1 = " + std::to_string(want) + " eigenpairs requested from an n = " +
                             std::to_string(n) + " pencil");
    for (int i = 0; i < n; ++i) {
        if (!(op.D[i] > 0.0))
            throw SolverError("degree diagonal vanishes at node " + std::to_string(i) +
                              "; the pencil is not definite");
        if (!(op.X[i] > 0.0))
            throw SolverError("metric diagonal vanishes at node " + std::to_string(i));
    }
    if (!pattern_connected(op.T))
        throw ParameterError("operator graph is disconnected; solve per component instead");

    StandardProblem problem;
    problem.s = symmetrized_xt(op, options.asymmetry_tol);
    problem.minv_sqrt = (op.X.array() * op.D.array()).rsqrt();

    Eigen::VectorXd values;
    Eigen::MatrixXd y;
    if (n <= options.dense_threshold && !options.force_iterative) {
        const Eigen::MatrixXd dense = problem.minv_sqrt.asDiagonal() *
                                      Eigen::MatrixXd(problem.s) *
                                      problem.minv_sqrt.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (dense + dense.transpose()));
        if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
        values = es.eigenvalues().head(want);
        y = es.eigenvectors().leftCols(want);
    } else {
        lobpcg_smallest(problem, want, options, values, y);
    }

    EigenResult result;
    result.eigenvalues = values;
    result.eigenvectors = problem.minv_sqrt.asDiagonal() * y;
    result.residuals.resize(want);

    const Eigen::VectorXd xd = op.X.array() * op.D.array();
    const double t_scale = op.T.norm();
    for (int k = 0; k < want; ++k) {
        auto u = result.eigenvectors.col(k);
        // Unit X*D norm, largest-magnitude entry positive (lowest index on ties).
        const double norm = std::sqrt(u.dot(xd.asDiagonal() * u));
        if (norm > 0.0) u /= norm;
        Eigen::Index arg = 0;
        u.cwiseAbs().maxCoeff(&arg);
        if (u[arg] < 0.0) u = -u;

        const Eigen::VectorXd tu = op.T * u;
        const Eigen::VectorXd ldu = result.eigenvalues[k] * (op.D.asDiagonal() * u);
        const double num = (tu - ldu).norm();
        // The plain ratio num / (||Tu|| + ||lambda Du||) is 0/0-shaped at the
        // kernel pair; flooring the denominator at the operator scale keeps
        // it meaningful there without touching well-separated pairs.
        const double den = std::max(tu.norm() + ldu.norm(), t_scale * u.norm());
        result.residuals[k] = den > 0.0 ? num / den : 0.0;
    }
    return result;
}

} // namespace te
