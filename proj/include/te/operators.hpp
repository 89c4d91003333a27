#pragma once

#include "te/graph.hpp"

#include <Eigen/Sparse>

#include <string>

namespace te {

enum class OperatorKind { LE, SE, TA, TG, TE };

std::string operator_kind_name(OperatorKind kind);

/// Semi-supervision inputs for the operator builders. Empty vectors mean the
/// neutral default (a = 1, mu = 0, potential = 0, r = 1 on every edge).
struct SupervisionParams {
    Eigen::VectorXd a;              // positive measure modifiers
    Eigen::VectorXd mu;             // advection indicator
    Eigen::VectorXd potential;      // Schroedinger potential diagonal V
    std::vector<double> r_overlay;  // symmetric positive per-edge factors,
                                    // aligned with WeightedGraph::edges()
    double beta = 0.0;
    double alpha_hat = 0.0;
};

/// An assembled operator T together with the diagonals that make the
/// generalized eigenproblem T u = lambda D u symmetric-definite: X is the
/// metric in which T is self-adjoint (identity for LE/SE) and D the degrees.
struct OperatorMatrix {
    Eigen::SparseMatrix<double> T;
    Eigen::VectorXd X;
    Eigen::VectorXd D;
    OperatorKind kind = OperatorKind::LE;
};

/// T = L, the plain Laplacian pencil of Laplacian eigenmaps.
OperatorMatrix build_le(const WeightedGraph& g);

/// T = L + alpha * diag(V) with alpha = alpha_hat * tr(L) / tr(V).
/// alpha_hat = 0 short-circuits to alpha = 0 (no potential read).
OperatorMatrix build_se(const WeightedGraph& g, const SupervisionParams& params);

/// Advection operator T = L (I + beta diag(mu)); self-adjoint in
/// X = diag(1 + beta mu_i), which must stay positive.
OperatorMatrix build_ta(const WeightedGraph& g, const SupervisionParams& params);

/// Gradient-flow operator (T y)_i = sum_j (a_i y_i - a_j y_j) w_ij 2/(a_i+a_j);
/// the r = 1 special case of the general transport operator.
OperatorMatrix build_tg(const WeightedGraph& g, const SupervisionParams& params);

/// General transport operator with per-edge weight modifiers:
/// (T y)_i = sum_j (a_i y_i - a_j y_j) w_ij 2 r_ij/(a_i+a_j).
OperatorMatrix build_te(const WeightedGraph& g, const SupervisionParams& params);

/// Pointwise evaluation of the nonlinear transport operator
/// (T y)_i = sum_j (y_i - y_j) w_ij - (beta/2) sum_j (y_j^2 - y_i^2) w_ij,
/// whose linearization in the direction of mu is build_ta's matrix.
Eigen::VectorXd eval_nonlinear_transport(const WeightedGraph& g,
                                         const Eigen::VectorXd& y, double beta);

/// Just the quadratic term of eval_nonlinear_transport; exposed so the
/// linearization can be checked by finite differences.
Eigen::VectorXd nonlinear_quadratic_term(const WeightedGraph& g,
                                         const Eigen::VectorXd& y, double beta);

/// y^t X T y, the energy of y in the operator's metric. Nonnegative (up to
/// roundoff) for every operator the builders produce.
double metric_quadratic_form(const OperatorMatrix& op, const Eigen::VectorXd& y);

/// max |XT - (XT)^t| relative to max |XT|; 0 for an exactly symmetric pencil.
double operator_asymmetry(const OperatorMatrix& op);

/// Coordinate-list dump for differential testing: `prefix.coo` holds
/// "i j value" rows of T, `prefix.xdiag` / `prefix.ddiag` the diagonals.
void save_operator(const std::string& prefix, const OperatorMatrix& op);

} // namespace te
