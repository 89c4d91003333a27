#include "te/operators.hpp"

#include "te/errors.hpp"

#include <cmath>
#include <fstream>

namespace te {

std::string operator_kind_name(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::LE: return "le";
        case OperatorKind::SE: return "se";
        case OperatorKind::TA: return "ta";
        case OperatorKind::TG: return "tg";
        case OperatorKind::TE: return "te";
    }
    return "?";
}

namespace {

Eigen::VectorXd resolve_vector(const Eigen::VectorXd& v, int n, double fill,
                               const char* name) {
    if (v.size() == 0) return Eigen::VectorXd::Constant(n, fill);
    if (v.size() != n)
        throw ShapeError(std::string(name) + " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(n));
    return v;
}

/// Assemble the matrix form T = diag(a_i sum_j w^r_ij) - W^r diag(a_j) from
/// per-edge effective weights w^r_ij = w_ij * 2 r_ij / (a_i + a_j). Row sums
/// accumulate in global edge order, which matches the Laplacian assembly so
/// the a = 1, r = 1 case reduces to L bit-for-bit.
OperatorMatrix assemble_transport(const WeightedGraph& g, const Eigen::VectorXd& a,
                                  const std::vector<double>& r, OperatorKind kind) {
    const int n = g.size();
    for (int i = 0; i < n; ++i)
        if (!(a[i] > 0.0))
            throw PositivityError("measure modifier a[" + std::to_string(i) +
                                  "] = " + std::to_string(a[i]) + " must be positive");

    std::vector<double> wr(static_cast<std::size_t>(g.edge_count()));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(g.edge_count()) * 2 + static_cast<std::size_t>(n));
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < g.edge_count(); ++e) {
        const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
        const double re = r[static_cast<std::size_t>(e)];
        if (!(re > 0.0))
            throw PositivityError("weight modifier r on edge (" + std::to_string(edge.i) + ", " +
                                  std::to_string(edge.j) + ") must be positive");
        const double factor = 2.0 * re / (a[edge.i] + a[edge.j]);
        const double w = edge.w * factor;
        wr[static_cast<std::size_t>(e)] = w;
        row_sum[edge.i] += w;
        row_sum[edge.j] += w;
        trip.emplace_back(edge.i, edge.j, -(w * a[edge.j]));
        trip.emplace_back(edge.j, edge.i, -(w * a[edge.i]));
    }
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, a[i] * row_sum[i]);

    OperatorMatrix op;
    op.T.resize(n, n);
    op.T.setFromTriplets(trip.begin(), trip.end());
    op.X = a;
    op.D = g.degrees();
    op.kind = kind;
    return op;
}

} // namespace

OperatorMatrix build_le(const WeightedGraph& g) {
    OperatorMatrix op;
    op.T = g.laplacian();
    op.X = Eigen::VectorXd::Ones(g.size());
    op.D = g.degrees();
    op.kind = OperatorKind::LE;
    return op;
}

OperatorMatrix build_se(const WeightedGraph& g, const SupervisionParams& params) {
    OperatorMatrix op = build_le(g);
    op.kind = OperatorKind::SE;
    if (params.alpha_hat == 0.0) return op;
    if (params.alpha_hat < 0.0) throw ParameterError("alpha_hat must be >= 0");

    const Eigen::VectorXd v = resolve_vector(params.potential, g.size(), 0.0, "potential");
    for (int i = 0; i < g.size(); ++i)
        if (v[i] < 0.0)
            throw ParameterError("potential V[" + std::to_string(i) + "] must be >= 0");
    const double trace_v = v.sum();
    if (trace_v == 0.0)
        throw ParameterError("alpha_hat > 0 requires a potential with positive trace; "
                             "tr(V) = 0 makes alpha = alpha_hat*tr(L)/tr(V) undefined");
    const double trace_l = op.D.sum();  // diag(L) = degrees
    const double alpha = params.alpha_hat * trace_l / trace_v;
    for (int i = 0; i < g.size(); ++i)
        if (v[i] != 0.0) op.T.coeffRef(i, i) += alpha * v[i];
    return op;
}

OperatorMatrix build_ta(const WeightedGraph& g, const SupervisionParams& params) {
    const Eigen::VectorXd mu = resolve_vector(params.mu, g.size(), 0.0, "mu");
    Eigen::VectorXd a(g.size());
    for (int i = 0; i < g.size(); ++i) {
        a[i] = 1.0 + params.beta * mu[i];
        if (!(a[i] > 0.0))
            throw PositivityError("1 + beta*mu must stay positive; node " + std::to_string(i) +
                                  " gives " + std::to_string(a[i]));
    }

    // T = L (I + beta diag(mu)): scale the Laplacian columns by a_j.
    OperatorMatrix op;
    op.T = g.laplacian();
    for (int col = 0; col < op.T.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(op.T, col); it; ++it)
            it.valueRef() *= a[col];
    op.X = a;
    op.D = g.degrees();
    op.kind = OperatorKind::TA;
    return op;
}

OperatorMatrix build_tg(const WeightedGraph& g, const SupervisionParams& params) {
    const Eigen::VectorXd a = resolve_vector(params.a, g.size(), 1.0, "a");
    const std::vector<double> ones(static_cast<std::size_t>(g.edge_count()), 1.0);
    OperatorMatrix op = assemble_transport(g, a, ones, OperatorKind::TG);
    return op;
}

OperatorMatrix build_te(const WeightedGraph& g, const SupervisionParams& params) {
    const Eigen::VectorXd a = resolve_vector(params.a, g.size(), 1.0, "a");
    std::vector<double> r = params.r_overlay;
    if (r.empty()) {
        r.assign(static_cast<std::size_t>(g.edge_count()), 1.0);
    } else if (r.size() != static_cast<std::size_t>(g.edge_count())) {
        throw ShapeError("r overlay has " + std::to_string(r.size()) + " values but the graph has " +
                         std::to_string(g.edge_count()) + " edges; r is defined on edges only");
    }
    return assemble_transport(g, a, r, OperatorKind::TE);
}

Eigen::VectorXd eval_nonlinear_transport(const WeightedGraph& g, const Eigen::VectorXd& y,
                                         double beta) {
    if (y.size() != g.size()) throw ShapeError("vector length does not match node count");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
    for (const Edge& e : g.edges()) {
        const double lin = (y[e.i] - y[e.j]) * e.w;
        out[e.i] += lin;
        out[e.j] -= lin;
        const double quad = 0.5 * beta * (y[e.j] * y[e.j] - y[e.i] * y[e.i]) * e.w;
        out[e.i] -= quad;
        out[e.j] += quad;
    }
    return out;
}

Eigen::VectorXd nonlinear_quadratic_term(const WeightedGraph& g, const Eigen::VectorXd& y,
                                         double beta) {
    if (y.size() != g.size()) throw ShapeError("vector length does not match node count");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
    for (const Edge& e : g.edges()) {
        const double quad = 0.5 * beta * (y[e.j] * y[e.j] - y[e.i] * y[e.i]) * e.w;
        out[e.i] -= quad;
        out[e.j] += quad;
    }
    return out;
}

double metric_quadratic_form(const OperatorMatrix& op, const Eigen::VectorXd& y) {
    if (y.size() != op.T.rows()) throw ShapeError("vector length does not match operator size");
    const Eigen::VectorXd ty = op.T * y;
    double form = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) form += y[i] * op.X[i] * ty[i];
    return form;
}

double operator_asymmetry(const OperatorMatrix& op) {
    const Eigen::SparseMatrix<double> xt = op.X.asDiagonal() * op.T;
    const Eigen::SparseMatrix<double> diff = Eigen::SparseMatrix<double>(xt.transpose()) - xt;
    double max_diff = 0.0;
    double max_val = 0.0;
    for (int c = 0; c < xt.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(xt, c); it; ++it)
            max_val = std::max(max_val, std::abs(it.value()));
    for (int c = 0; c < diff.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, c); it; ++it)
            max_diff = std::max(max_diff, std::abs(it.value()));
    if (max_val == 0.0) return 0.0;
    return max_diff / max_val;
}

void save_operator(const std::string& prefix, const OperatorMatrix& op) {
    {
        std::ofstream out(prefix + ".coo");
        if (!out) throw IoError("cannot write '" + prefix + ".coo'");
        out.precision(17);
        for (int c = 0; c < op.T.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(op.T, c); it; ++it)
                out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
    for (const auto& [suffix, diag] : {std::pair{".xdiag", &op.X}, std::pair{".ddiag", &op.D}}) {
        std::ofstream out(prefix + suffix);
        if (!out) throw IoError("cannot write '" + prefix + suffix + "'");
        out.precision(17);
        for (Eigen::Index i = 0; i < diag->size(); ++i) out << (*diag)[i] << '\n';
    }
}

} // namespace te
