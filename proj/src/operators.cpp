#include "padfree/operators.hpp"

#include <cmath>
#include <exception>

namespace padfree {

double stencil_ratio(int p) {
    switch (p) {
        case 2: return 1.0;
        case 4: return 1.4;
        case 6: return 1.8;
        case 8: return 2.3;
        default: throw std::invalid_argument("unsupported polynomial order " + std::to_string(p));
    }
}

std::vector<MultiIndex> basis_indices(int p) {
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(basis_size(p)));
    for (int degree = 1; degree <= p; ++degree) {
        for (int a = degree; a >= 0; --a) out.push_back({a, degree - a});
    }
    return out;
}

double hermite_eval(int a, double x, HermiteKind kind) {
    // Physicists: H_{k+1} = 2x H_k - 2k H_{k-1}; probabilists: He_{k+1} = x He_k - k He_{k-1}.
    const double c = kind == HermiteKind::physicists ? 2.0 : 1.0;
    if (a == 0) return 1.0;
    double prev = 1.0;
    double cur = c * x;
    for (int k = 1; k < a; ++k) {
        const double next = c * x * cur - c * static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double wendland_c2(double q) {
    if (q >= 2.0) return 0.0;
    const double t = 1.0 - 0.5 * q;
    const double t2 = t * t;
    return t2 * t2 * (1.0 + 2.0 * q);
}

namespace {

constexpr std::array<double, 11> kFactorial = {1.0,   1.0,    2.0,     6.0,      24.0,     120.0,
                                               720.0, 5040.0, 40320.0, 362880.0, 3628800.0};

void monomials_into(double dx, double dy, int p, double* out) {
    std::array<double, 11> px{}, py{};
    px[0] = py[0] = 1.0;
    for (int k = 1; k <= p; ++k) {
        px[k] = px[k - 1] * dx;
        py[k] = py[k - 1] * dy;
    }
    int n = 0;
    for (int degree = 1; degree <= p; ++degree) {
        for (int a = degree; a >= 0; --a) {
            const int b = degree - a;
            out[n++] = px[a] * py[b] / (kFactorial[a] * kFactorial[b]);
        }
    }
}

void abf_into(double dx, double dy, double h, int p, HermiteKind kind, double* out) {
    const double q = std::hypot(dx, dy) / h;
    const double psi = wendland_c2(q);
    const double scale = 1.0 / (h * std::sqrt(2.0));
    std::array<double, 11> hx{}, hy{};
    for (int k = 0; k <= p; ++k) {
        hx[k] = hermite_eval(k, dx * scale, kind);
        hy[k] = hermite_eval(k, dy * scale, kind);
    }
    int n = 0;
    for (int degree = 1; degree <= p; ++degree) {
        const double norm = psi / std::sqrt(std::ldexp(1.0, degree));
        for (int a = degree; a >= 0; --a) out[n++] = norm * hx[a] * hy[degree - a];
    }
}

}  // namespace

std::vector<double> monomial_vector(double dx, double dy, int p) {
    std::vector<double> out(static_cast<std::size_t>(basis_size(p)));
    monomials_into(dx, dy, p, out.data());
    return out;
}

std::vector<double> abf_vector(double dx, double dy, double h, int p, HermiteKind kind) {
    if (!(h > 0.0)) throw std::invalid_argument("abf_vector: h must be positive");
    std::vector<double> out(static_cast<std::size_t>(basis_size(p)));
    abf_into(dx, dy, h, p, kind, out.data());
    return out;
}

Eigen::VectorXd derivative_selector(Derivative d, int p) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis_size(p));
    switch (d) {
        case Derivative::x: c(0) = 1.0; break;
        case Derivative::y: c(1) = 1.0; break;
        case Derivative::laplacian:
            c(2) = 1.0;
            c(4) = 1.0;
            break;
    }
    return c;
}

Eigen::MatrixXd assemble_moment_matrix(std::span<const Neighbor> neighbors, double h, int p, HermiteKind kind) {
    const int n = basis_size(p);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd x(n), w(n);
    for (const Neighbor& nb : neighbors) {
        if (nb.distance > 2.0 * h) break;
        monomials_into(nb.dx, nb.dy, p, x.data());
        abf_into(nb.dx, nb.dy, h, p, kind, w.data());
        m.noalias() += x * w.transpose();
    }
    return m;
}

namespace {

struct SolvedOrder {
    std::uint32_t count = 0;
    Eigen::MatrixXd weights;  // count x (number of selectors)
};

// Works in h-scaled coordinates: monomials of r/h give a moment matrix of
// order one entries, and the selector is divided by h^l for an l-th
// derivative. The resulting weights are identical to the unscaled system.
SolvedOrder solve_order(std::size_t node, int p, double h, std::span<const Neighbor> neighbors,
                        std::span<const Derivative> selectors, const OperatorOptions& options) {
    const int n = basis_size(p);
    std::size_t count = 0;
    while (count < neighbors.size() && neighbors[count].distance <= 2.0 * h) ++count;
    if (count < static_cast<std::size_t>(n)) {
        throw SingularMomentMatrix(node, p, std::to_string(count) + " neighbours within 2h, need at least " +
                                                std::to_string(n));
    }

    Eigen::MatrixXd abf(n, static_cast<Eigen::Index>(count));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd x(n);
    for (std::size_t k = 0; k < count; ++k) {
        const Neighbor& nb = neighbors[k];
        monomials_into(nb.dx / h, nb.dy / h, p, x.data());
        abf_into(nb.dx, nb.dy, h, p, options.hermite, abf.col(static_cast<Eigen::Index>(k)).data());
        m.noalias() += x * abf.col(static_cast<Eigen::Index>(k)).transpose();
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    const double max_pivot = diag.maxCoeff();
    const double min_pivot = diag.minCoeff();
    if (!(min_pivot > options.pivot_tolerance * max_pivot)) {
        throw SingularMomentMatrix(node, p, "pivot ratio " + std::to_string(min_pivot / max_pivot));
    }

    Eigen::MatrixXd rhs(n, static_cast<Eigen::Index>(selectors.size()));
    for (std::size_t c = 0; c < selectors.size(); ++c) {
        const double scale = selectors[c] == Derivative::laplacian ? 1.0 / (h * h) : 1.0 / h;
        rhs.col(static_cast<Eigen::Index>(c)) = derivative_selector(selectors[c], p) * scale;
    }
    const Eigen::MatrixXd psi = lu.solve(rhs);
    SolvedOrder out;
    out.count = static_cast<std::uint32_t>(count);
    out.weights = abf.transpose() * psi;
    if (!out.weights.allFinite()) throw SingularMomentMatrix(node, p, "non-finite weights");
    return out;
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
    return std::vector<double>(m.col(c).data(), m.col(c).data() + m.rows());
}

}  // namespace

NodeOperator build_node_operators(std::size_t node, int p, double s, std::span<const Neighbor> neighbors,
                                  const OperatorOptions& options) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("order must be even and >= 2");
    NodeOperator op;
    op.order = p;
    op.h = stencil_ratio(p) * s;
    constexpr std::array<Derivative, 3> all{Derivative::x, Derivative::y, Derivative::laplacian};
    const SolvedOrder full = solve_order(node, p, op.h, neighbors, all, options);
    op.count = full.count;
    op.wx = column(full.weights, 0);
    op.wy = column(full.weights, 1);
    op.wl = column(full.weights, 2);

    op.reduced_order = p - options.order_step;
    if (op.reduced_order >= 2) {
        op.reduced_h = stencil_ratio(op.reduced_order) * s;
        // Same right-hand side layout as a standalone solve, so the weights
        // match a fixed-order operator of that order bit for bit.
        const SolvedOrder reduced = solve_order(node, op.reduced_order, op.reduced_h, neighbors, all, options);
        op.reduced_count = reduced.count;
        op.wl_reduced = column(reduced.weights, 2);
    }
    return op;
}

double apply_operator(const NodeOperator& op, Derivative d, std::span<const double> field,
                      std::span<const Neighbor> neighbors, std::size_t i) {
    const std::vector<double>& w = d == Derivative::x ? op.wx : d == Derivative::y ? op.wy : op.wl;
    const double fi = field[i];
    double sum = 0.0;
    for (std::uint32_t k = 0; k < op.count; ++k) sum += (field[neighbors[k].index] - fi) * w[k];
    return sum;
}

double apply_reduced_laplacian(const NodeOperator& op, std::span<const double> field,
                               std::span<const Neighbor> neighbors, std::size_t i) {
    const double fi = field[i];
    double sum = 0.0;
    for (std::uint32_t k = 0; k < op.reduced_count; ++k) sum += (field[neighbors[k].index] - fi) * op.wl_reduced[k];
    return sum;
}

OperatorWeights::OperatorWeights(const NodeSet& nodes, const StencilTable& stencils, const OrderField& orders,
                                 const OperatorOptions& options)
    : nodes_(nodes.num_interior()), options_(options) {
    std::vector<std::size_t> all(nodes.num_interior());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    rebuild(nodes, stencils, orders, all);
}

void OperatorWeights::rebuild(const NodeSet& nodes, const StencilTable& stencils, const OrderField& orders,
                              std::span<const std::size_t> changed) {
    const long n = static_cast<long>(changed.size());
    // Report the failing node with the smallest id so the error is
    // independent of the thread count.
    std::exception_ptr failure;
    std::size_t failed_node = nodes.size();
#pragma omp parallel for schedule(dynamic, 64)
    for (long k = 0; k < n; ++k) {
        const std::size_t i = changed[static_cast<std::size_t>(k)];
        try {
            nodes_[i] = build_node_operators(i, orders.p[i], nodes.s[i], stencils.neighbors(i), options_);
        } catch (...) {
#pragma omp critical(padfree_weight_failure)
            {
                if (i < failed_node) {
                    failed_node = i;
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace padfree
