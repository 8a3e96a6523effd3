#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "padfree/nodes.hpp"
#include "padfree/stencil.hpp"

namespace padfree {

/// Size of the consistency basis of order p (degrees 1..p, no constant).
constexpr int basis_size(int p) { return (p * p + 3 * p) / 2; }

/// Stencil length scale over node spacing for each supported order.
/// Order 2 only ever appears as the reduced operator of p = 4.
double stencil_ratio(int p);

inline constexpr int kMinOrder = 4;
inline constexpr int kMaxOrder = 8;
inline constexpr int kOrderStep = 2;

struct MultiIndex {
    int x;
    int y;
};

/// Multi-indices ordered by total degree, then by descending x exponent.
std::vector<MultiIndex> basis_indices(int p);

enum class HermiteKind { physicists, probabilists };

/// H_a(x) by the three-term recurrence.
double hermite_eval(int a, double x, HermiteKind kind = HermiteKind::physicists);

/// Wendland C2 kernel with support q in [0, 2].
double wendland_c2(double q);

/// x^a y^b / (a! b!) over basis_indices(p).
std::vector<double> monomial_vector(double dx, double dy, int p);

/// Anisotropic basis functions: kernel times a product of Hermite polynomials.
std::vector<double> abf_vector(double dx, double dy, double h, int p,
                               HermiteKind kind = HermiteKind::physicists);

enum class Derivative : std::uint8_t { x, y, laplacian };

/// C^d: unit entries in the basis slots of the requested derivative.
Eigen::VectorXd derivative_selector(Derivative d, int p);

class SingularMomentMatrix : public std::runtime_error {
public:
    SingularMomentMatrix(std::size_t node, int order, const std::string& why)
        : std::runtime_error("moment matrix singular at node " + std::to_string(node) + " (p=" +
                             std::to_string(order) + "): " + why),
          node_(node) {}
    std::size_t node() const { return node_; }

private:
    std::size_t node_;
};

/// M = sum_j X_ji (outer) W_ji over neighbours with distance <= 2h. Rows
/// index monomials, columns index basis functions.
Eigen::MatrixXd assemble_moment_matrix(std::span<const Neighbor> neighbors, double h, int p,
                                       HermiteKind kind = HermiteKind::physicists);

/// Weights of one node at its current order, plus the reduced-order
/// Laplacian used by the refinement indicator.
struct NodeOperator {
    int order = 0;
    double h = 0.0;
    std::uint32_t count = 0;
    std::vector<double> wx, wy, wl;

    int reduced_order = 0;
    double reduced_h = 0.0;
    std::uint32_t reduced_count = 0;
    std::vector<double> wl_reduced;
};

struct OperatorOptions {
    HermiteKind hermite = HermiteKind::physicists;
    double pivot_tolerance = 1e-12;
    int order_step = kOrderStep;
};

/// Solves M Psi = C^d for d in {x, y, L} at order p with one LU factorisation,
/// then the Laplacian alone at order p - order_step with its own smaller
/// stencil. neighbors must be distance-sorted and reach 2h(p).
NodeOperator build_node_operators(std::size_t node, int p, double s, std::span<const Neighbor> neighbors,
                                  const OperatorOptions& options = {});

/// Sum_j (phi_j - phi_i) w_ji for one selector.
double apply_operator(const NodeOperator& op, Derivative d, std::span<const double> field,
                      std::span<const Neighbor> neighbors, std::size_t i);

/// Reduced-order Laplacian at node i.
double apply_reduced_laplacian(const NodeOperator& op, std::span<const double> field,
                               std::span<const Neighbor> neighbors, std::size_t i);

struct NodeDerivatives {
    double dx = 0.0;
    double dy = 0.0;
    double lap = 0.0;
};

/// Gradient and Laplacian in a single stencil pass.
inline NodeDerivatives apply_all(const NodeOperator& op, std::span<const double> field,
                                 std::span<const Neighbor> neighbors, std::size_t i) {
    NodeDerivatives out;
    const double fi = field[i];
    for (std::uint32_t k = 0; k < op.count; ++k) {
        const double d = field[neighbors[k].index] - fi;
        out.dx += d * op.wx[k];
        out.dy += d * op.wy[k];
        out.lap += d * op.wl[k];
    }
    return out;
}

/// Per-node polynomial orders.
struct OrderField {
    std::vector<int> p;
    int p_min = kMinOrder;
    int p_max = kMaxOrder;

    double h(std::size_t i, double s) const { return stencil_ratio(p[i]) * s; }
};

/// Operator weights for all interior nodes of a node set.
class OperatorWeights {
public:
    OperatorWeights() = default;

    /// Builds every interior node at orders.p[i].
    OperatorWeights(const NodeSet& nodes, const StencilTable& stencils, const OrderField& orders,
                    const OperatorOptions& options = {});

    /// Rebuilds the listed nodes at their current order.
    void rebuild(const NodeSet& nodes, const StencilTable& stencils, const OrderField& orders,
                 std::span<const std::size_t> changed);

    const NodeOperator& operator[](std::size_t i) const { return nodes_[i]; }
    std::size_t size() const { return nodes_.size(); }
    const OperatorOptions& options() const { return options_; }

private:
    std::vector<NodeOperator> nodes_;
    OperatorOptions options_;
};

}  // namespace padfree
