#pragma once

#include <cmath>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "padfree/nodes.hpp"
#include "padfree/operators.hpp"
#include "padfree/stencil.hpp"

namespace padfree {

struct AdaptivityConfig {
    double eps_upper = 1e-2;
    double eps_lower = 1e-4;
    int p_min = kMinOrder;
    int p_max = kMaxOrder;
    int order_step = kOrderStep;
    std::vector<std::string> monitored_fields;
    int adapt_interval = 1;

    /// Throws std::invalid_argument when the thresholds or order range are inconsistent.
    void validate() const;
};

/// |L^L(phi)_p - L^L(phi)_{p-dp}| at interior node i.
inline double compute_indicator(std::size_t i, std::span<const double> field, const NodeOperator& op,
                                std::span<const Neighbor> neighbors) {
    const double full = apply_operator(op, Derivative::laplacian, field, neighbors, i);
    const double reduced = apply_reduced_laplacian(op, field, neighbors, i);
    return std::abs(full - reduced);
}

/// Max of the indicator over several monitored fields.
double compute_indicator(std::size_t i, std::span<const std::span<const double>> fields, const NodeOperator& op,
                         std::span<const Neighbor> neighbors);

/// Indicator at every interior node for one field.
std::vector<double> compute_indicators(const NodeSet& nodes, const StencilTable& stencils,
                                       const OperatorWeights& weights, std::span<const double> field);

/// Raises p where eta > eps_upper, lowers it where eta < eps_lower, within
/// [p_min, p_max]. Only interior nodes are touched. Returns the ids whose
/// order changed, ascending.
std::vector<std::size_t> adapt_orders(std::span<const double> eta, OrderField& orders, std::size_t n_interior,
                                      const AdaptivityConfig& cfg);

/// CSV dump with columns id,x,y,p,eta over interior nodes.
void write_orders_csv(std::ostream& out, const NodeSet& nodes, const OrderField& orders,
                      std::span<const double> eta);

}  // namespace padfree
