#pragma once

#include <span>
#include <vector>

#include "padfree/nodes.hpp"
#include "padfree/operators.hpp"
#include "padfree/stencil.hpp"

namespace padfree {

/// A node set with its stencils, per-node orders and current weights.
/// Stencils are searched once at 2 h(p_max); lower orders use a prefix.
struct Discretization {
    NodeSet nodes;
    StencilTable stencils;
    OrderField orders;
    OperatorWeights weights;

    Discretization() = default;
    Discretization(NodeSet node_set, int p_init, int p_min, int p_max, const OperatorOptions& options = {});

    /// Rebuilds weights for nodes whose order changed.
    void rebuild(std::span<const std::size_t> changed);

    /// min over interior nodes of h_i(p_i).
    double min_h() const;

    /// Mean neighbour count within 2 h_i(p_i) over interior nodes.
    double mean_neighbors() const;

    std::size_t num_interior() const { return nodes.num_interior(); }
};

}  // namespace padfree
