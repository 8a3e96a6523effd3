#include "padfree/discretization.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace padfree {

Discretization::Discretization(NodeSet node_set, int p_init, int p_min, int p_max, const OperatorOptions& options)
    : nodes(std::move(node_set)) {
    if (p_init < p_min || p_init > p_max) throw std::invalid_argument("initial order outside [p_min, p_max]");
    orders.p_min = p_min;
    orders.p_max = p_max;
    orders.p.assign(nodes.num_interior(), p_init);

    std::vector<double> r_max(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        r_max[i] = nodes.is_interior(i) ? 2.0 * stencil_ratio(p_max) * nodes.s[i] : 0.0;
    }
    stencils = build_stencil_table(nodes, r_max);
    for (std::size_t i : stencils.isolated()) {
        if (nodes.is_interior(i)) {
            throw std::runtime_error("interior node " + std::to_string(i) + " has no neighbours");
        }
    }
    weights = OperatorWeights(nodes, stencils, orders, options);
}

void Discretization::rebuild(std::span<const std::size_t> changed) {
    weights.rebuild(nodes, stencils, orders, changed);
}

double Discretization::min_h() const {
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.num_interior(); ++i) h = std::min(h, orders.h(i, nodes.s[i]));
    return h;
}

double Discretization::mean_neighbors() const {
    if (nodes.num_interior() == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.num_interior(); ++i) sum += static_cast<double>(weights[i].count);
    return sum / static_cast<double>(nodes.num_interior());
}

}  // namespace padfree
