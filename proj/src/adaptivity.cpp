#include "padfree/adaptivity.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace padfree {

void AdaptivityConfig::validate() const {
    if (!(eps_lower > 0.0)) throw std::invalid_argument("eps_lower must be positive");
    if (!(eps_upper > eps_lower)) throw std::invalid_argument("eps_upper must exceed eps_lower");
    if (p_min % 2 != 0 || p_max % 2 != 0) throw std::invalid_argument("p_min and p_max must be even");
    if (p_min > p_max) throw std::invalid_argument("p_min must not exceed p_max");
    if (p_min < kMinOrder || p_max > kMaxOrder) throw std::invalid_argument("orders must lie in [4, 8]");
    if (order_step != 2) throw std::invalid_argument("order step must be 2");
    if (adapt_interval < 1) throw std::invalid_argument("adapt_interval must be >= 1");
}

double compute_indicator(std::size_t i, std::span<const std::span<const double>> fields, const NodeOperator& op,
                         std::span<const Neighbor> neighbors) {
    double eta = 0.0;
    for (const auto& f : fields) eta = std::max(eta, compute_indicator(i, f, op, neighbors));
    return eta;
}

std::vector<double> compute_indicators(const NodeSet& nodes, const StencilTable& stencils,
                                       const OperatorWeights& weights, std::span<const double> field) {
    std::vector<double> eta(nodes.num_interior());
    const long n = static_cast<long>(eta.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        eta[i] = compute_indicator(i, field, weights[i], stencils.neighbors(i));
    }
    return eta;
}

std::vector<std::size_t> adapt_orders(std::span<const double> eta, OrderField& orders, std::size_t n_interior,
                                      const AdaptivityConfig& cfg) {
    std::vector<std::size_t> changed;
    for (std::size_t i = 0; i < n_interior; ++i) {
        int& p = orders.p[i];
        if (eta[i] > cfg.eps_upper && p < cfg.p_max) {
            p += cfg.order_step;
            changed.push_back(i);
        } else if (eta[i] < cfg.eps_lower && p > cfg.p_min) {
            p -= cfg.order_step;
            changed.push_back(i);
        }
    }
    return changed;
}

void write_orders_csv(std::ostream& out, const NodeSet& nodes, const OrderField& orders,
                      std::span<const double> eta) {
    out << "id,x,y,p,eta\n" << std::setprecision(17);
    for (std::size_t i = 0; i < nodes.num_interior(); ++i) {
        out << i << ',' << nodes.position[i].x << ',' << nodes.position[i].y << ',' << orders.p[i] << ','
            << (i < eta.size() ? eta[i] : 0.0) << '\n';
    }
}

}  // namespace padfree
