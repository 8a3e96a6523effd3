#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "padfree/nodes.hpp"

namespace padfree {

struct Neighbor {
    std::uint32_t index;
    double dx;  ///< x_j - x_i
    double dy;  ///< y_j - y_i
    double distance;
};

/// Fixed-radius neighbour lists in CSR layout, each list sorted by ascending
/// distance so that a smaller radius selects a prefix.
class StencilTable {
public:
    StencilTable() = default;

    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

    std::span<const Neighbor> neighbors(std::size_t i) const {
        return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    /// Number of neighbours of i with distance <= radius.
    std::size_t count_within(std::size_t i, double radius) const;

    double radius(std::size_t i) const { return radius_[i]; }

    /// Nodes for which the query found no neighbour at all.
    const std::vector<std::size_t>& isolated() const { return isolated_; }

    friend StencilTable build_stencil_table(const NodeSet&, std::span<const double>);
    friend StencilTable build_stencil_table_brute_force(const NodeSet&, std::span<const double>);

private:
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> entries_;
    std::vector<double> radius_;
    std::vector<std::size_t> isolated_;

    void finish_node(std::vector<Neighbor>& list, std::size_t i);
};

/// Uniform-cell binned radius query: node j is listed for i iff j != i and
/// |r_j - r_i| <= r_max[i]. Nodes with r_max[i] <= 0 get empty lists.
StencilTable build_stencil_table(const NodeSet& nodes, std::span<const double> r_max);

/// O(N^2) reference query with identical semantics.
StencilTable build_stencil_table_brute_force(const NodeSet& nodes, std::span<const double> r_max);

}  // namespace padfree
