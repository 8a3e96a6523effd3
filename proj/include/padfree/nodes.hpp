#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace padfree {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class NodeKind : std::uint8_t { interior, ghost };

/// How a ghost node obtains its field values.
enum class BoundaryCondition : std::uint8_t {
    none,                ///< interior node
    analytic_dirichlet,  ///< refreshed from an analytic solution every stage
    periodic_wrap,       ///< unused for stored ghosts: periodic edges carry no ghost strip
    far_field_hold,      ///< frozen at its initial value
};

/// Axis-aligned rectangle with optional periodicity per axis.
struct Domain {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;
    bool periodic_x = false;
    bool periodic_y = false;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    bool contains(Vec2 p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }

    static Domain unit_square(bool periodic_x = false, bool periodic_y = false) {
        return Domain{0.0, 1.0, 0.0, 1.0, periodic_x, periodic_y};
    }
};

/// Node distribution. Interior nodes occupy indices [0, num_interior()),
/// ghost nodes follow.
struct NodeSet {
    Domain domain;
    std::vector<Vec2> position;
    std::vector<Vec2> lattice_site;  ///< unperturbed location each node was generated from
    std::vector<double> s;           ///< local resolution scale
    std::vector<NodeKind> kind;
    std::vector<BoundaryCondition> bc;
    std::size_t n_interior = 0;

    std::size_t size() const { return position.size(); }
    std::size_t num_interior() const { return n_interior; }
    std::size_t num_ghost() const { return size() - n_interior; }
    bool is_interior(std::size_t i) const { return i < n_interior; }

    /// r_j - r_i, minimum image on periodic axes.
    Vec2 displacement(std::size_t i, std::size_t j) const;

    void set_ghost_condition(BoundaryCondition c);
};

struct NodeGenerationParams {
    Domain domain = Domain::unit_square();
    double s = 0.1;
    double perturbation = 0.0;  ///< epsilon / s, in [0, 0.5]
    std::uint64_t seed = 1;
    double ghost_width = 0.0;
};

/// Cell-centred lattice of spacing s, each site displaced uniformly within a
/// disc of radius perturbation*s. Ghost strips of ghost_width are populated
/// outside every non-periodic edge with the same spacing and disorder.
/// Throws std::invalid_argument on bad parameters, including a periodic
/// extent that is not an integer multiple of s.
NodeSet generate_nodes(const NodeGenerationParams& params);

/// CSV dump with columns id,x,y,s,kind.
void write_nodes_csv(std::ostream& out, const NodeSet& nodes);

/// Wraps a coordinate difference into [-L/2, L/2].
inline double minimum_image(double d, double extent) {
    if (d > 0.5 * extent) return d - extent * static_cast<double>(static_cast<long long>(d / extent + 0.5));
    if (d < -0.5 * extent) return d + extent * static_cast<double>(static_cast<long long>(-d / extent + 0.5));
    return d;
}

}  // namespace padfree
