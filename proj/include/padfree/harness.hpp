#pragma once

#include <span>
#include <utility>
#include <vector>

#include "padfree/discretization.hpp"
#include "padfree/pde.hpp"

namespace padfree {

/// Offsets shared by both convergence test functions.
inline constexpr double kOffsetX = 0.1453;
inline constexpr double kOffsetY = 0.16401;

struct FieldSample {
    double phi = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double lap = 0.0;
};

/// sin(k pi xh) sin(k pi yh) with shifted coordinates.
FieldSample test_sinusoid(double x, double y, double k = 2.0);

/// exp(-32 pi^4 (xh^4 + yh^4)) with shifted coordinates.
FieldSample test_supergaussian(double x, double y);

struct Velocity {
    double u = 0.0;
    double v = 0.0;
};

/// Diagonal travelling-wave solution of the 2D viscous Burgers equations.
Velocity traveling_wave_exact(double x, double y, double t, double re);

/// u(x, t) for u_t + u u_x = u_xx / Re, u(x, 0) = sin(2 pi x), periodic,
/// via the Cole-Hopf quotient of heat-kernel integrals. Throws
/// std::runtime_error if the quadrature fails to reach tolerance.
double cole_hopf_reference(double x, double t, double re, double tolerance = 1e-10);

/// ||approx - exact|| / ||exact||, or the RMS difference if ||exact|| = 0.
double l2_error(std::span<const double> approx, std::span<const double> exact);

struct CostMetric {
    double mean_neighbors = 0.0;  ///< <N>
    double cost = 0.0;            ///< <N> / s^2
};

/// Mean neighbour count within 2 h_i(p_i) over interior nodes.
CostMetric cost_metric(const NodeSet& nodes, const StencilTable& stencils, const OrderField& orders, double s);
CostMetric cost_metric(const Discretization& disc, double s);

/// sum over interior nodes of rho (u^2 + v^2) s_i^2 / 2. A missing rho field counts as 1.
double kinetic_energy(const FieldState& state, const NodeSet& nodes);

/// Per lattice column, the Y = level crossing nearest the domain mid-height,
/// linearly interpolated between the bracketing nodes.
std::vector<Vec2> extract_interface(const FieldState& state, const NodeSet& nodes, double level = 0.5);

}  // namespace padfree
