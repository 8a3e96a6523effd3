#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "padfree/discretization.hpp"

namespace padfree {

/// Named per-node scalar fields plus the simulation time.
class FieldState {
public:
    FieldState() = default;
    FieldState(std::vector<std::string> names, std::size_t num_nodes, double t = 0.0);

    double t = 0.0;

    std::size_t num_fields() const { return names_.size(); }
    std::size_t num_nodes() const { return data_.empty() ? 0 : data_.front().size(); }
    const std::vector<std::string>& names() const { return names_; }

    /// Throws std::out_of_range for unknown names.
    std::size_t index_of(std::string_view name) const;
    bool has(std::string_view name) const;

    std::vector<double>& field(std::size_t k) { return data_[k]; }
    const std::vector<double>& field(std::size_t k) const { return data_[k]; }
    std::vector<double>& operator[](std::string_view name) { return data_[index_of(name)]; }
    const std::vector<double>& operator[](std::string_view name) const { return data_[index_of(name)]; }

    /// this = base + a * delta, field by field (time is left untouched).
    void assign_axpy(const FieldState& base, double a, const FieldState& delta);

    /// True if every value of every field is finite.
    bool all_finite() const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> data_;
};

/// Thrown when a right-hand side produces non-finite values.
class NumericalAbort : public std::runtime_error {
public:
    NumericalAbort(std::size_t node, double t, const std::string& what)
        : std::runtime_error(what + " at node " + std::to_string(node) + ", t=" + std::to_string(t)),
          node_(node),
          time_(t) {}
    std::size_t node() const { return node_; }
    double time() const { return time_; }

private:
    std::size_t node_;
    double time_;
};

/// Optional indicator evaluation fused into a derivative sweep.
struct IndicatorRequest {
    std::vector<std::size_t> fields;  ///< indices into the FieldState
    std::vector<double> eta;          ///< written for interior nodes
};

/// du/dt = -(u.grad)u + lap(u)/Re for u and v; ghost rates are zero.
void burgers_rhs(const FieldState& state, const Discretization& disc, double re, FieldState& rate,
                 IndicatorRequest* indicator = nullptr);

/// min(0.2 h / max|u|, 0.05 h^2 Re).
double burgers_dt(double max_speed, double h_min, double re);
double burgers_dt(const FieldState& state, std::size_t n_interior, double h_min, double re);

struct KhParams {
    double re = 500.0;
    double sc = 8.0;
    double ma = 0.1;
    double at = 0.2;
    double delta = 0.05;

    void validate() const;
};

enum class PressureGradient {
    as_printed,       ///< -grad p_f
    density_weighted  ///< -(1/rho) grad p_f
};

/// Barotropic two-fluid equation of state.
inline double kh_eos(double rho, double y, double ma, double at) {
    return (rho - y - (1.0 - y) * (1.0 - at) / (1.0 + at)) / (ma * ma);
}

/// Fields rho, u, v, Y. Ghost rates are zero.
void kh_rhs(const FieldState& state, const Discretization& disc, const KhParams& params, PressureGradient form,
            FieldState& rate, IndicatorRequest* indicator = nullptr);

/// min{0.1 h / (u_max (1 + 1/Ma)), 0.05 h^2 Re min(1, Sc)}.
double kh_dt(double u_max, double h_min, const KhParams& params);
double kh_dt(const FieldState& state, std::size_t n_interior, double h_min, const KhParams& params);

/// Maximum velocity magnitude over interior nodes.
double max_speed(const FieldState& state, std::size_t n_interior);

struct StageContext {
    int stage = 1;  ///< 1..4
    bool evaluate_indicator = false;
};

using RhsFunction = std::function<void(const FieldState&, FieldState&, const StageContext&)>;
using ClosureFunction = std::function<void(FieldState&)>;

/// Classical four-stage Runge-Kutta. The closure fills ghost values of each
/// stage state at its stage time before the right-hand side is evaluated.
void rk4_step(FieldState& state, double dt, const RhsFunction& rhs, const ClosureFunction& closure = {},
              bool indicator_at_first_stage = false);

/// Snapshot CSV over interior nodes: id,x,y,p followed by the named columns.
void write_snapshot_csv(std::ostream& out, const Discretization& disc, const FieldState& state,
                        std::span<const std::string> columns);

}  // namespace padfree
