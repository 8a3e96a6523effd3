#include "padfree/pde.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace padfree {

FieldState::FieldState(std::vector<std::string> names, std::size_t num_nodes, double time)
    : t(time), names_(std::move(names)), data_(names_.size(), std::vector<double>(num_nodes, 0.0)) {}

std::size_t FieldState::index_of(std::string_view name) const {
    for (std::size_t k = 0; k < names_.size(); ++k) {
        if (names_[k] == name) return k;
    }
    throw std::out_of_range("no field named '" + std::string(name) + "'");
}

bool FieldState::has(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

void FieldState::assign_axpy(const FieldState& base, double a, const FieldState& delta) {
    if (names_ != base.names_) {
        names_ = base.names_;
        data_.assign(base.data_.size(), {});
    }
    for (std::size_t k = 0; k < data_.size(); ++k) {
        const auto& b = base.data_[k];
        const auto& d = delta.data_[k];
        auto& out = data_[k];
        out.resize(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i] + a * d[i];
    }
}

bool FieldState::all_finite() const {
    for (const auto& f : data_) {
        for (double v : f) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

namespace {

// Smallest failing node id, so the diagnostic does not depend on threading.
struct FailureSlot {
    std::size_t node = std::numeric_limits<std::size_t>::max();
    void record(std::size_t i) {
#pragma omp critical(padfree_rhs_failure)
        node = std::min(node, i);
    }
    bool failed() const { return node != std::numeric_limits<std::size_t>::max(); }
};

void prepare_rate(const FieldState& state, FieldState& rate) {
    if (rate.names() != state.names() || rate.num_nodes() != state.num_nodes()) {
        rate = FieldState(state.names(), state.num_nodes(), state.t);
    }
    rate.t = state.t;
}

void prepare_indicator(IndicatorRequest* indicator, std::size_t n) {
    if (indicator != nullptr) indicator->eta.assign(n, 0.0);
}

double indicator_at(const IndicatorRequest& req, const FieldState& state, const NodeOperator& op,
                    std::span<const Neighbor> nbrs, std::size_t i) {
    double eta = 0.0;
    for (std::size_t f : req.fields) {
        const auto& field = state.field(f);
        const double full = apply_operator(op, Derivative::laplacian, field, nbrs, i);
        const double reduced = apply_reduced_laplacian(op, field, nbrs, i);
        eta = std::max(eta, std::abs(full - reduced));
    }
    return eta;
}

}  // namespace

void burgers_rhs(const FieldState& state, const Discretization& disc, double re, FieldState& rate,
                 IndicatorRequest* indicator) {
    prepare_rate(state, rate);
    const std::size_t n = disc.num_interior();
    prepare_indicator(indicator, n);
    const std::vector<double>& u = state["u"];
    const std::vector<double>& v = state["v"];
    std::vector<double>& du = rate["u"];
    std::vector<double>& dv = rate["v"];
    std::fill(du.begin() + static_cast<long>(n), du.end(), 0.0);
    std::fill(dv.begin() + static_cast<long>(n), dv.end(), 0.0);
    const double nu = 1.0 / re;

    FailureSlot failure;
#pragma omp parallel for schedule(static)
    for (long k = 0; k < static_cast<long>(n); ++k) {
        const auto i = static_cast<std::size_t>(k);
        const NodeOperator& op = disc.weights[i];
        const auto nbrs = disc.stencils.neighbors(i);
        const NodeDerivatives gu = apply_all(op, u, nbrs, i);
        const NodeDerivatives gv = apply_all(op, v, nbrs, i);
        du[i] = -(u[i] * gu.dx + v[i] * gu.dy) + nu * gu.lap;
        dv[i] = -(u[i] * gv.dx + v[i] * gv.dy) + nu * gv.lap;
        if (!std::isfinite(du[i]) || !std::isfinite(dv[i])) failure.record(i);
        if (indicator != nullptr) indicator->eta[i] = indicator_at(*indicator, state, op, nbrs, i);
    }
    if (failure.failed()) throw NumericalAbort(failure.node, state.t, "non-finite Burgers right-hand side");
}

double burgers_dt(double max_speed, double h_min, double re) {
    const double diffusive = 0.05 * h_min * h_min * re;
    if (!(max_speed > 0.0)) return diffusive;
    return std::min(0.2 * h_min / max_speed, diffusive);
}

double max_speed(const FieldState& state, std::size_t n_interior) {
    const auto& u = state["u"];
    const auto& v = state["v"];
    double m = 0.0;
    for (std::size_t i = 0; i < n_interior; ++i) m = std::max(m, std::hypot(u[i], v[i]));
    return m;
}

double burgers_dt(const FieldState& state, std::size_t n_interior, double h_min, double re) {
    return burgers_dt(max_speed(state, n_interior), h_min, re);
}

void KhParams::validate() const {
    if (!(re > 0.0)) throw std::invalid_argument("Re must be positive");
    if (!(sc > 0.0)) throw std::invalid_argument("Sc must be positive");
    if (!(ma > 0.0 && ma < 1.0)) throw std::invalid_argument("Ma must lie in (0, 1)");
    if (!(at >= 0.0 && at < 1.0)) throw std::invalid_argument("At must lie in [0, 1)");
}

void kh_rhs(const FieldState& state, const Discretization& disc, const KhParams& params, PressureGradient form,
            FieldState& rate, IndicatorRequest* indicator) {
    prepare_rate(state, rate);
    const std::size_t n = disc.num_interior();
    const std::size_t total = state.num_nodes();
    prepare_indicator(indicator, n);
    const auto& rho = state["rho"];
    const auto& u = state["u"];
    const auto& v = state["v"];
    const auto& y = state["Y"];
    auto& drho = rate["rho"];
    auto& du = rate["u"];
    auto& dv = rate["v"];
    auto& dy = rate["Y"];
    for (auto* f : {&drho, &du, &dv, &dy}) std::fill(f->begin() + static_cast<long>(n), f->end(), 0.0);

    std::vector<double> pf(total);
    for (std::size_t i = 0; i < total; ++i) pf[i] = kh_eos(rho[i], y[i], params.ma, params.at);

    const double nu = 1.0 / params.re;
    const double kappa = 1.0 / (params.re * params.sc);
    FailureSlot failure;
#pragma omp parallel for schedule(static)
    for (long k = 0; k < static_cast<long>(n); ++k) {
        const auto i = static_cast<std::size_t>(k);
        const NodeOperator& op = disc.weights[i];
        const auto nbrs = disc.stencils.neighbors(i);
        const NodeDerivatives gr = apply_all(op, rho, nbrs, i);
        const NodeDerivatives gu = apply_all(op, u, nbrs, i);
        const NodeDerivatives gv = apply_all(op, v, nbrs, i);
        const NodeDerivatives gy = apply_all(op, y, nbrs, i);
        const NodeDerivatives gp = apply_all(op, pf, nbrs, i);
        const double div = gu.dx + gv.dy;
        const double pscale = form == PressureGradient::as_printed ? 1.0 : 1.0 / rho[i];
        drho[i] = -(u[i] * gr.dx + v[i] * gr.dy) - rho[i] * div;
        du[i] = -(u[i] * gu.dx + v[i] * gu.dy) - pscale * gp.dx + nu * gu.lap;
        dv[i] = -(u[i] * gv.dx + v[i] * gv.dy) - pscale * gp.dy + nu * gv.lap;
        dy[i] = -(u[i] * gy.dx + v[i] * gy.dy) + kappa * gy.lap;
        if (!std::isfinite(drho[i]) || !std::isfinite(du[i]) || !std::isfinite(dv[i]) || !std::isfinite(dy[i])) {
            failure.record(i);
        }
        if (indicator != nullptr) indicator->eta[i] = indicator_at(*indicator, state, op, nbrs, i);
    }
    if (failure.failed()) throw NumericalAbort(failure.node, state.t, "non-finite Kelvin-Helmholtz right-hand side");
}

double kh_dt(double u_max, double h_min, const KhParams& params) {
    const double diffusive = 0.05 * h_min * h_min * params.re * std::min(1.0, params.sc);
    if (!(u_max > 0.0)) return diffusive;
    return std::min(0.1 * h_min / (u_max * (1.0 + 1.0 / params.ma)), diffusive);
}

double kh_dt(const FieldState& state, std::size_t n_interior, double h_min, const KhParams& params) {
    return kh_dt(max_speed(state, n_interior), h_min, params);
}

void rk4_step(FieldState& state, double dt, const RhsFunction& rhs, const ClosureFunction& closure,
              bool indicator_at_first_stage) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    const double t0 = state.t;
    FieldState k1, k2, k3, k4, stage;

    if (closure) closure(state);
    rhs(state, k1, StageContext{1, indicator_at_first_stage});

    stage.assign_axpy(state, 0.5 * dt, k1);
    stage.t = t0 + 0.5 * dt;
    if (closure) closure(stage);
    rhs(stage, k2, StageContext{2, false});

    stage.assign_axpy(state, 0.5 * dt, k2);
    stage.t = t0 + 0.5 * dt;
    if (closure) closure(stage);
    rhs(stage, k3, StageContext{3, false});

    stage.assign_axpy(state, dt, k3);
    stage.t = t0 + dt;
    if (closure) closure(stage);
    rhs(stage, k4, StageContext{4, false});

    const double c = dt / 6.0;
    for (std::size_t f = 0; f < state.num_fields(); ++f) {
        auto& out = state.field(f);
        const auto& a = k1.field(f);
        const auto& b = k2.field(f);
        const auto& d = k3.field(f);
        const auto& e = k4.field(f);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * (a[i] + 2.0 * b[i] + 2.0 * d[i] + e[i]);
    }
    state.t = t0 + dt;
    if (closure) closure(state);
}

void write_snapshot_csv(std::ostream& out, const Discretization& disc, const FieldState& state,
                        std::span<const std::string> columns) {
    out << "id,x,y,p";
    for (const auto& c : columns) out << ',' << c;
    out << '\n' << std::setprecision(17);
    std::vector<const std::vector<double>*> src;
    for (const auto& c : columns) src.push_back(&state[c]);
    for (std::size_t i = 0; i < disc.num_interior(); ++i) {
        const Vec2 p = disc.nodes.position[i];
        out << i << ',' << p.x << ',' << p.y << ',' << disc.orders.p[i];
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << ',' << (*src[c])[i];
        }
        out << '\n';
    }
}

}  // namespace padfree
