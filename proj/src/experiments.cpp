#include "padfree/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <optional>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "padfree/adaptivity.hpp"
#include "padfree/discretization.hpp"
#include "padfree/harness.hpp"
#include "padfree/nodes.hpp"
#include "padfree/pde.hpp"

namespace padfree {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", t);
    return buf;
}

class OutputDir {
public:
    OutputDir(const RunConfig& cfg, bool enabled) : cfg_(cfg), enabled_(enabled) {
        if (!enabled_) return;
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        if (ec) throw std::runtime_error("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
    }

    bool enabled() const { return enabled_; }

    /// Opens a file in the output directory with the config header written;
    /// extra lines are appended to the header.
    std::ofstream open(const std::string& name, const std::vector<std::string>& extra = {}) const {
        const auto path = std::filesystem::path(cfg_.out_dir) / name;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out << "# padfree " << case_name(cfg_.case_id) << '\n';
        for (const auto& [k, v] : cfg_.to_key_values()) {
            if (k != "out_dir") out << "# " << k << " = " << v << '\n';
        }
        for (const auto& line : extra) out << "# " << line << '\n';
        out << std::setprecision(17);
        return out;
    }

private:
    const RunConfig& cfg_;
    bool enabled_;
};

double ghost_width_for(const RunConfig& cfg, double s) {
    return 2.0 * stencil_ratio(std::max(cfg.p_max, cfg.uniform_p)) * s;
}

Discretization make_discretization(const RunConfig& cfg, NodeSet nodes) {
    const int p0 = cfg.initial_order();
    if (cfg.adapting()) return Discretization(std::move(nodes), p0, cfg.p_min, cfg.p_max);
    return Discretization(std::move(nodes), p0, p0, p0);
}

// ---------------------------------------------------------------- convergence

ExperimentReport run_convergence(const RunConfig& cfg, const OutputDir& out) {
    ExperimentReport report;
    report.case_id = cfg.case_id;
    const AdaptivityConfig acfg = cfg.adaptivity();
    auto sample = [&](double x, double y) {
        return cfg.test_function == TestFunction::sinusoid ? test_sinusoid(x, y, cfg.wavenumber)
                                                           : test_supergaussian(x, y);
    };

    for (double s : cfg.resolutions) {
        const auto start = Clock::now();
        NodeGenerationParams g;
        g.domain = Domain::unit_square();
        g.s = s;
        g.perturbation = cfg.perturbation;
        g.seed = cfg.seed;
        g.ghost_width = ghost_width_for(cfg, s);
        Discretization disc = make_discretization(cfg, generate_nodes(g));

        const std::size_t n = disc.num_interior();
        std::vector<double> phi(disc.nodes.size());
        std::vector<FieldSample> exact(n);
        for (std::size_t i = 0; i < disc.nodes.size(); ++i) {
            const FieldSample f = sample(disc.nodes.position[i].x, disc.nodes.position[i].y);
            phi[i] = f.phi;
            if (i < n) exact[i] = f;
        }

        std::vector<double> eta = compute_indicators(disc.nodes, disc.stencils, disc.weights, phi);
        if (cfg.adapting()) {
            const auto changed = adapt_orders(eta, disc.orders, n, acfg);
            disc.rebuild(changed);
            eta = compute_indicators(disc.nodes, disc.stencils, disc.weights, phi);
        }

        std::vector<double> lap(n), gx(n), gy(n), lap_ex(n), gx_ex(n), gy_ex(n);
        for (std::size_t i = 0; i < n; ++i) {
            const NodeDerivatives d = apply_all(disc.weights[i], phi, disc.stencils.neighbors(i), i);
            lap[i] = d.lap;
            gx[i] = d.dx;
            gy[i] = d.dy;
            lap_ex[i] = exact[i].lap;
            gx_ex[i] = exact[i].dx;
            gy_ex[i] = exact[i].dy;
        }
        const CostMetric cost = cost_metric(disc, s);
        ConvergenceRow row{s, l2_error(lap, lap_ex), l2_error(gx, gx_ex), l2_error(gy, gy_ex),
                           cost.mean_neighbors, cost.cost, 0.0};
        row.wall_seconds = seconds_since(start);
        report.convergence.push_back(row);

        if (out.enabled()) {
            char name[64];
            std::snprintf(name, sizeof(name), "orders_s%.6f.csv", s);
            auto f = out.open(name, {"s = " + std::to_string(s)});
            write_orders_csv(f, disc.nodes, disc.orders, eta);
        }
    }

    if (out.enabled()) {
        auto f = out.open("convergence.csv");
        f << "s,err_lap,err_gradx,err_grady,avgN,cost\n";
        for (const auto& r : report.convergence) {
            f << r.s << ',' << r.err_lap << ',' << r.err_gradx << ',' << r.err_grady << ',' << r.avg_n << ','
              << r.cost << '\n';
        }
    }
    return report;
}

// ---------------------------------------------------------------- time loop

struct TimeDependentCase {
    Discretization disc;
    FieldState state;
    std::function<void(const FieldState&, FieldState&, IndicatorRequest*)> rhs;
    ClosureFunction closure;
    std::function<double(const FieldState&)> dt;
    std::function<double(const FieldState&)> sample;  ///< timeseries value
    std::function<void(const FieldState&, double)> snapshot;
    std::function<void(const FieldState&)> observe;   ///< called after every step
};

std::vector<double> output_times(const RunConfig& cfg) {
    std::vector<double> times;
    for (long k = 0;; ++k) {
        const double t = static_cast<double>(k) * cfg.output_interval;
        if (t >= cfg.t_end - 1e-12 * std::max(1.0, cfg.t_end)) break;
        times.push_back(t);
    }
    times.push_back(cfg.t_end);
    times.insert(times.end(), cfg.snapshot_times.begin(), cfg.snapshot_times.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
                times.end());
    return times;
}

bool is_snapshot_time(const RunConfig& cfg, double t) {
    const double tol = 1e-12 * std::max(1.0, std::abs(t));
    if (cfg.snapshot_times.empty()) return std::abs(t - cfg.t_end) <= tol;
    return std::any_of(cfg.snapshot_times.begin(), cfg.snapshot_times.end(),
                       [&](double s) { return std::abs(s - t) <= tol; });
}

double max_abs_interior(const FieldState& state, std::size_t n) {
    double m = 0.0;
    for (std::size_t f = 0; f < state.num_fields(); ++f) {
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(state.field(f)[i]));
    }
    return m;
}

std::optional<std::size_t> first_non_finite(const FieldState& state) {
    std::optional<std::size_t> out;
    for (std::size_t f = 0; f < state.num_fields(); ++f) {
        const auto& v = state.field(f);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i])) {
                if (!out || i < *out) out = i;
                break;
            }
        }
    }
    return out;
}

void write_orders(const OutputDir& out, const Discretization& disc, const std::vector<double>& eta, double t) {
    if (!out.enabled()) return;
    auto f = out.open("orders_t" + time_tag(t) + ".csv", {"t = " + time_tag(t)});
    std::vector<double> e = eta;
    e.resize(disc.num_interior(), 0.0);
    write_orders_csv(f, disc.nodes, disc.orders, e);
}

void run_time_loop(const RunConfig& cfg, TimeDependentCase& c, const OutputDir& out, ExperimentReport& report) {
    const AdaptivityConfig acfg = cfg.adaptivity();
    IndicatorRequest request;
    for (const auto& name : acfg.monitored_fields) request.fields.push_back(c.state.index_of(name));
    request.eta.assign(c.disc.num_interior(), 0.0);

    const RhsFunction rhs = [&](const FieldState& s, FieldState& rate, const StageContext& ctx) {
        c.rhs(s, rate, ctx.evaluate_indicator ? &request : nullptr);
    };

    const auto times = output_times(cfg);
    std::size_t next = 0;
    auto emit = [&](double t) {
        report.timeseries.push_back({t, c.sample(c.state), c.disc.mean_neighbors()});
        report.max_abs_value = max_abs_interior(c.state, c.disc.num_interior());
        if (is_snapshot_time(cfg, t)) {
            c.snapshot(c.state, t);
            write_orders(out, c.disc, request.eta, t);
        }
    };

    if (c.closure) c.closure(c.state);
    if (c.observe) c.observe(c.state);
    emit(0.0);
    ++next;

    double weighted_n = 0.0;
    double elapsed = 0.0;
    std::size_t step = 0;
    try {
        while (next < times.size()) {
            const double target = times[next];
            double dt = c.dt(c.state);
            bool lands = false;
            if (c.state.t + dt >= target - 1e-12 * std::max(1.0, target)) {
                dt = target - c.state.t;
                lands = true;
            }
            const bool adapt_now = cfg.adapting() && step % static_cast<std::size_t>(acfg.adapt_interval) == 0;
            const double avg_n = c.disc.mean_neighbors();
            rk4_step(c.state, dt, rhs, c.closure, adapt_now);
            if (lands) c.state.t = target;
            ++step;
            weighted_n += avg_n * dt;
            elapsed += dt;
            if (const auto bad = first_non_finite(c.state)) {
                throw NumericalAbort(*bad, c.state.t, "non-finite state after update");
            }
            if (c.observe) c.observe(c.state);
            if (adapt_now) {
                const auto changed = adapt_orders(request.eta, c.disc.orders, c.disc.num_interior(), acfg);
                c.disc.rebuild(changed);
            }
            if (lands) {
                emit(target);
                ++next;
            }
        }
    } catch (const NumericalAbort& e) {
        report.aborted = true;
        report.abort_reason = e.what();
        report.abort_time = e.time();
        report.abort_node = e.node();
        if (out.enabled()) {
            auto f = out.open("abort.txt");
            f << "numerical abort\n" << e.what() << "\nnode " << e.node() << "\ntime " << e.time() << "\nsteps "
              << step << '\n';
        }
    }
    report.steps = step;
    report.final_time = c.state.t;
    report.time_averaged_avg_n = elapsed > 0.0 ? weighted_n / elapsed : c.disc.mean_neighbors();

    if (out.enabled()) {
        auto f = out.open("timeseries.csv");
        f << "t," << timeseries_value_name(cfg.case_id) << ",avgN\n";
        for (const auto& r : report.timeseries) f << r.t << ',' << r.value << ',' << r.avg_n << '\n';
    }
}

NodeGenerationParams pde_node_params(const RunConfig& cfg, Domain domain) {
    NodeGenerationParams g;
    g.domain = domain;
    g.s = cfg.resolutions.front();
    g.perturbation = cfg.perturbation;
    g.seed = cfg.seed;
    g.ghost_width = (domain.periodic_x && domain.periodic_y) ? 0.0 : ghost_width_for(cfg, g.s);
    return g;
}

double velocity_error(const FieldState& state, std::size_t n, const std::function<Velocity(std::size_t)>& exact) {
    std::vector<double> approx(2 * n), ref(2 * n);
    const auto& u = state["u"];
    const auto& v = state["v"];
    for (std::size_t i = 0; i < n; ++i) {
        const Velocity e = exact(i);
        approx[i] = u[i];
        approx[n + i] = v[i];
        ref[i] = e.u;
        ref[n + i] = e.v;
    }
    return l2_error(approx, ref);
}

void burgers_snapshot(const OutputDir& out, const Discretization& disc, const FieldState& state, double t) {
    if (!out.enabled()) return;
    auto f = out.open("snapshot_t" + time_tag(t) + ".csv", {"t = " + time_tag(t)});
    const std::vector<std::string> cols{"u", "v"};
    write_snapshot_csv(f, disc, state, cols);
}

ExperimentReport run_burgers(const RunConfig& cfg, const OutputDir& out) {
    ExperimentReport report;
    report.case_id = cfg.case_id;
    const bool wave = cfg.case_id == CaseId::burgers_wave;
    const Domain domain = Domain::unit_square(!wave, !wave);
    const double re = cfg.re;

    TimeDependentCase c{make_discretization(cfg, generate_nodes(pde_node_params(cfg, domain))),
                        {}, {}, {}, {}, {}, {}, {}};
    const NodeSet& nodes = c.disc.nodes;
    const std::size_t n = c.disc.num_interior();
    c.state = FieldState({"u", "v"}, nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Vec2 p = nodes.position[i];
        if (wave) {
            const Velocity e = traveling_wave_exact(p.x, p.y, 0.0, re);
            c.state["u"][i] = e.u;
            c.state["v"][i] = e.v;
        } else {
            c.state["u"][i] = std::sin(2.0 * std::numbers::pi * p.x);
        }
    }

    c.rhs = [&c, re](const FieldState& s, FieldState& rate, IndicatorRequest* req) {
        burgers_rhs(s, c.disc, re, rate, req);
    };
    if (wave) {
        c.closure = [&nodes, n, re](FieldState& s) {
            auto& u = s["u"];
            auto& v = s["v"];
            for (std::size_t i = n; i < nodes.size(); ++i) {
                const Velocity e = traveling_wave_exact(nodes.position[i].x, nodes.position[i].y, s.t, re);
                u[i] = e.u;
                v[i] = e.v;
            }
        };
    }
    c.dt = [&c, n, re](const FieldState& s) { return burgers_dt(s, n, c.disc.min_h(), re); };
    c.sample = [&nodes, n, re, wave](const FieldState& s) {
        if (wave) {
            return velocity_error(s, n, [&](std::size_t i) {
                return traveling_wave_exact(nodes.position[i].x, nodes.position[i].y, s.t, re);
            });
        }
        return velocity_error(s, n, [&](std::size_t i) {
            return Velocity{cole_hopf_reference(nodes.position[i].x, s.t, re), 0.0};
        });
    };
    c.snapshot = [&out, &c](const FieldState& s, double t) { burgers_snapshot(out, c.disc, s, t); };

    run_time_loop(cfg, c, out, report);
    return report;
}

// ---------------------------------------------------------------- Kelvin-Helmholtz

ExperimentReport run_kh(const RunConfig& cfg, const OutputDir& out) {
    ExperimentReport report;
    report.case_id = cfg.case_id;
    const KhParams params = cfg.kh_params();
    const Domain domain = Domain::unit_square(true, false);

    TimeDependentCase c{make_discretization(cfg, generate_nodes(pde_node_params(cfg, domain))),
                        {}, {}, {}, {}, {}, {}, {}};
    c.disc.nodes.set_ghost_condition(BoundaryCondition::far_field_hold);
    const NodeSet& nodes = c.disc.nodes;
    const std::size_t n = c.disc.num_interior();
    const double rho_upper = (1.0 - params.at) / (1.0 + params.at);

    c.state = FieldState({"rho", "u", "v", "Y"}, nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Vec2 p = nodes.position[i];
        const bool upper = p.y >= 0.5 + params.delta * std::sin(2.0 * std::numbers::pi * p.x);
        c.state["rho"][i] = upper ? rho_upper : 1.0;
        c.state["u"][i] = upper ? 0.5 : -0.5;
        c.state["Y"][i] = upper ? 0.0 : 1.0;
    }
    const double ke0 = kinetic_energy(c.state, nodes);
    report.y_min = 0.0;
    report.y_max = 1.0;

    const PressureGradient form = cfg.pressure;
    c.rhs = [&c, params, form](const FieldState& s, FieldState& rate, IndicatorRequest* req) {
        kh_rhs(s, c.disc, params, form, rate, req);
    };
    // Ghost rates are zero, so the far-field band keeps its initial state without a closure.
    c.dt = [&c, n, params](const FieldState& s) { return kh_dt(s, n, c.disc.min_h(), params); };
    c.sample = [&nodes, ke0](const FieldState& s) { return kinetic_energy(s, nodes) / ke0; };
    c.observe = [&report, n](const FieldState& s) {
        const auto& y = s["Y"];
        const auto [lo, hi] = std::minmax_element(y.begin(), y.begin() + static_cast<long>(n));
        report.y_min = std::min(report.y_min, *lo);
        report.y_max = std::max(report.y_max, *hi);
    };
    c.snapshot = [&out, &c, params](const FieldState& s, double t) {
        if (!out.enabled()) return;
        FieldState full({"u", "v", "rho", "Y", "pf"}, s.num_nodes(), s.t);
        for (const char* name : {"u", "v", "rho", "Y"}) full[name] = s[name];
        for (std::size_t i = 0; i < s.num_nodes(); ++i) {
            full["pf"][i] = kh_eos(s["rho"][i], s["Y"][i], params.ma, params.at);
        }
        auto f = out.open("snapshot_t" + time_tag(t) + ".csv", {"t = " + time_tag(t)});
        const std::vector<std::string> cols{"u", "v", "rho", "Y", "pf"};
        write_snapshot_csv(f, c.disc, full, cols);

        auto g = out.open("interface_t" + time_tag(t) + ".csv", {"t = " + time_tag(t), "level = 0.5"});
        g << "x,y\n";
        for (const Vec2& p : extract_interface(s, c.disc.nodes, 0.5)) g << p.x << ',' << p.y << '\n';
    };

    run_time_loop(cfg, c, out, report);
    return report;
}

}  // namespace

std::string timeseries_value_name(CaseId id) { return id == CaseId::kh ? "KE_ratio" : "err"; }

ExperimentReport run_experiment(const RunConfig& cfg, bool write_files) {
    cfg.validate();
#ifdef _OPENMP
    omp_set_num_threads(cfg.threads);
#endif
    const auto start = Clock::now();
    const OutputDir out(cfg, write_files);
    ExperimentReport report;
    switch (cfg.case_id) {
        case CaseId::converge: report = run_convergence(cfg, out); break;
        case CaseId::burgers_wave:
        case CaseId::burgers_periodic: report = run_burgers(cfg, out); break;
        case CaseId::kh: report = run_kh(cfg, out); break;
    }
    report.wall_seconds = seconds_since(start);
    return report;
}

}  // namespace padfree
