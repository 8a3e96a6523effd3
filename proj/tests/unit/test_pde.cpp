#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "padfree/harness.hpp"
#include "padfree/pde.hpp"

using namespace padfree;

namespace {

// du/dt = f(t) with a cubic f: Simpson's rule, hence RK4, is exact.
double cubic_rate(double t) { return 1.0 - 2.0 * t + 3.0 * t * t - 0.5 * t * t * t; }
double cubic_integral(double t) { return t - t * t + t * t * t - 0.125 * t * t * t * t; }

double decay_error(double dt) {
    FieldState s({"u"}, 1);
    s["u"][0] = 1.0;
    const RhsFunction rhs = [](const FieldState& st, FieldState& r, const StageContext&) {
        r = FieldState({"u"}, 1, st.t);
        r["u"][0] = -st["u"][0];
    };
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < steps; ++k) rk4_step(s, dt, rhs);
    return std::abs(s["u"][0] - std::exp(-1.0));
}

Discretization periodic_lattice(double s, int p) {
    NodeGenerationParams g;
    g.domain = Domain::unit_square(true, true);
    g.s = s;
    return Discretization(generate_nodes(g), p, p, p);
}

}  // namespace

TEST_CASE("rk4 integrates a cubic-in-time rate exactly") {
    FieldState s({"u"}, 1);
    const RhsFunction rhs = [](const FieldState& st, FieldState& r, const StageContext&) {
        r = FieldState({"u"}, 1, st.t);
        r["u"][0] = cubic_rate(st.t);
    };
    for (int k = 0; k < 7; ++k) rk4_step(s, 0.3, rhs);
    CHECK(s.t == doctest::Approx(2.1));
    CHECK(s["u"][0] == doctest::Approx(cubic_integral(2.1)).epsilon(1e-13));
}

TEST_CASE("rk4 is fourth order") {
    const double e1 = decay_error(0.1);
    const double e2 = decay_error(0.05);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("rk4 calls the closure at every stage and flags only stage one") {
    FieldState s({"u"}, 2);
    std::vector<double> closure_times;
    std::vector<int> flagged;
    const RhsFunction rhs = [&](const FieldState& st, FieldState& r, const StageContext& ctx) {
        r = FieldState({"u"}, 2, st.t);
        if (ctx.evaluate_indicator) flagged.push_back(ctx.stage);
    };
    const ClosureFunction closure = [&](FieldState& st) {
        closure_times.push_back(st.t);
        st["u"][1] = st.t;
    };
    rk4_step(s, 0.2, rhs, closure, true);
    CHECK(flagged == std::vector<int>{1});
    REQUIRE(closure_times.size() == 5);
    CHECK(closure_times[1] == doctest::Approx(0.1));
    CHECK(closure_times[3] == doctest::Approx(0.2));
    CHECK(s["u"][1] == doctest::Approx(0.2));
    CHECK_THROWS_AS(rk4_step(s, 0.0, rhs), std::invalid_argument);
}

TEST_CASE("field state axpy and finiteness") {
    FieldState a({"u", "v"}, 3), d({"u", "v"}, 3), out;
    a["u"] = {1, 2, 3};
    d["u"] = {1, 1, 1};
    d["v"] = {2, 2, 2};
    out.assign_axpy(a, 0.5, d);
    CHECK(out["u"] == std::vector<double>{1.5, 2.5, 3.5});
    CHECK(out["v"] == std::vector<double>{1, 1, 1});
    CHECK(out.all_finite());
    out["v"][1] = std::nan("");
    CHECK_FALSE(out.all_finite());
    CHECK_THROWS_AS(out.index_of("rho"), std::out_of_range);
}

TEST_CASE("time step rules") {
    CHECK(burgers_dt(2.0, 0.01, 100.0) == doctest::Approx(std::min(0.2 * 0.01 / 2.0, 0.05 * 1e-4 * 100.0)));
    CHECK(burgers_dt(0.0, 0.01, 100.0) == doctest::Approx(0.05 * 1e-4 * 100.0));
    KhParams p;
    CHECK(kh_dt(0.5, 0.01, p) == doctest::Approx(std::min(0.1 * 0.01 / (0.5 * 11.0), 0.05 * 1e-4 * 500.0)));
    p.sc = 0.5;
    CHECK(kh_dt(1e-9, 0.01, p) == doctest::Approx(0.05 * 1e-4 * 500.0 * 0.5));
}

TEST_CASE("equation of state vanishes in both pure reference fluids") {
    const double at = 0.2;
    CHECK(kh_eos(1.0, 1.0, 0.1, at) == doctest::Approx(0.0).scale(1.0));
    CHECK(kh_eos((1.0 - at) / (1.0 + at), 0.0, 0.1, at) == doctest::Approx(0.0).scale(1.0));
    CHECK(kh_eos(1.01, 1.0, 0.1, at) == doctest::Approx(1.0));
    KhParams bad;
    bad.ma = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("burgers right-hand side matches the travelling-wave time derivative") {
    NodeGenerationParams g;
    g.s = 1.0 / 80;
    g.perturbation = 0.3;
    g.ghost_width = 2.0 * stencil_ratio(8) * g.s;
    const Discretization disc(generate_nodes(g), 8, 8, 8);
    const double re = 50.0, t = 0.2, dt = 1e-5;
    FieldState st({"u", "v"}, disc.nodes.size(), t);
    for (std::size_t i = 0; i < disc.nodes.size(); ++i) {
        const Velocity w = traveling_wave_exact(disc.nodes.position[i].x, disc.nodes.position[i].y, t, re);
        st["u"][i] = w.u;
        st["v"][i] = w.v;
    }
    FieldState rate;
    burgers_rhs(st, disc, re, rate);
    double worst = 0.0;
    for (std::size_t i = 0; i < disc.num_interior(); ++i) {
        const Vec2 p = disc.nodes.position[i];
        const Velocity a = traveling_wave_exact(p.x, p.y, t + dt, re);
        const Velocity b = traveling_wave_exact(p.x, p.y, t - dt, re);
        worst = std::max(worst, std::abs(rate["u"][i] - (a.u - b.u) / (2 * dt)));
        worst = std::max(worst, std::abs(rate["v"][i] - (a.v - b.v) / (2 * dt)));
    }
    CHECK(worst < 1e-5);
    for (std::size_t i = disc.num_interior(); i < disc.nodes.size(); ++i) CHECK(rate["u"][i] == 0.0);
}

TEST_CASE("periodic lattice Burgers conserves momentum") {
    const Discretization disc = periodic_lattice(1.0 / 40, 6);
    FieldState st({"u", "v"}, disc.nodes.size());
    for (std::size_t i = 0; i < disc.nodes.size(); ++i) {
        const Vec2 p = disc.nodes.position[i];
        st["u"][i] = std::sin(2 * std::numbers::pi * p.x) + 0.3 * std::cos(2 * std::numbers::pi * (p.x + 2 * p.y));
    }
    FieldState rate;
    burgers_rhs(st, disc, 100.0, rate);
    double total = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < disc.num_interior(); ++i) {
        total += rate["u"][i];
        scale += std::abs(rate["u"][i]);
        CHECK(rate["v"][i] == 0.0);
    }
    CHECK(std::abs(total) < 1e-11 * scale);
}

TEST_CASE("non-finite right-hand sides raise a numerical abort") {
    const Discretization disc = periodic_lattice(0.1, 4);
    FieldState st({"u", "v"}, disc.nodes.size(), 0.25);
    st["u"][17] = std::numeric_limits<double>::infinity();
    FieldState rate;
    try {
        burgers_rhs(st, disc, 100.0, rate);
        FAIL("expected an abort");
    } catch (const NumericalAbort& e) {
        CHECK(e.time() == 0.25);
        CHECK(e.node() < disc.num_interior());
    }
}

TEST_CASE("uniform two-fluid state is stationary") {
    NodeGenerationParams g;
    g.domain = Domain::unit_square(true, false);
    g.s = 0.1;
    g.perturbation = 0.4;
    g.ghost_width = 2.0 * stencil_ratio(6) * g.s;
    const Discretization disc(generate_nodes(g), 6, 6, 6);
    FieldState st({"rho", "u", "v", "Y"}, disc.nodes.size());
    std::fill(st["rho"].begin(), st["rho"].end(), 1.0);
    std::fill(st["u"].begin(), st["u"].end(), 0.5);
    std::fill(st["Y"].begin(), st["Y"].end(), 1.0);
    FieldState rate;
    IndicatorRequest req;
    req.fields = {st.index_of("u")};
    kh_rhs(st, disc, KhParams{}, PressureGradient::as_printed, rate, &req);
    for (std::size_t f = 0; f < rate.num_fields(); ++f) {
        for (double r : rate.field(f)) CHECK(std::abs(r) < 1e-12);
    }
    CHECK(req.eta.size() == disc.num_interior());
}

TEST_CASE("snapshot csv columns") {
    const Discretization disc = periodic_lattice(0.1, 4);
    FieldState st({"u", "v"}, disc.nodes.size());
    std::ostringstream os;
    const std::vector<std::string> cols = {"u", "v"};
    write_snapshot_csv(os, disc, st, cols);
    CHECK(os.str().rfind("id,x,y,p,u,v\n", 0) == 0);
}
