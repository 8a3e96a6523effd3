// Runs every primary acceptance criterion and prints one PASS/FAIL line each.
// Optional arguments select criteria by number, e.g. `padfree_acceptance 1 8`.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "padfree/adaptivity.hpp"
#include "padfree/config.hpp"
#include "padfree/discretization.hpp"
#include "padfree/experiments.hpp"
#include "padfree/harness.hpp"

using namespace padfree;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

void info(const std::string& line) { std::printf("      %s\n", line.c_str()); }

// Least-squares slope of log(err) against log(s).
double loglog_slope(const std::vector<double>& s, const std::vector<double>& err) {
    const double n = static_cast<double>(s.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double x = std::log(s[k]), y = std::log(err[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double pair_slope(double s0, double e0, double s1, double e1) { return std::log(e1 / e0) / std::log(s1 / s0); }

ExperimentReport converge(double perturb, std::uint64_t seed, std::vector<double> s, int uniform_p,
                          TestFunction fn = TestFunction::sinusoid) {
    RunConfig c = defaults_for(CaseId::converge);
    c.test_function = fn;
    c.perturbation = perturb;
    c.seed = seed;
    c.resolutions = std::move(s);
    c.uniform_p = uniform_p;
    return run_experiment(c, false);
}

NodeSet unit_nodes(double s, double perturb, std::uint64_t seed) {
    NodeGenerationParams g;
    g.s = s;
    g.perturbation = perturb;
    g.seed = seed;
    g.ghost_width = 2.0 * stencil_ratio(kMaxOrder) * s;
    return generate_nodes(g);
}

// ------------------------------------------------------------------ criteria

Outcome polynomial_exactness() {
    double worst = 0.0;
    std::string where;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const NodeSet nodes = unit_nodes(1.0 / 20, 0.5, seed);
        for (int p : {4, 6, 8}) {
            const Discretization disc(nodes, p, p, p);
            const std::size_t n = disc.num_interior();
            std::vector<double> f(nodes.size());
            for (int deg = 0; deg <= p; ++deg) {
                for (int a = 0; a <= deg; ++a) {
                    const int b = deg - a;
                    auto mono = [](double x, int k) { return k < 0 ? 0.0 : std::pow(x, k); };
                    for (std::size_t i = 0; i < nodes.size(); ++i) {
                        f[i] = mono(nodes.position[i].x, a) * mono(nodes.position[i].y, b);
                    }
                    std::vector<NodeDerivatives> exact(n);
                    double sx = 0, sy = 0, sl = 0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double x = nodes.position[i].x, y = nodes.position[i].y;
                        exact[i].dx = a * mono(x, a - 1) * mono(y, b);
                        exact[i].dy = b * mono(x, a) * mono(y, b - 1);
                        exact[i].lap = a * (a - 1) * mono(x, a - 2) * mono(y, b) + b * (b - 1) * mono(x, a) * mono(y, b - 2);
                        sx = std::max(sx, std::abs(exact[i].dx));
                        sy = std::max(sy, std::abs(exact[i].dy));
                        sl = std::max(sl, std::abs(exact[i].lap));
                    }
                    // Relative to the largest exact value; absolute when the derivative vanishes identically.
                    sx = sx > 0 ? sx : 1.0;
                    sy = sy > 0 ? sy : 1.0;
                    sl = sl > 0 ? sl : 1.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const NodeDerivatives d = apply_all(disc.weights[i], f, disc.stencils.neighbors(i), i);
                        const double e = std::max({std::abs(d.dx - exact[i].dx) / sx, std::abs(d.dy - exact[i].dy) / sy,
                                                   std::abs(d.lap - exact[i].lap) / sl});
                        if (e > worst) {
                            worst = e;
                            where = fmt("p=%d x^%d y^%d seed %d", p, a, b, static_cast<int>(seed));
                        }
                    }
                }
            }
        }
    }
    return {worst <= 1e-8, fmt("worst relative error %.2e (%s), gate 1e-8", worst, where.c_str())};
}

Outcome fixed_order_convergence() {
    const std::vector<double> s = {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80};
    auto slopes = [&](double perturb, std::uint64_t seed, int p) {
        const auto r = converge(perturb, seed, s, p);
        std::vector<double> el, gx, gy;
        for (const auto& row : r.convergence) {
            el.push_back(row.err_lap);
            gx.push_back(row.err_gradx);
            gy.push_back(row.err_grady);
        }
        return std::array<double, 2>{std::min(loglog_slope(s, gx), loglog_slope(s, gy)), loglog_slope(s, el)};
    };
    bool pass = true;
    double min_margin = 1e300;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (int p : {4, 6}) {
            const auto [grad, lap] = slopes(0.3, seed, p);
            pass = pass && grad >= p - 0.5 && lap >= p - 1.5;
            min_margin = std::min({min_margin, grad - (p - 0.5), lap - (p - 1.5)});
            if (seed == 1) info(fmt("eps/s=0.3 seed 1 p=%d: gradient slope %.2f, Laplacian slope %.2f", p, grad, lap));
        }
    }
    for (int p : {4, 6}) {
        const auto [grad, lap] = slopes(0.5, 1, p);
        info(fmt("(info) eps/s=0.5 seed 1 p=%d: gradient slope %.2f, Laplacian slope %.2f", p, grad, lap));
    }
    return {pass, fmt("eps/s=0.3, seeds 1-5: smallest margin over the gates %.2f", min_margin)};
}

Outcome threshold_switch() {
    const std::vector<double> s = {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80, 1.0 / 160};
    RunConfig c = defaults_for(CaseId::converge);
    c.resolutions = s;
    c.perturbation = 0.3;
    c.p_init = 6;
    c.p_max = 6;
    c.eps_upper = 1e-2;
    c.eps_lower = 1e-4;
    const auto ad = run_experiment(c, false).convergence;
    const auto p4 = converge(0.3, 1, s, 4).convergence;
    const auto p6 = converge(0.3, 1, s, 6).convergence;

    bool between = true;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double lo = std::min(p4[k].err_lap, p6[k].err_lap);
        const double hi = std::max(p4[k].err_lap, p6[k].err_lap);
        const bool ok = ad[k].err_lap >= lo / 1.2 && ad[k].err_lap <= hi * 1.2;
        between = between && ok;
        info(fmt("s=1/%-4.0f adaptive %.3e  p4 %.3e  p6 %.3e  <N> %.1f%s", 1.0 / s[k], ad[k].err_lap, p4[k].err_lap,
                 p6[k].err_lap, ad[k].avg_n, ok ? "" : "  (outside band)"));
    }
    const std::size_t m = s.size() - 1;
    const double coarse_ad = pair_slope(s[0], ad[0].err_lap, s[1], ad[1].err_lap);
    const double coarse_p6 = pair_slope(s[0], p6[0].err_lap, s[1], p6[1].err_lap);
    const double fine_ad = pair_slope(s[m - 1], ad[m - 1].err_lap, s[m], ad[m].err_lap);
    const double fine_p4 = pair_slope(s[m - 1], p4[m - 1].err_lap, s[m], p4[m].err_lap);
    const bool starts_p6 = std::abs(coarse_ad - coarse_p6) <= 0.5;
    const bool leaves_p6 = fine_ad <= fine_p4 + 0.5;
    return {between && starts_p6 && leaves_p6,
            fmt("coarsest slope %.2f (p6 %.2f), finest slope %.2f (p4 %.2f), inside band: %s", coarse_ad, coarse_p6,
                fine_ad, fine_p4, between ? "yes" : "no")};
}

// log(err) interpolated in log(cost) at the requested cost.
double error_at_cost(const std::vector<ConvergenceRow>& rows, double cost) {
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        const double c0 = rows[k].cost, c1 = rows[k + 1].cost;
        if ((c0 - cost) * (c1 - cost) <= 0.0) {
            const double f = std::log(cost / c0) / std::log(c1 / c0);
            return std::exp(std::log(rows[k].err_lap) + f * std::log(rows[k + 1].err_lap / rows[k].err_lap));
        }
    }
    return std::nan("");
}

Outcome supergaussian_cost() {
    const std::vector<double> s = {1.0 / 40, 1.0 / 60, 1.0 / 80, 1.0 / 120, 1.0 / 160, 1.0 / 240, 1.0 / 320};
    RunConfig c = defaults_for(CaseId::converge);
    c.test_function = TestFunction::supergaussian;
    c.resolutions = s;
    c.p_init = 6;
    c.eps_upper = 1e-5;
    c.eps_lower = 1e-8;
    const auto ad = run_experiment(c, false).convergence;
    const auto p8 = converge(c.perturbation, 1, s, 8, TestFunction::supergaussian).convergence;
    const double ea = error_at_cost(ad, 1e6);
    const double e8 = error_at_cost(p8, 1e6);
    for (std::size_t k = 0; k < s.size(); ++k) {
        info(fmt("s=1/%-4.0f adaptive err %.3e cost %.3e | p8 err %.3e cost %.3e", 1.0 / s[k], ad[k].err_lap,
                 ad[k].cost, p8[k].err_lap, p8[k].cost));
    }
    const bool pass = std::isfinite(ea) && std::isfinite(e8) && ea <= 0.5 * e8;
    return {pass, fmt("at cost 1e6: adaptive %.3e, p8 %.3e, ratio %.3f (gate 0.5)", ea, e8, ea / e8)};
}

Outcome traveling_wave() {
    RunConfig c = defaults_for(CaseId::burgers_wave);
    c.resolutions = {1.0 / 80};
    c.re = 500.0;
    c.t_end = 1.0;
    c.eps_upper = 1e-3;
    c.eps_lower = 1e-6;
    c.snapshot_times.clear();
    const auto ad = run_experiment(c, false);
    c.uniform_p = 8;
    const auto p8 = run_experiment(c, false);
    if (ad.aborted || p8.aborted) return {false, "run aborted: " + ad.abort_reason + p8.abort_reason};
    const double ea = ad.timeseries.back().value, e8 = p8.timeseries.back().value;
    const double ratio = ad.time_averaged_avg_n / p8.time_averaged_avg_n;
    return {ea <= 2.0 * e8 && ratio <= 0.8,
            fmt("L2 error adaptive %.3e vs p8 %.3e (gate 2x); <N> %.2f vs %.2f, ratio %.3f (gate 0.8)", ea, e8,
                ad.time_averaged_avg_n, p8.time_averaged_avg_n, ratio)};
}

Outcome stability_rescue() {
    RunConfig c = defaults_for(CaseId::burgers_periodic);
    c.resolutions = {1.0 / 80};
    c.re = 250.0;
    c.perturbation = 0.4;
    c.snapshot_times.clear();

    RunConfig low = c;
    low.uniform_p = 4;
    low.t_end = 0.7;
    const auto r4 = run_experiment(low, false);
    bool p4_fails = r4.aborted && r4.abort_time < 0.7;
    for (const auto& sm : r4.timeseries) p4_fails = p4_fails || (sm.t < 0.7 && !(sm.value <= 0.1));
    info(r4.aborted ? fmt("uniform p4 aborted at t=%.4f", r4.abort_time)
                    : fmt("uniform p4 reached t=%.2f, final error %.3e", r4.final_time, r4.timeseries.back().value));

    c.p_init = 8;
    c.p_min = 4;
    c.p_max = 8;
    c.t_end = 1.0;
    const auto ad = run_experiment(c, false);
    const bool ad_ok = !ad.aborted && ad.final_time == 1.0 && ad.timeseries.back().value <= 1e-2;
    const std::string ad_text = ad.aborted ? fmt("adaptive aborted at t=%.4f (node %zu)", ad.abort_time, ad.abort_node)
                                           : fmt("adaptive error at t=1 %.3e", ad.timeseries.back().value);
    return {p4_fails && ad_ok, fmt("uniform p4 fails before t=0.7: %s; %s (gate 1e-2)", p4_fails ? "yes" : "no",
                                   ad_text.c_str())};
}

Outcome kelvin_helmholtz() {
    RunConfig c = defaults_for(CaseId::kh);
    c.resolutions = {1.0 / 80};
    c.t_end = 2.0;
    c.eps_upper = 1e-1;
    c.eps_lower = 1e-4;
    c.snapshot_times.clear();
    const auto ad = run_experiment(c, false);
    c.uniform_p = 8;
    const auto p8 = run_experiment(c, false);
    if (ad.aborted || p8.aborted) return {false, "run aborted: " + ad.abort_reason + p8.abort_reason};
    double worst = 0.0;
    const std::size_t n = std::min(ad.timeseries.size(), p8.timeseries.size());
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(ad.timeseries[k].value - p8.timeseries[k].value));
    const bool complete = n == p8.timeseries.size() && ad.timeseries.size() == p8.timeseries.size();
    const double ratio = ad.time_averaged_avg_n / p8.time_averaged_avg_n;
    info(fmt("KE/KE0 at t=2: adaptive %.6f, p8 %.6f; Y range [%.3f, %.3f]", ad.timeseries.back().value,
             p8.timeseries.back().value, ad.y_min, ad.y_max));
    return {complete && worst <= 0.01 && ratio <= 0.85,
            fmt("max |dKE/KE0| %.2e (gate 0.01); <N> %.2f vs %.2f, ratio %.3f (gate 0.85)", worst,
                ad.time_averaged_avg_n, p8.time_averaged_avg_n, ratio)};
}

Outcome indicator_identity() {
    const NodeSet nodes = unit_nodes(1.0 / 40, 0.5, 1);
    const Discretization disc(nodes, 6, 4, 8);
    std::vector<double> phi(nodes.size()), lap_exact(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const FieldSample f = test_sinusoid(nodes.position[i].x, nodes.position[i].y);
        phi[i] = f.phi;
        lap_exact[i] = f.lap;
    }
    const std::vector<double> eta = compute_indicators(disc.nodes, disc.stencils, disc.weights, phi);

    // Independent fixed-order operators at p=6 and p=4.
    const Discretization d6(nodes, 6, 6, 6), d4(nodes, 4, 4, 4);
    double worst = 0.0;
    for (std::size_t i = 0; i < disc.num_interior(); ++i) {
        const double e6 = apply_operator(d6.weights[i], Derivative::laplacian, phi, d6.stencils.neighbors(i), i) - lap_exact[i];
        const double e4 = apply_operator(d4.weights[i], Derivative::laplacian, phi, d4.stencils.neighbors(i), i) - lap_exact[i];
        worst = std::max(worst, std::abs(eta[i] - std::abs(e6 - e4)));
    }
    return {worst <= 1e-12, fmt("max node-wise mismatch %.2e over %zu nodes (gate 1e-12)", worst, disc.num_interior())};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "polynomial exactness", polynomial_exactness},
        {2, "fixed-order convergence", fixed_order_convergence},
        {3, "threshold-switch behaviour", threshold_switch},
        {4, "super-Gaussian cost-accuracy", supergaussian_cost},
        {5, "travelling wave", traveling_wave},
        {6, "stability rescue", stability_rescue},
        {7, "Kelvin-Helmholtz consistency", kelvin_helmholtz},
        {8, "indicator identity", indicator_identity},
    };
    std::set<int> selected;
    for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.contains(c.id)) continue;
        std::printf("[%d] %s\n", c.id, c.name);
        std::fflush(stdout);
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d: %s - %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
