#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "padfree/config.hpp"
#include "padfree/experiments.hpp"
#include "padfree/operators.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;

// Flags shared by the experiment subcommands; unset flags leave the config alone.
struct Overrides {
    std::string config_path;
    std::optional<std::string> test_case;
    std::optional<std::string> s;
    std::optional<double> eps_u, eps_l, re, t_end, perturb;
    std::optional<int> p_init, uniform_p, threads;
    std::optional<long> seed;
    std::optional<std::string> out;

    void attach(CLI::App* app, bool converge) {
        app->add_option("--config", config_path, "key = value config file");
        if (converge) app->add_option("--case", test_case, "test function: sin | supergauss");
        app->add_option("--s", s, "node spacing (e.g. 0.025 or 1/40); converge accepts a comma list");
        app->add_option("--eps-u", eps_u, "upper refinement threshold");
        app->add_option("--eps-l", eps_l, "lower refinement threshold");
        app->add_option("--p-init", p_init, "initial order");
        app->add_option("--uniform-p", uniform_p, "fixed order, disables adaptation");
        app->add_option("--re", re, "Reynolds number");
        app->add_option("--seed", seed, "node perturbation seed");
        app->add_option("--t-end", t_end, "final time");
        app->add_option("--perturb", perturb, "perturbation ratio eps/s");
        app->add_option("--out", out, "output directory (beats PADFREE_OUT)");
        app->add_option("--threads", threads, "OpenMP thread count");
    }

    padfree::RunConfig resolve(padfree::CaseId id) const {
        padfree::RunConfig cfg = padfree::defaults_for(id);
        if (!config_path.empty()) padfree::apply_config_file(cfg, config_path);
        if (const char* env = std::getenv("PADFREE_OUT"); env != nullptr && *env != '\0') cfg.out_dir = env;
        if (test_case) cfg.set("test_function", *test_case);
        if (s) cfg.set("resolutions", *s);
        if (eps_u) cfg.eps_upper = *eps_u;
        if (eps_l) cfg.eps_lower = *eps_l;
        if (p_init) cfg.p_init = *p_init;
        if (uniform_p) cfg.uniform_p = *uniform_p;
        if (re) cfg.re = *re;
        if (seed) cfg.set("seed", std::to_string(*seed));
        if (t_end) {
            cfg.t_end = *t_end;
            std::erase_if(cfg.snapshot_times, [&](double t) { return t > cfg.t_end; });
        }
        if (perturb) cfg.perturbation = *perturb;
        if (out) cfg.out_dir = *out;
        if (threads) cfg.threads = *threads;
        cfg.validate();
        return cfg;
    }
};

void print_info() {
    std::printf("%-4s %-6s %-6s %s\n", "p", "n(p)", "h/s", "<N> ~ 4 pi (h/s)^2");
    for (int p = padfree::kMinOrder; p <= padfree::kMaxOrder; p += padfree::kOrderStep) {
        const double r = padfree::stencil_ratio(p);
        std::printf("%-4d %-6d %-6.1f %.1f\n", p, padfree::basis_size(p), r, 4.0 * std::numbers::pi * r * r);
    }
    std::printf("reduced order of p=%d uses h/s = %.1f\n", padfree::kMinOrder,
                padfree::stencil_ratio(padfree::kMinOrder - padfree::kOrderStep));
}

int run(const padfree::RunConfig& cfg) {
    const padfree::ExperimentReport r = padfree::run_experiment(cfg, true);
    for (const auto& row : r.convergence) {
        std::printf("s=%.6g err_lap=%.4e err_gradx=%.4e err_grady=%.4e avgN=%.2f cost=%.4e\n", row.s, row.err_lap,
                    row.err_gradx, row.err_grady, row.avg_n, row.cost);
    }
    if (!r.timeseries.empty()) {
        const auto& last = r.timeseries.back();
        std::printf("t=%.4f %s=%.6e avgN=%.2f steps=%zu time-averaged avgN=%.2f\n", last.t,
                    padfree::timeseries_value_name(cfg.case_id).c_str(), last.value, last.avg_n, r.steps,
                    r.time_averaged_avg_n);
    }
    if (cfg.case_id == padfree::CaseId::kh) std::printf("Y range [%.6f, %.6f]\n", r.y_min, r.y_max);
    std::printf("wall %.2f s, output in %s\n", r.wall_seconds, cfg.out_dir.c_str());
    if (r.aborted) {
        std::fprintf(stderr, "numerical abort: %s\n", r.abort_reason.c_str());
        return kExitAbort;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adaptive LABFM mesh-free toolkit"};
    app.require_subcommand(1);

    Overrides conv, wave, periodic, kh;
    conv.attach(app.add_subcommand("converge", "static operator convergence study"), true);
    wave.attach(app.add_subcommand("burgers-wave", "travelling-wave Burgers case"), false);
    periodic.attach(app.add_subcommand("burgers-periodic", "periodic Burgers case"), false);
    kh.attach(app.add_subcommand("kh", "two-phase Kelvin-Helmholtz case"), false);
    auto* info = app.add_subcommand("info", "order, basis size and stencil tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (info->parsed()) {
            print_info();
            return kExitOk;
        }
        for (auto* sub : app.get_subcommands()) {
            const padfree::CaseId id = padfree::parse_case_id(sub->get_name());
            const Overrides& o = id == padfree::CaseId::converge        ? conv
                                 : id == padfree::CaseId::burgers_wave ? wave
                                 : id == padfree::CaseId::burgers_periodic ? periodic
                                                                           : kh;
            return run(o.resolve(id));
        }
    } catch (const padfree::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitAbort;
    }
    return kExitOk;
}
