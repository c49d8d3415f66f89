// Scenario runner for the two-axis spin-1/2 field family: simulate evolutions,
// compute geometric phases at loop instants, scan for loops, and cross-check
// the analytic solution against the numeric integrators.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinloops/spinloops.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSingularity = 3;
constexpr int kExitNotALoop = 4;

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<int> steps;
    std::optional<double> tol;
    std::optional<std::string> scenario;
    double t_max = 0.0;
    int samples = 2000;
};

std::vector<spinloops::Scenario> load_scenarios(const Options& opt) {
    auto scenarios = spinloops::parse_config_file(opt.config_path);
    if (opt.scenario) {
        std::erase_if(scenarios, [&](const spinloops::Scenario& sc) {
            return sc.name != *opt.scenario;
        });
        if (scenarios.empty())
            throw spinloops::ConfigError("no scenario named '" + *opt.scenario + "' in config");
    }
    if (opt.steps && *opt.steps < 2) throw spinloops::ConfigError("--steps must be >= 2");
    if (opt.tol && !(*opt.tol > 0.0)) throw spinloops::ConfigError("--tol must be > 0");
    for (auto& sc : scenarios) {
        if (opt.steps) sc.steps = *opt.steps;
        if (opt.tol) sc.loop_tol = *opt.tol;
    }
    return scenarios;
}

int cmd_simulate(const Options& opt) {
    for (const auto& sc : load_scenarios(opt)) {
        const auto result = spinloops::run_simulate(sc, opt.out_dir);
        std::printf("[%s] loop: ell=%ld m=%ld is_loop=%s strong=%s\n", sc.name.c_str(),
                    result.loop.ell, result.loop.m, result.loop.is_loop ? "yes" : "no",
                    result.loop.is_strong ? "yes" : "no");
        std::printf("[%s] max deviation analytic vs numeric: bloch=%.3e psi=%.3e prob=%.3e\n",
                    sc.name.c_str(), result.max_dev_bloch, result.max_dev_psi,
                    result.max_dev_prob);
        std::printf("[%s] wrote %s\n", sc.name.c_str(), result.summary_json.string().c_str());
    }
    return kExitOk;
}

int cmd_phase(const Options& opt) {
    for (const auto& sc : load_scenarios(opt)) {
        const auto result = spinloops::run_phase(sc, opt.out_dir);
        std::printf("[%s] gamma_numeric=%.12f gamma_closed=%.12f solid_angle=%.12f "
                    "(ell=%ld m=%ld strong=%s deviation=%.3e)\n",
                    sc.name.c_str(), result.numeric.gamma, result.closed.gamma,
                    result.numeric.solid_angle, result.loop.ell, result.loop.m,
                    result.loop.is_strong ? "yes" : "no", result.deviation);
    }
    return kExitOk;
}

int cmd_loop_scan(const Options& opt) {
    for (const auto& sc : load_scenarios(opt)) {
        const auto candidates = spinloops::run_loop_scan(sc, opt.t_max, opt.samples, opt.out_dir);
        if (candidates.empty()) {
            std::printf("[%s] no loop instants in (0, %g]\n", sc.name.c_str(), opt.t_max);
            continue;
        }
        for (const auto& c : candidates)
            std::printf("[%s] tau=%.12f ell=%ld m=%ld strong=%s\n", sc.name.c_str(), c.tau, c.ell,
                        c.m, c.strong ? "yes" : "no");
    }
    return kExitOk;
}

int cmd_verify(const Options& opt) {
    bool all_ok = true;
    for (const auto& sc : load_scenarios(opt)) {
        const auto report = spinloops::run_verify(sc);
        for (const auto& check : report.checks) {
            if (check.skipped)
                std::printf("[%s] skip %-26s %s\n", sc.name.c_str(), check.name.c_str(),
                            check.note.c_str());
            else
                std::printf("[%s] %s %-26s measured=%.3e tol=%.0e\n", sc.name.c_str(),
                            check.passed ? "ok  " : "FAIL", check.name.c_str(), check.measured,
                            check.tolerance);
        }
        all_ok = all_ok && report.all_passed();
    }
    return all_ok ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exactly solvable spin-1/2 dynamics in two-axis rotating fields"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&opt](CLI::App* cmd) {
        cmd->add_option("config", opt.config_path, "scenario config file")->required();
        cmd->add_option("--out-dir", opt.out_dir, "output directory (default: out)");
        cmd->add_option("--steps", opt.steps, "override integration steps");
        cmd->add_option("--tol", opt.tol, "override loop tolerance (radians)");
        cmd->add_option("--scenario", opt.scenario, "run a single named scenario");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "trajectories + oracle agreement summary");
    add_common(simulate);
    CLI::App* phase = app.add_subcommand("phase", "geometric phase at t_end (loop required)");
    add_common(phase);
    CLI::App* scan = app.add_subcommand("loop-scan", "locate loop instants in (0, t_max]");
    add_common(scan);
    scan->add_option("--t-max", opt.t_max, "scan upper limit")->required();
    scan->add_option("--samples", opt.samples, "residual grid samples (default: 2000)");
    CLI::App* verify = app.add_subcommand("verify", "run the oracle-agreement suite");
    add_common(verify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(opt);
        if (phase->parsed()) return cmd_phase(opt);
        if (scan->parsed()) return cmd_loop_scan(opt);
        if (verify->parsed()) return cmd_verify(opt);
    } catch (const spinloops::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const spinloops::ParseError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const spinloops::NotALoopError& err) {
        std::cerr << "not a loop: " << err.what() << " (residual_alpha=" << err.residual_alpha()
                  << ", residual_beta=" << err.residual_beta() << ")\n";
        return kExitNotALoop;
    } catch (const spinloops::PoleSingularityError& err) {
        std::cerr << "singularity: " << err.what() << "\n";
        return kExitSingularity;
    } catch (const spinloops::SouthPoleError& err) {
        std::cerr << "singularity: " << err.what() << "\n";
        return kExitSingularity;
    } catch (const spinloops::OpenCurveError& err) {
        std::cerr << "singularity: " << err.what() << "\n";
        return kExitSingularity;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return kExitOk;
}
