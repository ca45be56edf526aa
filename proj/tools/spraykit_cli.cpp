#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "spraykit/scenario.hpp"

using namespace spraykit;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

void print_report(const RunReport& r, bool verbose) {
    std::cout << fmt::format("{} {} ({}, {:.2f} s)\n", r.pass() ? "PASS" : "FAIL", r.scenario, r.run, r.seconds);
    for (const auto& c : r.checks) {
        if (!verbose && c.pass) continue;
        const std::string bound = c.relation == "in" ? fmt::format("in [{:.6g}, {:.6g}]", c.threshold, c.upper)
                                                     : fmt::format("{} {:.6g}", c.relation, c.threshold);
        std::cout << fmt::format("  {} {}: {:.6g} {}\n", c.pass ? "ok  " : "FAIL", c.name, c.measured, bound);
    }
}

std::filesystem::path out_root(const RunOverrides& o) {
    return o.out ? std::filesystem::path(*o.out) : default_output_root();
}

// Runs one config and writes its artifacts under <root>/<name>.
bool run_one(ScenarioConfig cfg, const RunOverrides& o, bool verbose) {
    cfg = apply_overrides(std::move(cfg), o);
    const std::filesystem::path root =
        o.out ? std::filesystem::path(*o.out) : cfg.output.empty() ? default_output_root() : std::filesystem::path(cfg.output);
    const RunReport r = execute(cfg);
    write_report(r, root / cfg.name);
    print_report(r, verbose);
    return r.pass();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spraykit: Vlasov fields, kinematic domains and moments on the conic bundle"};
    app.require_subcommand(1);
    RunOverrides o;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<double> tol;
    std::optional<std::string> out;
    bool verbose = false;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "override numeric.seed");
        sub->add_option("--steps", steps, "override numeric.steps");
        sub->add_option("--tol", tol, "override the primary tolerance numeric.tol");
        sub->add_option("--out", out, "output root (default: $SPRAYKIT_OUT or ./spraykit-out)");
        sub->add_flag("-v,--verbose", verbose, "list passing checks too");
    };

    std::string config_path;
    auto* run = app.add_subcommand("run", "run a scenario config file");
    run->add_option("config", config_path, "scenario JSON file")->required();
    add_overrides(run);

    auto* list = app.add_subcommand("list-scenarios", "list bundled scenarios");

    std::string suite;
    auto* check = app.add_subcommand("check", "run a bundled scenario, `acceptance`, or `all`");
    check->add_option("suite", suite, "scenario name, acceptance, or all")->required();
    add_overrides(check);

    std::string run_dir;
    auto* plots = app.add_subcommand("emit-plots", "write plot-ready CSV tables for a run directory");
    plots->add_option("run-dir", run_dir, "directory holding summary.json, or a root of such directories")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfigError;
    }
    o.seed = seed;
    o.steps = steps;
    o.tol = tol;
    o.out = out;

    try {
        if (*list) {
            for (const auto& b : bundled_scenarios()) {
                const ScenarioConfig c = parse_config(b.text, b.name);
                std::cout << fmt::format("{:<30} {:<34} {}\n", c.name, c.run == "invariant-suite" ? c.run + ":" + c.suite : c.run,
                                         c.description);
            }
            return kPass;
        }
        if (*run) return run_one(load_config(config_path), o, verbose) ? kPass : kCheckFailure;
        if (*check) {
            if (suite == "acceptance") {
                bool all = true;
                for (const auto& crit : acceptance_criteria()) {
                    bool ok = true;
                    double seconds = 0.0;
                    for (const auto& name : crit.scenarios) {
                        ScenarioConfig cfg = apply_overrides(bundled_config(name), o);
                        const RunReport r = execute(cfg);
                        write_report(r, out_root(o) / cfg.name);
                        ok = ok && r.pass();
                        seconds += r.seconds;
                        if (!r.pass()) print_report(r, false);
                    }
                    const bool timed = crit.max_seconds <= 0 || seconds < crit.max_seconds;
                    std::cout << fmt::format("{} [{}] {} ({:.2f} s{})\n", ok && timed ? "PASS" : "FAIL", crit.id,
                                             crit.title, seconds,
                                             crit.max_seconds > 0 ? fmt::format(", limit {:.0f} s", crit.max_seconds) : "");
                    all = all && ok && timed;
                }
                return all ? kPass : kCheckFailure;
            }
            if (suite == "all") {
                bool all = true;
                for (const auto& b : bundled_scenarios()) all = run_one(bundled_config(b.name), o, verbose) && all;
                return all ? kPass : kCheckFailure;
            }
            return run_one(bundled_config(suite), o, verbose) ? kPass : kCheckFailure;
        }
        if (*plots) {
            for (const auto& p : emit_plots(run_dir)) std::cout << p.string() << "\n";
            return kPass;
        }
    } catch (const ConfigError& e) {
        std::cerr << "ConfigError: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "RuntimeError: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kConfigError;
}
